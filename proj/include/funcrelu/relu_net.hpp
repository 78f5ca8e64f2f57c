#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace funcrelu {

/// Raised when vector or matrix shapes do not chain.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by deserialize(); section() names the part of the stream that is
/// missing or malformed ("layers", "output", ...).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string section, const std::string& what)
      : std::runtime_error(what), section_(std::move(section)) {}
  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed-row matrix that never stores an exact zero, so nonzeros() is
/// the ||.||_0 count used for network complexity.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);

  static SparseMatrix from_dense(std::size_t rows, std::size_t cols,
                                 std::span<const double> row_major);
  /// Duplicate (row, col) pairs are summed; sums that cancel to 0 are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(std::size_t n);
  /// Takes ownership of raw CSR arrays; explicit zeros are removed.
  static SparseMatrix from_csr(std::size_t rows, std::size_t cols,
                               std::vector<std::size_t> row_ptr,
                               std::vector<std::size_t> col_idx,
                               std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  double at(std::size_t r, std::size_t c) const;
  std::vector<double> to_dense() const;
  std::vector<Triplet> triplets() const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }


  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// a * b, dropping entries that cancel to exactly zero.
SparseMatrix product(const SparseMatrix& a, const SparseMatrix& b);

/// One hidden layer: h -> relu(W h + b).
struct Layer {
  SparseMatrix weights;
  std::vector<double> shifts;

  bool operator==(const Layer&) const = default;
};

struct NonzeroBreakdown {
  std::size_t weights = 0;
  std::size_t shifts = 0;
  std::size_t output = 0;
  std::vector<std::size_t> per_layer;  // weights + shifts of each hidden layer

  std::size_t total() const noexcept { return weights + shifts + output; }
};

/// Deep ReLU network x -> A relu(W_J ... relu(W_1 x + b_1) ... + b_J).
///
/// The output is a matrix A; the scalar-valued networks of the construction
/// use a single row. Depth counts hidden layers and is at least 1.
/// Instances are immutable once built.
class ReluNetwork {
 public:
  ReluNetwork() = default;
  ReluNetwork(std::size_t input_dim, std::vector<Layer> layers,
              SparseMatrix output);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t output_dim() const noexcept { return output_.rows(); }
  std::vector<std::size_t> widths() const;

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const SparseMatrix& output() const noexcept { return output_; }

  /// Scalar output; requires output_dim() == 1.
  double evaluate(std::span<const double> x) const;
  std::vector<double> evaluate_multi(std::span<const double> x) const;

  std::size_t count_nonzero() const { return nonzero_breakdown().total(); }
  NonzeroBreakdown nonzero_breakdown() const;

  bool operator==(const ReluNetwork&) const = default;

 private:
  std::size_t input_dim_ = 0;
  std::vector<Layer> layers_;
  SparseMatrix output_;
};

inline double relu(double u) { return u > 0.0 ? u : 0.0; }

/// Network of the given depth that outputs zero.
ReluNetwork zero_network(std::size_t input_dim, std::size_t depth = 1);

/// x -> x on R^dim via x = relu(x) - relu(-x), carried through `depth`
/// layers with identity blocks (2 dim units per layer).
ReluNetwork identity_network(std::size_t dim, std::size_t depth);

/// x -> outer(inner(x)). Depth is depth(inner) + depth(outer); the output
/// matrix of inner is folded into the first weight matrix of outer.
ReluNetwork compose_serial(const ReluNetwork& outer, const ReluNetwork& inner);

/// x -> sum_i c_i nets_i(x) for scalar-output nets sharing input_dim and
/// depth. First layers are stacked over the shared input, deeper layers are
/// block diagonal. The nonzero count is exactly
///   sum_i (M_i - ||a_i||_0 + ||c_i a_i||_0)  <=  sum_i M_i.
ReluNetwork compose_parallel(std::span<const ReluNetwork> nets,
                             std::span<const double> coefficients);

/// (x, z) -> (f(x), g(z)): disjoint inputs concatenated, outputs
/// concatenated. Both nets must have the same depth.
ReluNetwork stack_disjoint(const ReluNetwork& f, const ReluNetwork& g);

/// Extends `net` to `target_depth` hidden layers by routing each output
/// through the relu(u) - relu(-u) gadget. Evaluation is unchanged.
ReluNetwork pad_depth(const ReluNetwork& net, std::size_t target_depth);

/// Incremental form of compose_parallel for very many blocks.
class ParallelAssembler {
 public:
  ParallelAssembler(std::size_t input_dim, std::size_t depth);

  void add(const ReluNetwork& net, double coefficient);
  std::size_t blocks() const noexcept { return blocks_; }
  ReluNetwork finish() &&;

 private:
  struct Csr {
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    std::vector<double> shifts;
  };

  std::size_t input_dim_;
  std::size_t blocks_ = 0;
  std::vector<Csr> layers_;
  std::vector<std::pair<std::size_t, double>> output_;
};

// Serialization (serialize.cpp)

inline constexpr int kNetworkFormatVersion = 1;

std::string serialize(const ReluNetwork& net);
ReluNetwork deserialize(const std::string& text);

void save_network(const ReluNetwork& net, const std::string& path);
ReluNetwork load_network(const std::string& path);

}  // namespace funcrelu
