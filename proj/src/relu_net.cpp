#include "funcrelu/relu_net.hpp"

#include <algorithm>
#include <string>

namespace funcrelu {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols,
                                      std::span<const double> row_major) {
  if (row_major.size() != rows * cols)
    throw DimensionError("dense matrix " + shape(rows, cols) + " given " +
                         std::to_string(row_major.size()) + " values");
  SparseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double v = row_major[r * cols + c];
      if (v != 0.0) {
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  for (const auto& e : entries)
    if (e.row >= rows || e.col >= cols)
      throw DimensionError("triplet (" + std::to_string(e.row) + "," +
                           std::to_string(e.col) + ") outside " +
                           shape(rows, cols));
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  SparseMatrix m(rows, cols);
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      std::size_t c = entries[i].col;
      double sum = 0.0;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c)
        sum += entries[i++].value;
      if (sum != 0.0) {
        m.col_idx_.push_back(c);
        m.values_.push_back(sum);
      }
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_idx_.push_back(i);
    m.values_.push_back(1.0);
    m.row_ptr_[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols,
                                    std::vector<std::size_t> row_ptr,
                                    std::vector<std::size_t> col_idx,
                                    std::vector<double> values) {
  if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 ||
      row_ptr.back() != values.size() || col_idx.size() != values.size())
    throw DimensionError("inconsistent CSR arrays for " + shape(rows, cols));
  SparseMatrix m(rows, cols);
  std::size_t out = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= cols)
        throw DimensionError("column index out of range in " +
                             shape(rows, cols));
      if (values[k] == 0.0) continue;
      col_idx[out] = col_idx[k];
      values[out] = values[k];
      ++out;
    }
    m.row_ptr_[r + 1] = out;
  }
  col_idx.resize(out);
  values.resize(out);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_)
    throw DimensionError("index outside " + shape(rows_, cols_));
  auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> out(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out[r * cols_ + col_idx_[k]] = values_[k];
  return out;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.push_back({r, col_idx_[k], values_[k]});
  return out;
}

void SparseMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_)
    throw DimensionError("cannot multiply " + shape(rows_, cols_) +
                         " by vector of length " + std::to_string(x.size()));
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      acc += values_[k] * x[col_idx_[k]];
    y[r] = acc;
  }
}

SparseMatrix product(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("product of " + shape(a.rows(), a.cols()) + " and " +
                         shape(b.rows(), b.cols()));
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<char> used(b.cols(), 0);
  std::vector<std::size_t> touched;
  const auto& ap = a.row_ptr();
  const auto& bp = b.row_ptr();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    touched.clear();
    for (std::size_t k = ap[r]; k < ap[r + 1]; ++k) {
      std::size_t mid = a.col_idx()[k];
      double av = a.values()[k];
      for (std::size_t l = bp[mid]; l < bp[mid + 1]; ++l) {
        std::size_t c = b.col_idx()[l];
        if (!used[c]) {
          used[c] = 1;
          touched.push_back(c);
        }
        acc[c] += av * b.values()[l];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t c : touched) {
      if (acc[c] != 0.0) {
        col_idx.push_back(c);
        values.push_back(acc[c]);
      }
      acc[c] = 0.0;
      used[c] = 0;
    }
    row_ptr.push_back(values.size());
  }
  return SparseMatrix::from_csr(a.rows(), b.cols(), std::move(row_ptr),
                                std::move(col_idx), std::move(values));
}

// ---------------------------------------------------------------------------
// ReluNetwork

ReluNetwork::ReluNetwork(std::size_t input_dim, std::vector<Layer> layers,
                         SparseMatrix output)
    : input_dim_(input_dim), layers_(std::move(layers)),
      output_(std::move(output)) {
  if (input_dim_ == 0) throw DimensionError("input_dim must be positive");
  if (layers_.empty())
    throw DimensionError("a network needs at least one hidden layer");
  std::size_t prev = input_dim_;
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    const Layer& l = layers_[j];
    if (l.weights.cols() != prev)
      throw DimensionError("layer " + std::to_string(j + 1) + " expects " +
                           std::to_string(l.weights.cols()) +
                           " inputs but receives " + std::to_string(prev));
    if (l.shifts.size() != l.weights.rows())
      throw DimensionError("layer " + std::to_string(j + 1) + " has " +
                           std::to_string(l.weights.rows()) + " units but " +
                           std::to_string(l.shifts.size()) + " shifts");
    prev = l.weights.rows();
  }
  if (output_.cols() != prev)
    throw DimensionError("output matrix has " +
                         std::to_string(output_.cols()) +
                         " columns, last layer width is " +
                         std::to_string(prev));
}

std::vector<std::size_t> ReluNetwork::widths() const {
  std::vector<std::size_t> w;
  w.reserve(layers_.size());
  for (const auto& l : layers_) w.push_back(l.weights.rows());
  return w;
}

std::vector<double> ReluNetwork::evaluate_multi(
    std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw DimensionError("input has length " + std::to_string(x.size()) +
                         ", network expects " + std::to_string(input_dim_));
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (const Layer& l : layers_) {
    next.assign(l.weights.rows(), 0.0);
    l.weights.multiply(cur, next);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = relu(next[i] + l.shifts[i]);
    cur.swap(next);
  }
  std::vector<double> out(output_.rows(), 0.0);
  output_.multiply(cur, out);
  return out;
}

double ReluNetwork::evaluate(std::span<const double> x) const {
  if (output_dim() != 1)
    throw DimensionError("evaluate() needs a scalar network, this one has " +
                         std::to_string(output_dim()) + " outputs");
  return evaluate_multi(x)[0];
}

NonzeroBreakdown ReluNetwork::nonzero_breakdown() const {
  NonzeroBreakdown b;
  for (const Layer& l : layers_) {
    std::size_t shifts = static_cast<std::size_t>(
        std::count_if(l.shifts.begin(), l.shifts.end(),
                      [](double v) { return v != 0.0; }));
    b.weights += l.weights.nonzeros();
    b.shifts += shifts;
    b.per_layer.push_back(l.weights.nonzeros() + shifts);
  }
  b.output = output_.nonzeros();
  return b;
}

// ---------------------------------------------------------------------------
// Builders and composition

ReluNetwork zero_network(std::size_t input_dim, std::size_t depth) {
  if (depth == 0) throw DimensionError("depth must be positive");
  std::vector<Layer> layers;
  std::size_t prev = input_dim;
  for (std::size_t j = 0; j < depth; ++j) {
    layers.push_back({SparseMatrix(1, prev), {0.0}});
    prev = 1;
  }
  return ReluNetwork(input_dim, std::move(layers), SparseMatrix(1, 1));
}

ReluNetwork identity_network(std::size_t dim, std::size_t depth) {
  if (depth == 0) throw DimensionError("depth must be positive");
  std::vector<Triplet> split;
  std::vector<Triplet> merge;
  for (std::size_t i = 0; i < dim; ++i) {
    split.push_back({2 * i, i, 1.0});
    split.push_back({2 * i + 1, i, -1.0});
    merge.push_back({i, 2 * i, 1.0});
    merge.push_back({i, 2 * i + 1, -1.0});
  }
  std::vector<Layer> layers;
  layers.push_back({SparseMatrix::from_triplets(2 * dim, dim, split),
                    std::vector<double>(2 * dim, 0.0)});
  for (std::size_t j = 1; j < depth; ++j)
    layers.push_back({SparseMatrix::identity(2 * dim),
                      std::vector<double>(2 * dim, 0.0)});
  return ReluNetwork(dim, std::move(layers),
                     SparseMatrix::from_triplets(dim, 2 * dim, merge));
}

ReluNetwork compose_serial(const ReluNetwork& outer,
                           const ReluNetwork& inner) {
  if (outer.input_dim() != inner.output_dim())
    throw DimensionError("cannot feed " + std::to_string(inner.output_dim()) +
                         " outputs into a network with input_dim " +
                         std::to_string(outer.input_dim()));
  std::vector<Layer> layers = inner.layers();
  const Layer& first = outer.layers().front();
  layers.push_back({product(first.weights, inner.output()), first.shifts});
  for (std::size_t j = 1; j < outer.layers().size(); ++j)
    layers.push_back(outer.layers()[j]);
  return ReluNetwork(inner.input_dim(), std::move(layers), outer.output());
}

namespace {

SparseMatrix block_diagonal(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t = a.triplets();
  for (const auto& e : b.triplets())
    t.push_back({e.row + a.rows(), e.col + a.cols(), e.value});
  return SparseMatrix::from_triplets(a.rows() + b.rows(), a.cols() + b.cols(),
                                     std::move(t));
}

}  // namespace

ReluNetwork stack_disjoint(const ReluNetwork& f, const ReluNetwork& g) {
  if (f.depth() != g.depth())
    throw DimensionError("stack_disjoint needs equal depths, got " +
                         std::to_string(f.depth()) + " and " +
                         std::to_string(g.depth()));
  std::vector<Layer> layers;
  for (std::size_t j = 0; j < f.depth(); ++j) {
    const Layer& a = f.layers()[j];
    const Layer& b = g.layers()[j];
    std::vector<double> shifts = a.shifts;
    shifts.insert(shifts.end(), b.shifts.begin(), b.shifts.end());
    layers.push_back({block_diagonal(a.weights, b.weights), std::move(shifts)});
  }
  return ReluNetwork(f.input_dim() + g.input_dim(), std::move(layers),
                     block_diagonal(f.output(), g.output()));
}

ReluNetwork pad_depth(const ReluNetwork& net, std::size_t target_depth) {
  if (target_depth < net.depth())
    throw DimensionError("cannot pad depth " + std::to_string(net.depth()) +
                         " down to " + std::to_string(target_depth));
  if (target_depth == net.depth()) return net;
  return compose_serial(
      identity_network(net.output_dim(), target_depth - net.depth()), net);
}

ReluNetwork compose_parallel(std::span<const ReluNetwork> nets,
                             std::span<const double> coefficients) {
  if (nets.empty()) throw DimensionError("compose_parallel of no networks");
  if (nets.size() != coefficients.size())
    throw DimensionError(std::to_string(nets.size()) + " networks but " +
                         std::to_string(coefficients.size()) +
                         " coefficients");
  ParallelAssembler asm_(nets.front().input_dim(), nets.front().depth());
  for (std::size_t i = 0; i < nets.size(); ++i)
    asm_.add(nets[i], coefficients[i]);
  return std::move(asm_).finish();
}

ParallelAssembler::ParallelAssembler(std::size_t input_dim, std::size_t depth)
    : input_dim_(input_dim), layers_(depth) {
  if (depth == 0) throw DimensionError("depth must be positive");
}

void ParallelAssembler::add(const ReluNetwork& net, double coefficient) {
  if (net.input_dim() != input_dim_)
    throw DimensionError("parallel block has input_dim " +
                         std::to_string(net.input_dim()) + ", expected " +
                         std::to_string(input_dim_));
  if (net.depth() != layers_.size())
    throw DimensionError("parallel block has depth " +
                         std::to_string(net.depth()) + ", expected " +
                         std::to_string(layers_.size()) +
                         " (pad with pad_depth first)");
  if (net.output_dim() != 1)
    throw DimensionError("parallel blocks must be scalar-valued");

  for (std::size_t j = 0; j < layers_.size(); ++j) {
    Csr& dst = layers_[j];
    const Layer& src = net.layers()[j];
    // Layer 1 reads the shared input; deeper layers read this block's own
    // units of the previous layer.
    std::size_t col_shift = 0;
    if (j > 0)
      col_shift = layers_[j - 1].shifts.size() -
                  net.layers()[j - 1].shifts.size();
    const auto& rp = src.weights.row_ptr();
    for (std::size_t r = 0; r < src.weights.rows(); ++r) {
      for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
        dst.col_idx.push_back(src.weights.col_idx()[k] + col_shift);
        dst.values.push_back(src.weights.values()[k]);
      }
      dst.row_ptr.push_back(dst.values.size());
    }
    dst.shifts.insert(dst.shifts.end(), src.shifts.begin(), src.shifts.end());
  }
  std::size_t last_shift =
      layers_.back().shifts.size() - net.layers().back().shifts.size();
  const SparseMatrix& out = net.output();
  for (std::size_t k = 0; k < out.nonzeros(); ++k) {
    double v = coefficient * out.values()[k];
    if (v != 0.0) output_.emplace_back(out.col_idx()[k] + last_shift, v);
  }
  ++blocks_;
}

ReluNetwork ParallelAssembler::finish() && {
  if (blocks_ == 0) throw DimensionError("no blocks were added");
  std::vector<Layer> layers;
  layers.reserve(layers_.size());
  std::size_t prev = input_dim_;
  for (Csr& c : layers_) {
    std::size_t rows = c.shifts.size();
    layers.push_back({SparseMatrix::from_csr(rows, prev, std::move(c.row_ptr),
                                             std::move(c.col_idx),
                                             std::move(c.values)),
                      std::move(c.shifts)});
    prev = rows;
  }
  std::vector<std::size_t> row_ptr{0, output_.size()};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(output_.size());
  values.reserve(output_.size());
  for (auto [c, v] : output_) {
    col_idx.push_back(c);
    values.push_back(v);
  }
  return ReluNetwork(input_dim_, std::move(layers),
                     SparseMatrix::from_csr(1, prev, std::move(row_ptr),
                                            std::move(col_idx),
                                            std::move(values)));
}

}  // namespace funcrelu
