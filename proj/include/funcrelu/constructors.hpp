#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "funcrelu/relu_net.hpp"
#include "funcrelu/simplicial.hpp"

namespace funcrelu {

/// Modulus of continuity r -> omega(r), assumed nondecreasing.
using Modulus = std::function<double(double)>;

/// min(x_1, ..., x_d) as a ReLU net with d-1 hidden layers and d^2+4d-5
/// nonzero weights, built by min(x_1..x_d) = x_d - relu(x_d - min(x_1..x_{d-1}))
/// with x_d carried alongside as (relu(x_d), relu(-x_d)). All shifts are 0.
ReluNetwork build_min_net(std::size_t d);

constexpr std::size_t min_net_nonzeros(std::size_t d) {
  return d * d + 4 * d - 5;
}

/// psi(scale * y - offset) as a ReLU net of depth t^2+t+1: one layer
/// computing relu of the t^2+t affine forms, the min net over them, and a
/// final relu. build_spike_net(t) is the unscaled case.
ReluNetwork build_scaled_spike_net(std::size_t t, double scale,
                                   std::span<const double> offset);
ReluNetwork build_spike_net(std::size_t t);

/// Number of affine forms feeding the min net.
constexpr std::size_t spike_form_count(std::size_t t) { return t * t + t; }

constexpr std::size_t spike_depth(std::size_t t) { return t * t + t + 1; }

/// Nonzero count of the first (affine-form) layer as tallied in the
/// construction's accounting: 3t(t-1) + 4t. The built layer can be smaller
/// when a grid offset makes some shift exactly zero.
constexpr std::size_t spike_first_layer_nominal(std::size_t t) {
  return 3 * t * (t - 1) + 4 * t;
}

class NodeCapExceeded : public std::runtime_error {
 public:
  NodeCapExceeded(std::size_t nodes, std::size_t cap)
      : std::runtime_error("grid has " + std::to_string(nodes) +
                           " nodes, cap is " + std::to_string(cap)),
        nodes_(nodes) {}
  std::size_t nodes() const noexcept { return nodes_; }

 private:
  std::size_t nodes_;
};

inline constexpr std::size_t kDefaultNodeCap = 200000;

/// Node values of a piecewise-linear interpolant, stored in the grid's flat
/// node order.
struct InterpolationSpec {
  simplicial::ScaledGrid grid;
  std::vector<double> node_values;

  /// Throws std::invalid_argument on size mismatch or non-finite values.
  void validate() const;

  static InterpolationSpec sample(const simplicial::ScaledGrid& grid,
                                  const std::function<double(std::span<const double>)>& mu,
                                  std::size_t node_cap = kDefaultNodeCap);
};

/// H(y) = sum over grid nodes xi of mu(xi) psi((N/2R)(y - xi)), realized as
/// the parallel composition of one scaled spike net per node.
ReluNetwork build_interpolation_net(const InterpolationSpec& spec,
                                    std::size_t node_cap = kDefaultNodeCap);

/// Nonzero count build_interpolation_net would produce, computed without
/// building it.
std::size_t predict_interpolation_nonzeros(const InterpolationSpec& spec);

/// H evaluated straight from the sum over all grid nodes.
double interpolate_direct(const InterpolationSpec& spec,
                          std::span<const double> y);

/// Same value from the t+1 vertices of the cell containing y.
double interpolate_local(const InterpolationSpec& spec,
                         std::span<const double> y);

/// 2t * omega(2R/N), the sup-error bound of the interpolant on [-R, R]^t for
/// a target with modulus omega.
double interpolation_error_bound(std::size_t t, std::size_t N, double R,
                                 const Modulus& omega);

/// M / (t^4 (N+1)^t).
double weight_constant(std::size_t nonzeros, std::size_t t, std::size_t N);

}  // namespace funcrelu
