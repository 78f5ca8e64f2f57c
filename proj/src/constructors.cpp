#include "funcrelu/constructors.hpp"

#include <cmath>

namespace funcrelu {

namespace {

ReluNetwork single_layer(std::size_t input_dim, std::size_t rows,
                         std::vector<double> weights, std::vector<double> shifts,
                         std::vector<double> out) {
  std::vector<Layer> layers;
  layers.push_back(
      {SparseMatrix::from_dense(rows, input_dim, weights), std::move(shifts)});
  return ReluNetwork(input_dim, std::move(layers),
                     SparseMatrix::from_dense(1, rows, out));
}

// x -> (relu(x), relu(-x)) through `depth` layers; two outputs.
ReluNetwork sign_split(std::size_t depth) {
  std::vector<Layer> layers;
  layers.push_back({SparseMatrix::from_dense(2, 1, std::vector{1.0, -1.0}),
                    {0.0, 0.0}});
  for (std::size_t j = 1; j < depth; ++j)
    layers.push_back({SparseMatrix::identity(2), {0.0, 0.0}});
  return ReluNetwork(1, std::move(layers), SparseMatrix::identity(2));
}

// relu of the t^2+t forms 1 + u_k, 1 - u_k, 1 + u_k - u_j with
// u = scale * y - offset; identity output so the min net can follow.
ReluNetwork spike_forms(std::size_t t, double scale,
                        std::span<const double> offset) {
  const std::size_t d = spike_form_count(t);
  std::vector<Triplet> w;
  std::vector<double> b;
  w.reserve(2 * t * t);
  b.reserve(d);
  std::size_t row = 0;
  for (std::size_t k = 0; k < t; ++k, ++row) {
    w.push_back({row, k, scale});
    b.push_back(1.0 - offset[k]);
  }
  for (std::size_t k = 0; k < t; ++k, ++row) {
    w.push_back({row, k, -scale});
    b.push_back(1.0 + offset[k]);
  }
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t j = 0; j < t; ++j) {
      if (k == j) continue;
      w.push_back({row, k, scale});
      w.push_back({row, j, -scale});
      b.push_back(1.0 - (offset[k] - offset[j]));
      ++row;
    }
  std::vector<Layer> layers;
  layers.push_back({SparseMatrix::from_triplets(d, t, std::move(w)),
                    std::move(b)});
  return ReluNetwork(t, std::move(layers), SparseMatrix::identity(d));
}

// u -> relu(min(u)) over t^2+t inputs: the min net followed by one relu.
ReluNetwork spike_tail(std::size_t t) {
  ReluNetwork relu_out = single_layer(1, 1, {1.0}, {0.0}, {1.0});
  return compose_serial(relu_out, build_min_net(spike_form_count(t)));
}

}  // namespace

ReluNetwork build_min_net(std::size_t d) {
  if (d < 2) throw std::invalid_argument("min net needs d >= 2");
  if (d == 2) {
    // relu(x2) - relu(-x2) - relu(x2 - x1)
    return single_layer(2, 3, {0.0, 1.0, 0.0, -1.0, -1.0, 1.0}, {0, 0, 0},
                        {1.0, -1.0, -1.0});
  }
  // Inputs (m, p, q) = (min(x_1..x_{d-1}), relu(x_d), relu(-x_d)):
  //   p' = relu(p), q' = relu(q), r = relu(p - q - m),   out = p' - q' - r.
  ReluNetwork merge = single_layer(
      3, 3, {0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0}, {0, 0, 0},
      {1.0, -1.0, -1.0});
  ReluNetwork inner = build_min_net(d - 1);
  return compose_serial(merge, stack_disjoint(inner, sign_split(d - 2)));
}

ReluNetwork build_scaled_spike_net(std::size_t t, double scale,
                                   std::span<const double> offset) {
  if (t == 0) throw std::invalid_argument("spike dimension t must be >= 1");
  if (offset.size() != t)
    throw DimensionError("spike offset has length " +
                         std::to_string(offset.size()) + ", expected " +
                         std::to_string(t));
  return compose_serial(spike_tail(t), spike_forms(t, scale, offset));
}

ReluNetwork build_spike_net(std::size_t t) {
  std::vector<double> zero(t, 0.0);
  return build_scaled_spike_net(t, 1.0, zero);
}

void InterpolationSpec::validate() const {
  if (node_values.size() != grid.node_count())
    throw std::invalid_argument(
        "interpolation spec has " + std::to_string(node_values.size()) +
        " node values, grid has " + std::to_string(grid.node_count()) +
        " nodes");
  for (std::size_t i = 0; i < node_values.size(); ++i)
    if (!std::isfinite(node_values[i]))
      throw std::invalid_argument("node value " + std::to_string(i) +
                                  " is not finite");
}

InterpolationSpec InterpolationSpec::sample(
    const simplicial::ScaledGrid& grid,
    const std::function<double(std::span<const double>)>& mu,
    std::size_t node_cap) {
  const std::size_t nodes = grid.node_count();
  if (nodes > node_cap) throw NodeCapExceeded(nodes, node_cap);
  InterpolationSpec spec{grid, {}};
  spec.node_values.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    spec.node_values.push_back(mu(grid.node(i)));
  return spec;
}

namespace {

// Offsets scale * xi, computed from integer node indices so they are exact
// (half-)integers.
std::vector<double> node_offset(const simplicial::ScaledGrid& grid,
                                std::size_t flat) {
  auto idx = grid.node_index(flat);
  const double half = 0.5 * static_cast<double>(grid.N());
  std::vector<double> off(grid.t());
  for (std::size_t k = 0; k < grid.t(); ++k)
    off[k] = static_cast<double>(idx[k]) - half;
  return off;
}

}  // namespace

ReluNetwork build_interpolation_net(const InterpolationSpec& spec,
                                    std::size_t node_cap) {
  const std::size_t nodes = spec.grid.node_count();
  if (nodes > node_cap) throw NodeCapExceeded(nodes, node_cap);
  spec.validate();
  const std::size_t t = spec.grid.t();
  const ReluNetwork tail = spike_tail(t);
  ParallelAssembler assembler(t, spike_depth(t));
  for (std::size_t i = 0; i < nodes; ++i) {
    auto off = node_offset(spec.grid, i);
    assembler.add(compose_serial(tail, spike_forms(t, spec.grid.scale(), off)),
                  spec.node_values[i]);
  }
  return std::move(assembler).finish();
}

std::size_t predict_interpolation_nonzeros(const InterpolationSpec& spec) {
  const std::size_t t = spec.grid.t();
  const std::size_t per_block =
      2 * t * t + min_net_nonzeros(spike_form_count(t));
  std::size_t total = 0;
  for (std::size_t i = 0; i < spec.grid.node_count(); ++i) {
    auto off = node_offset(spec.grid, i);
    std::size_t shifts = 0;
    for (std::size_t k = 0; k < t; ++k) {
      shifts += (1.0 - off[k] != 0.0);
      shifts += (1.0 + off[k] != 0.0);
      for (std::size_t j = 0; j < t; ++j)
        if (j != k) shifts += (1.0 - (off[k] - off[j]) != 0.0);
    }
    total += per_block + shifts + (spec.node_values[i] != 0.0);
  }
  return total;
}

double interpolate_direct(const InterpolationSpec& spec,
                          std::span<const double> y) {
  const auto z = spec.grid.to_lattice(y);
  const std::size_t t = spec.grid.t();
  std::vector<double> u(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.node_values.size(); ++i) {
    auto idx = spec.grid.node_index(i);
    for (std::size_t k = 0; k < t; ++k)
      u[k] = z[k] - static_cast<double>(idx[k]);
    sum += spec.node_values[i] * simplicial::spike(u);
  }
  return sum;
}

double interpolate_local(const InterpolationSpec& spec,
                         std::span<const double> y) {
  const auto z = spec.grid.to_lattice(y);
  const std::size_t t = spec.grid.t();
  const auto N = static_cast<double>(spec.grid.N());
  std::vector<double> u(t);
  std::vector<std::size_t> idx(t);
  double sum = 0.0;
  for (const auto& v : simplicial::vertices(simplicial::locate(z))) {
    bool inside = true;
    for (std::size_t k = 0; k < t; ++k) {
      if (v[k] < 0.0 || v[k] > N) inside = false;
      u[k] = z[k] - v[k];
    }
    if (!inside) continue;
    for (std::size_t k = 0; k < t; ++k) idx[k] = static_cast<std::size_t>(v[k]);
    sum += spec.node_values[spec.grid.flat_index(idx)] * simplicial::spike(u);
  }
  return sum;
}

double interpolation_error_bound(std::size_t t, std::size_t N, double R,
                                 const Modulus& omega) {
  return 2.0 * static_cast<double>(t) *
         omega(2.0 * R / static_cast<double>(N));
}

double weight_constant(std::size_t nonzeros, std::size_t t, std::size_t N) {
  const double td = static_cast<double>(t);
  return static_cast<double>(nonzeros) /
         (td * td * td * td *
          std::pow(static_cast<double>(N + 1), static_cast<double>(t)));
}

}  // namespace funcrelu
