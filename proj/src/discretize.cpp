#include "funcrelu/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace funcrelu {

FilterKind parse_filter_kind(const std::string& name) {
  if (name == "dlvp") return FilterKind::kDlvp;
  if (name == "truncate") return FilterKind::kTruncate;
  throw std::invalid_argument("unknown filter '" + name +
                              "' (expected dlvp or truncate)");
}

std::string to_string(FilterKind kind) {
  return kind == FilterKind::kDlvp ? "dlvp" : "truncate";
}

double filter_weight(FilterKind kind, std::size_t m, std::size_t n) {
  if (n <= m) return 1.0;
  if (kind == FilterKind::kTruncate || n > 2 * m) return 0.0;
  return static_cast<double>(2 * m + 1 - n) / static_cast<double>(m + 1);
}

namespace {

std::string describe_point(std::span<const double> x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

std::vector<double> sample_at_nodes(const InputFunction& f,
                                    const legendre::QuadratureRule& rule) {
  std::vector<double> vals(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    auto x = rule.point(i);
    double v = f(x);
    if (!std::isfinite(v))
      throw QuadratureFailure(i, std::vector<double>(x.begin(), x.end()), v);
    vals[i] = v;
  }
  return vals;
}

}  // namespace

QuadratureFailure::QuadratureFailure(std::size_t node, std::vector<double> point,
                                     double value)
    : std::runtime_error("input function returned " + std::to_string(value) +
                         " at quadrature node " + std::to_string(node) + " " +
                         describe_point(point)),
      node_(node),
      point_(std::move(point)) {}

OutOfCube::OutOfCube(std::size_t coordinate, double value, double R)
    : std::runtime_error("discretized coordinate " + std::to_string(coordinate) +
                         " = " + std::to_string(value) + " lies outside [-" +
                         std::to_string(R) + ", " + std::to_string(R) +
                         "]; C_K or c1 is too small for this input"),
      coordinate_(coordinate),
      value_(value) {}

double RadiusSpec::R() const {
  const double e = 2.0 * static_cast<double>(s) * std::max(1.0 / p - 0.5, 0.0);
  return c1 * C_K * legendre::degree_power(m, e);
}

std::size_t default_nodes_per_axis(std::size_t m) {
  return std::max<std::size_t>(16, 4 * (2 * m + 1));
}

DiscretizationOperator::DiscretizationOperator(std::size_t s, std::size_t m,
                                               FilterKind kind,
                                               std::size_t nodes_per_axis,
                                               std::size_t panels)
    : basis_(std::make_shared<const legendre::LegendreBasis>(s, m)),
      kind_(kind),
      q_(nodes_per_axis ? nodes_per_axis : default_nodes_per_axis(m)),
      panels_(panels) {
  filter_.resize(basis_->size());
  for (std::size_t k = 0; k < basis_->size(); ++k) {
    double h = 1.0;
    for (auto a : basis_->multi_index(k)) h *= filter_weight(kind, m, a);
    filter_[k] = h;
  }
  rule_ = legendre::composite_gauss_rule(q_, panels_, s);
  table_ = basis_->table(rule_);
}

std::vector<double> DiscretizationOperator::discretize_values(
    std::span<const double> values) const {
  const std::size_t n = rule_.size();
  if (values.size() != n)
    throw std::invalid_argument("expected " + std::to_string(n) +
                                " node values, got " +
                                std::to_string(values.size()));
  std::vector<double> nu(t(), 0.0);
  for (std::size_t k = 0; k < t(); ++k) {
    if (filter_[k] == 0.0) continue;
    const double* row = table_.data() + k * n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += rule_.weights[i] * values[i] * row[i];
    nu[k] = filter_[k] * acc;
  }
  return nu;
}

legendre::PolyCoeffs DiscretizationOperator::apply(const InputFunction& f) const {
  return {basis_, discretize_values(sample_at_nodes(f, rule_))};
}

std::vector<double> DiscretizationOperator::discretize(
    const InputFunction& f, const RadiusSpec* radius) const {
  auto nu = apply(f).coeffs;
  if (radius) {
    const double R = radius->R();
    for (std::size_t k = 0; k < nu.size(); ++k)
      if (!(std::abs(nu[k]) <= R)) throw OutOfCube(k, nu[k], R);
  }
  return nu;
}

std::vector<double> DiscretizationOperator::reconstruct_values(
    std::span<const double> xi) const {
  if (xi.size() != t())
    throw DimensionError("coefficient vector has length " +
                         std::to_string(xi.size()) + ", expected " +
                         std::to_string(t()));
  const std::size_t n = rule_.size();
  std::vector<double> vals(n, 0.0);
  for (std::size_t k = 0; k < t(); ++k) {
    if (xi[k] == 0.0) continue;
    const double* row = table_.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) vals[i] += xi[k] * row[i];
  }
  return vals;
}

double DiscretizationOperator::refinement_change(const InputFunction& f) const {
  DiscretizationOperator fine(s(), m(), kind_, 2 * q_, panels_);
  auto a = discretize(f);
  auto b = fine.discretize(f);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, std::abs(a[k] - b[k]));
    scale = std::max(scale, std::abs(b[k]));
  }
  return diff / std::max(scale, std::numeric_limits<double>::min());
}

Modulus transfer_modulus(Modulus omega, std::size_t m, std::size_t s, double p,
                         double c1) {
  const double e = 2.0 * static_cast<double>(s) * std::max(0.5 - 1.0 / p, 0.0);
  const double factor = c1 * legendre::degree_power(m, e);
  return [omega = std::move(omega), factor](double r) { return omega(factor * r); };
}

double projection_error(const InputFunction& f, std::size_t s, std::size_t m,
                        double p, std::size_t nodes_per_axis) {
  const std::size_t q =
      nodes_per_axis ? nodes_per_axis : std::max<std::size_t>(64, 4 * (2 * m + 1));
  const auto rule = legendre::composite_gauss_rule(q, 2, s);
  const auto vals = sample_at_nodes(f, rule);
  const std::size_t n = rule.size();

  // Univariate orthonormal values up to degree m on each node coordinate,
  // then the tensor block {alpha : alpha_j <= m}.
  const std::size_t side = m + 1;
  std::vector<double> axis(n * s * side);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < s; ++j)
      legendre::orthonormal_all(
          rule.nodes[i * s + j],
          std::span<double>(axis.data() + (i * s + j) * side, side));

  std::size_t block = 1;
  for (std::size_t j = 0; j < s; ++j) block *= side;
  std::vector<double> basis_vals(n * block);
  std::vector<std::size_t> alpha(s);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(alpha.begin(), alpha.end(), 0);
    for (std::size_t k = 0; k < block; ++k) {
      double v = 1.0;
      for (std::size_t j = 0; j < s; ++j) v *= axis[(i * s + j) * side + alpha[j]];
      basis_vals[i * block + k] = v;
      for (std::size_t j = s; j-- > 0;) {
        if (++alpha[j] < side) break;
        alpha[j] = 0;
      }
    }
  }

  std::vector<double> c(block, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < block; ++k)
      c[k] += rule.weights[i] * vals[i] * basis_vals[i * block + k];

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    double proj = 0.0;
    for (std::size_t k = 0; k < block; ++k) proj += c[k] * basis_vals[i * block + k];
    resid[i] = vals[i] - proj;
  }
  return legendre::lp_norm_values(resid, rule.weights, p);
}

}  // namespace funcrelu
