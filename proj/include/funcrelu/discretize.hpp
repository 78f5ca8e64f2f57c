#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "funcrelu/constructors.hpp"
#include "funcrelu/legendre.hpp"

namespace funcrelu {

enum class FilterKind {
  kDlvp,      // de la Vallee Poussin-style ramp on degrees m+1..2m
  kTruncate,  // indicator of the coordinatewise degree <= m block
};

FilterKind parse_filter_kind(const std::string& name);
std::string to_string(FilterKind kind);

/// Univariate filter value h(n) for degree n.
double filter_weight(FilterKind kind, std::size_t m, std::size_t n);

/// A function on [-1, 1]^s plus a free-form description of where it came
/// from ("poly", "series:hoelder_ball#3", "builtin:abs", ...).
struct InputFunction {
  legendre::Function eval;
  std::string tag;

  double operator()(std::span<const double> x) const { return eval(x); }
};

/// The evaluator produced a NaN or infinity at a quadrature node.
class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(std::size_t node, std::vector<double> point, double value);
  std::size_t node() const noexcept { return node_; }
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::size_t node_;
  std::vector<double> point_;
};

/// A discretized vector left [-R, R]^t under an active radius.
class OutOfCube : public std::runtime_error {
 public:
  OutOfCube(std::size_t coordinate, double value, double R);
  std::size_t coordinate() const noexcept { return coordinate_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t coordinate_;
  double value_;
};

/// R = c1 * C_K * m^{2s max(1/p - 1/2, 0)}, with m^e read as 1 at m = 0.
struct RadiusSpec {
  std::size_t m = 0;
  std::size_t s = 1;
  double p = 2.0;
  double C_K = 1.0;  // bound on ||V_m f||_p over the input class
  double c1 = 1.0;   // norm-comparison constant surrogate

  double R() const;
};

/// Per-axis Gauss node count used when none is given: max(16, 4(2m+1)).
std::size_t default_nodes_per_axis(std::size_t m);

/// V_m f = sum_k h_k <f, L_k> L_k over the tensor Legendre basis of
/// Pi_{2m}, with h_k the product of univariate filter values. Inner
/// products use a fixed composite Gauss rule; the operator is immutable.
class DiscretizationOperator {
 public:
  /// nodes_per_axis = 0 picks default_nodes_per_axis(m). With panels > 1
  /// every axis is split into equal pieces, each with its own Gauss rule.
  DiscretizationOperator(std::size_t s, std::size_t m,
                         FilterKind kind = FilterKind::kDlvp,
                         std::size_t nodes_per_axis = 0,
                         std::size_t panels = 1);

  std::size_t s() const noexcept { return basis_->s(); }
  std::size_t m() const noexcept { return basis_->m(); }
  std::size_t t() const noexcept { return basis_->size(); }
  FilterKind kind() const noexcept { return kind_; }
  std::size_t nodes_per_axis() const noexcept { return q_; }
  std::size_t panels() const noexcept { return panels_; }

  const legendre::LegendreBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const legendre::LegendreBasis> basis_ptr() const noexcept {
    return basis_;
  }
  const std::vector<double>& filter() const noexcept { return filter_; }
  const legendre::QuadratureRule& rule() const noexcept { return rule_; }

  /// Basis values at the rule nodes, t rows of rule().size() entries.
  const std::vector<double>& table() const noexcept { return table_; }

  /// Coefficients of V_m f. Throws QuadratureFailure on a non-finite value.
  legendre::PolyCoeffs apply(const InputFunction& f) const;

  /// phi(V_m f). With a radius, a coordinate outside [-R, R] throws
  /// OutOfCube.
  std::vector<double> discretize(const InputFunction& f,
                                 const RadiusSpec* radius = nullptr) const;

  /// Same as discretize, from f's values at rule() nodes.
  std::vector<double> discretize_values(std::span<const double> values) const;

  /// Values of phi^{-1}(xi) at rule() nodes.
  std::vector<double> reconstruct_values(std::span<const double> xi) const;

  /// max_k |nu_k - nu'_k| / max(|nu|_inf, tiny), where nu' comes from the
  /// same operator with twice the nodes per axis.
  double refinement_change(const InputFunction& f) const;

 private:
  std::shared_ptr<const legendre::LegendreBasis> basis_;
  FilterKind kind_;
  std::size_t q_;
  std::size_t panels_;
  std::vector<double> filter_;
  legendre::QuadratureRule rule_;
  std::vector<double> table_;
};

/// Relative change threshold of the node-doubling self-check.
inline constexpr double kRefinementTolerance = 1e-8;

/// r -> omega(c1 m^{2s max(1/2 - 1/p, 0)} r).
Modulus transfer_modulus(Modulus omega, std::size_t m, std::size_t s, double p,
                         double c1 = 1.0);

/// ||f - P_m f||_p with P_m the orthogonal projection onto Pi_m. For p = 2
/// this is the best-approximation error; otherwise it is an upper bound on
/// it, with the p-norm taken by quadrature. nodes_per_axis = 0 uses
/// max(64, 4(2m+1)) points on each of two panels per axis.
double projection_error(const InputFunction& f, std::size_t s, std::size_t m,
                        double p, std::size_t nodes_per_axis = 0);

}  // namespace funcrelu
