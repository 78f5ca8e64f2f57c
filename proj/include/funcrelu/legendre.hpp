#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace funcrelu::legendre {

/// Orthonormal Legendre polynomial sqrt(n + 1/2) P_n(x) on [-1, 1].
double orthonormal(std::size_t n, double x);

/// Values for degrees 0..out.size()-1 at x.
void orthonormal_all(double x, std::span<double> out);

/// Tensor quadrature rule on [-1, 1]^s. Node i occupies
/// nodes[i*s .. i*s+s).
struct QuadratureRule {
  std::size_t s = 1;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {nodes.data() + i * s, s};
  }
};

/// q-point Gauss-Legendre rule, tensorized to s dimensions. Exact for
/// polynomials of coordinatewise degree <= 2q - 1.
QuadratureRule gauss_legendre_rule(std::size_t q, std::size_t s = 1);

/// Each axis split into `panels` equal pieces, q Gauss points per piece.
/// With an even panel count the split points include 0.
QuadratureRule composite_gauss_rule(std::size_t q, std::size_t panels,
                                    std::size_t s = 1);

using MultiIndex = std::vector<std::uint32_t>;
using Function = std::function<double(std::span<const double>)>;

/// Tensor-product orthonormal Legendre system spanning Pi_{2m}
/// (coordinatewise degree <= 2m) on [-1, 1]^s: t = (2m+1)^s functions.
///
/// Linear index 0 is the constant; indices are ordered by total degree,
/// ties broken lexicographically on the multi-index.
class LegendreBasis {
 public:
  LegendreBasis(std::size_t s, std::size_t m);

  std::size_t s() const noexcept { return s_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t size() const noexcept { return order_.size(); }
  std::size_t max_degree() const noexcept { return 2 * m_; }

  const MultiIndex& multi_index(std::size_t k) const;
  std::optional<std::size_t> index_of(const MultiIndex& alpha) const;

  /// L_k(x) = prod_j L_{alpha_j}(x_j) for alpha = multi_index(k).
  double eval(std::size_t k, std::span<const double> x) const;
  void eval_all(std::span<const double> x, std::span<double> out) const;

  /// size() x rule.size() table of basis values at the rule nodes,
  /// row-major by basis index.
  std::vector<double> table(const QuadratureRule& rule) const;

 private:
  std::size_t s_;
  std::size_t m_;
  std::vector<MultiIndex> order_;
};

/// Element of Pi_{2m} written in the basis: Q = sum_k coeffs[k] L_k.
struct PolyCoeffs {
  std::shared_ptr<const LegendreBasis> basis;
  std::vector<double> coeffs;

  double operator()(std::span<const double> x) const;
};

/// phi(f) = (<f, L_1>, ..., <f, L_t>) by quadrature.
PolyCoeffs phi(std::shared_ptr<const LegendreBasis> basis, const Function& f,
               const QuadratureRule& rule);

/// The polynomial with the given coefficients, as a callable.
Function phi_inverse(const PolyCoeffs& c);

/// (sum_i w_i |f(x_i)|^p)^(1/p). For non-polynomial |f|^p this is an
/// approximation whose accuracy depends on the rule.
double lp_norm(const Function& f, const QuadratureRule& rule, double p);
double lp_norm_values(std::span<const double> values,
                      std::span<const double> weights, double p);

/// Empirical form of ||Q||_p <= C m^{2s max(1/q - 1/p, 0)} ||Q||_q over
/// random Q in Pi_{2m}.
struct NormComparison {
  double max_ratio = 0.0;    // max ||Q||_p / ||Q||_q over the sample
  double exponent = 0.0;     // 2s max(1/q - 1/p, 0)
  double fitted_constant = 0.0;  // max_ratio / m^exponent (m^0 = 1 at m = 0)
};

NormComparison measure_norm_comparison(const LegendreBasis& basis, double p,
                                       double q, std::size_t samples,
                                       std::uint64_t seed,
                                       const QuadratureRule& rule);

/// m^e with the m = 0 case read as 1.
double degree_power(std::size_t m, double exponent);

}  // namespace funcrelu::legendre
