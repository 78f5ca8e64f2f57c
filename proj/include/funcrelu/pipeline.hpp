#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "funcrelu/constructors.hpp"
#include "funcrelu/discretize.hpp"
#include "funcrelu/legendre.hpp"
#include "funcrelu/relu_net.hpp"
#include "funcrelu/simplicial.hpp"

namespace funcrelu {

/// A functional F evaluated from function values at the nodes of a
/// quadrature rule, with a modulus of continuity in the L^p norm.
/// Power-type moduli c6 r^lambda set lambda; others leave it at 0.
struct TargetFunctional {
  std::string name;
  std::function<double(std::span<const double> values,
                        const legendre::QuadratureRule& rule)>
      eval;
  Modulus omega;
  double c6 = 1.0;
  double lambda = 1.0;

  /// F(f) with f sampled on `rule`.
  double operator()(const InputFunction& f, const legendre::QuadratureRule& rule) const;

  /// <f, g> with g the indicator of [0, 1]^s (||g||_2 = 1); omega(r) = r for
  /// p >= 2. Use rules whose panels split at 0.
  static TargetFunctional linear(std::size_t s);
  /// sin(<f, g>) with the same g; omega(r) = r.
  static TargetFunctional sine(std::size_t s);
  /// F = c; omega = 0.
  static TargetFunctional constant(double c);
  /// <f, L_k> for the k-th basis function of `basis`.
  static TargetFunctional coefficient(std::shared_ptr<const legendre::LegendreBasis> basis,
                                      std::size_t k);
  /// ||f||_2^2 on inputs with ||f||_2 <= B; omega(r) = r (2B + r).
  static TargetFunctional squared_norm(double B);

  /// linear | sine | constant | squared_norm, for s-variate inputs.
  static TargetFunctional by_name(const std::string& name, std::size_t s);
};

enum class InputKind { kHoelderBall, kSobolevLike, kPolynomialBall };

InputKind parse_input_kind(const std::string& name);
std::string to_string(InputKind kind);

/// Random tensor Legendre series.
///   hoelder_ball:    uniform coefficients, decay max(1,|k|)^{-(beta+s/2+0.1)},
///                    rescaled so sum c_k^2 max(1,|k|)^{2 beta} = 1.
///   sobolev_like:    Gaussian coefficients, same decay and normalization
///                    with (1+|k|) in place of max(1,|k|).
///   polynomial_ball: uniform coefficients on alpha_j <= degree, ||f||_2 = 1.
/// |k| is the total degree of the multi-index. Every sample has
/// ||f||_2 <= 1.
struct InputClass {
  InputKind kind = InputKind::kHoelderBall;
  std::size_t s = 1;
  double beta = 2.0;
  std::size_t sample_count = 64;
  std::uint64_t seed = 1;
  std::size_t series_degree = 0;  // per-axis truncation; 0 picks by s
  std::size_t degree = 2;         // polynomial_ball only

  std::size_t effective_series_degree() const;
};

/// An input sample together with its Legendre coefficients.
struct SeriesInput {
  std::size_t s = 1;
  std::vector<legendre::MultiIndex> indices;
  std::vector<double> coeffs;
  InputFunction function;

  /// Exact ||f - P_m f||_2 from the coefficients outside the alpha <= m block.
  double tail_norm(std::size_t m) const;
};

std::vector<SeriesInput> generate_inputs(const InputClass& cls);

class WeightCapExceeded : public std::runtime_error {
 public:
  WeightCapExceeded(std::size_t predicted, std::size_t cap);
  std::size_t predicted() const noexcept { return predicted_; }

 private:
  std::size_t predicted_;
};

inline constexpr std::size_t kDefaultWeightCap = 20'000'000;

/// Theta(f) = H(phi(V_m f)) where H interpolates mu(xi) = F(phi^{-1} xi)
/// on the grid.
struct FunctionalNet {
  std::shared_ptr<const DiscretizationOperator> op;
  InterpolationSpec spec;
  ReluNetwork net;
  std::size_t m = 0;
  std::size_t N = 0;
  double R = 0.0;
  std::size_t depth = 0;
  std::size_t nonzeros = 0;
  double build_seconds = 0.0;

  /// Network path.
  double evaluate(const InputFunction& f) const;
  double evaluate_discretized(std::span<const double> nu) const;
  /// Same quantity from the t+1 cell vertices, with no network.
  double evaluate_oracle(const InputFunction& f) const;
  double evaluate_oracle_discretized(std::span<const double> nu) const;
};

/// mu(xi) = F(phi^{-1} xi) evaluated with op's rule.
double functional_on_coefficients(const TargetFunctional& F,
                                  const DiscretizationOperator& op,
                                  std::span<const double> xi);

/// Throws NodeCapExceeded or WeightCapExceeded before allocating the net.
FunctionalNet build_functional_net(const TargetFunctional& F,
                                   std::shared_ptr<const DiscretizationOperator> op,
                                   const simplicial::ScaledGrid& grid,
                                   std::size_t node_cap = kDefaultNodeCap,
                                   std::size_t weight_cap = kDefaultWeightCap);

struct ExperimentConfig {
  std::size_t s = 1;
  double p = 2.0;
  std::string functional = "linear";
  InputClass input;
  FilterKind filter = FilterKind::kDlvp;
  std::vector<std::size_t> m_values{0, 1, 2};
  std::vector<std::size_t> N_values{4, 8, 16, 32};
  double c1 = 1.0;
  double C_K = 1.0;
  std::size_t node_cap = kDefaultNodeCap;
  std::size_t weight_cap = kDefaultWeightCap;
  std::size_t rate_m_max = 12;
  std::size_t truth_nodes = 64;  // per panel per axis for F(f)
  std::string dump_dir;          // networks written here when non-empty

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

struct SweepRow {
  std::size_t m = 0, t = 0, N = 0, J = 0, M = 0;
  double R = 0.0;
  double sup_error = 0.0;        // max_f |F(f) - Theta(f)|
  double discretization_error = 0.0;  // max_f |F(f) - F(V_m f)|
  double grid_error = 0.0;       // max_f |mu(nu) - H(nu)|
  double eps_hat = 0.0;          // max_f ||f - P_m f||_p
  double bound_discretization = 0.0;  // omega_F(c_hat eps_hat)
  double bound_grid = 0.0;       // 2t omega_transfer(2R/N)
  double max_decomposition_slack = 0.0;  // max_f of lhs - rhs, <= 0 when it holds
  double oracle_gap = 0.0;       // max_f |network - direct formula|
  bool decomposition_holds = true;
  bool skipped = false;
  std::string skip_reason;
  double seconds = 0.0;
};

/// One point of the log-balance pairing m(M).
struct RatePoint {
  std::size_t m = 0;
  double log_M = 0.0;
  double L = 0.0;  // log M / log log M
  double discretization_error = 0.0;
  double grid_bound = 0.0;
  double error = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SweepRow> rows;
  double c_hat = 0.0;
  bool bound_holds = true;
  bool decomposition_holds = true;
  bool monotone_in_N = true;
  double c9 = 0.0;
  std::vector<RatePoint> rate_points;
  double rate_exponent = 0.0;
  double expected_exponent = 0.0;  // -beta lambda / s

  std::string csv() const;
  std::string summary_json() const;
};

/// 8s + 2^{1+s}(s/lambda + theta + beta), theta = 2s|1/p - 1/2|.
double c9_constant(std::size_t s, double lambda, double beta, double p);

/// The m with c9 m^s log(3m) <= log M < c9 (m+1)^s log(3(m+1)); 0 when
/// log M is below the m = 1 threshold.
std::size_t balanced_degree(double log_M, double c9, std::size_t s);

/// Least-squares slope of log y on log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

ExperimentReport run_rate_experiment(const ExperimentConfig& config);

}  // namespace funcrelu
