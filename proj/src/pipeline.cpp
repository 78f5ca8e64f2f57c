#include "funcrelu/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace funcrelu {

using Json = nlohmann::ordered_json;

namespace {

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

bool in_unit_box(std::span<const double> x) {
  for (double v : x)
    if (v < 0.0 || v > 1.0) return false;
  return true;
}

double indicator_inner(std::span<const double> values,
                       const legendre::QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i)
    if (in_unit_box(rule.point(i))) acc += rule.weights[i] * values[i];
  return acc;
}

}  // namespace

double TargetFunctional::operator()(const InputFunction& f,
                                    const legendre::QuadratureRule& rule) const {
  std::vector<double> vals(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) vals[i] = f(rule.point(i));
  return eval(vals, rule);
}

TargetFunctional TargetFunctional::linear(std::size_t s) {
  (void)s;
  return {"linear", indicator_inner, [](double r) { return r; }, 1.0, 1.0};
}

TargetFunctional TargetFunctional::sine(std::size_t s) {
  (void)s;
  return {"sine",
          [](std::span<const double> v, const legendre::QuadratureRule& rule) {
            return std::sin(indicator_inner(v, rule));
          },
          [](double r) { return r; }, 1.0, 1.0};
}

TargetFunctional TargetFunctional::constant(double c) {
  return {"constant",
          [c](std::span<const double>, const legendre::QuadratureRule&) { return c; },
          [](double) { return 0.0; }, 0.0, 1.0};
}

TargetFunctional TargetFunctional::coefficient(
    std::shared_ptr<const legendre::LegendreBasis> basis, std::size_t k) {
  (void)basis->multi_index(k);
  return {"coefficient",
          [basis, k](std::span<const double> v, const legendre::QuadratureRule& rule) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i)
              acc += rule.weights[i] * v[i] * basis->eval(k, rule.point(i));
            return acc;
          },
          [](double r) { return r; }, 1.0, 1.0};
}

TargetFunctional TargetFunctional::squared_norm(double B) {
  return {"squared_norm",
          [](std::span<const double> v, const legendre::QuadratureRule& rule) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i)
              acc += rule.weights[i] * v[i] * v[i];
            return acc;
          },
          [B](double r) { return r * (2.0 * B + r); }, 2.0 * B, 1.0};
}

TargetFunctional TargetFunctional::by_name(const std::string& name, std::size_t s) {
  if (name == "linear") return linear(s);
  if (name == "sine") return sine(s);
  if (name == "constant") return constant(1.0);
  if (name == "squared_norm") return squared_norm(1.0);
  throw std::invalid_argument("unknown functional '" + name +
                              "' (expected linear, sine, constant or squared_norm)");
}

InputKind parse_input_kind(const std::string& name) {
  if (name == "hoelder_ball") return InputKind::kHoelderBall;
  if (name == "sobolev_like") return InputKind::kSobolevLike;
  if (name == "polynomial_ball") return InputKind::kPolynomialBall;
  throw std::invalid_argument("unknown input class '" + name + "'");
}

std::string to_string(InputKind kind) {
  switch (kind) {
    case InputKind::kHoelderBall: return "hoelder_ball";
    case InputKind::kSobolevLike: return "sobolev_like";
    case InputKind::kPolynomialBall: return "polynomial_ball";
  }
  return "?";
}

std::size_t InputClass::effective_series_degree() const {
  if (kind == InputKind::kPolynomialBall) return degree;
  if (series_degree) return series_degree;
  return s == 1 ? 32 : s == 2 ? 12 : 6;
}

double SeriesInput::tail_norm(std::size_t m) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k)
    if (std::any_of(indices[k].begin(), indices[k].end(),
                    [m](std::uint32_t a) { return a > m; }))
      acc += coeffs[k] * coeffs[k];
  return std::sqrt(acc);
}

namespace {

struct SeriesData {
  std::size_t s;
  std::size_t degree;
  std::vector<legendre::MultiIndex> indices;
  std::vector<double> coeffs;
};

double eval_series(const SeriesData& d, std::span<const double> x) {
  const std::size_t side = d.degree + 1;
  std::vector<double> axis(d.s * side);
  for (std::size_t j = 0; j < d.s; ++j)
    legendre::orthonormal_all(x[j], std::span<double>(axis.data() + j * side, side));
  double v = 0.0;
  for (std::size_t k = 0; k < d.indices.size(); ++k) {
    double term = d.coeffs[k];
    for (std::size_t j = 0; j < d.s; ++j) term *= axis[j * side + d.indices[k][j]];
    v += term;
  }
  return v;
}

}  // namespace

std::vector<SeriesInput> generate_inputs(const InputClass& cls) {
  if (cls.sample_count == 0)
    throw std::invalid_argument("input class needs sample_count >= 1");
  if (cls.s == 0) throw std::invalid_argument("input dimension s must be >= 1");
  const std::size_t D = cls.effective_series_degree();
  const std::size_t side = D + 1;

  std::vector<legendre::MultiIndex> indices;
  legendre::MultiIndex alpha(cls.s, 0);
  std::size_t total = 1;
  for (std::size_t j = 0; j < cls.s; ++j) total *= side;
  for (std::size_t i = 0; i < total; ++i) {
    indices.push_back(alpha);
    for (std::size_t j = cls.s; j-- > 0;) {
      if (++alpha[j] < side) break;
      alpha[j] = 0;
    }
  }

  std::mt19937_64 rng(cls.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double decay = cls.beta + 0.5 * static_cast<double>(cls.s) + 0.1;

  std::vector<SeriesInput> out;
  out.reserve(cls.sample_count);
  for (std::size_t n = 0; n < cls.sample_count; ++n) {
    std::vector<double> c(indices.size());
    double norm2 = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      double deg = 0.0;
      for (auto a : indices[k]) deg += a;
      switch (cls.kind) {
        case InputKind::kHoelderBall: {
          const double w = std::max(1.0, deg);
          c[k] = uniform(rng) * std::pow(w, -decay);
          norm2 += c[k] * c[k] * std::pow(w, 2.0 * cls.beta);
          break;
        }
        case InputKind::kSobolevLike: {
          const double w = 1.0 + deg;
          c[k] = gauss(rng) * std::pow(w, -decay);
          norm2 += c[k] * c[k] * std::pow(w, 2.0 * cls.beta);
          break;
        }
        case InputKind::kPolynomialBall:
          c[k] = uniform(rng);
          norm2 += c[k] * c[k];
          break;
      }
    }
    const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (double& v : c) v *= scale;

    auto data = std::make_shared<SeriesData>(SeriesData{cls.s, D, indices, c});
    SeriesInput in;
    in.s = cls.s;
    in.indices = indices;
    in.coeffs = std::move(c);
    in.function = {[data](std::span<const double> x) { return eval_series(*data, x); },
                   "series:" + to_string(cls.kind) + "#" + std::to_string(n)};
    out.push_back(std::move(in));
  }
  return out;
}

WeightCapExceeded::WeightCapExceeded(std::size_t predicted, std::size_t cap)
    : std::runtime_error("network would have " + std::to_string(predicted) +
                         " nonzero weights, cap is " + std::to_string(cap)),
      predicted_(predicted) {}

double FunctionalNet::evaluate_discretized(std::span<const double> nu) const {
  return net.evaluate(nu);
}

double FunctionalNet::evaluate(const InputFunction& f) const {
  return evaluate_discretized(op->discretize(f));
}

double FunctionalNet::evaluate_oracle_discretized(std::span<const double> nu) const {
  return interpolate_local(spec, nu);
}

double FunctionalNet::evaluate_oracle(const InputFunction& f) const {
  return evaluate_oracle_discretized(op->discretize(f));
}

double functional_on_coefficients(const TargetFunctional& F,
                                  const DiscretizationOperator& op,
                                  std::span<const double> xi) {
  return F.eval(op.reconstruct_values(xi), op.rule());
}

FunctionalNet build_functional_net(const TargetFunctional& F,
                                   std::shared_ptr<const DiscretizationOperator> op,
                                   const simplicial::ScaledGrid& grid,
                                   std::size_t node_cap, std::size_t weight_cap) {
  if (grid.t() != op->t())
    throw DimensionError("grid dimension " + std::to_string(grid.t()) +
                         " does not match basis size " + std::to_string(op->t()));
  const auto start = std::chrono::steady_clock::now();
  auto spec = InterpolationSpec::sample(
      grid,
      [&](std::span<const double> xi) { return functional_on_coefficients(F, *op, xi); },
      node_cap);
  const std::size_t predicted = predict_interpolation_nonzeros(spec);
  if (predicted > weight_cap) throw WeightCapExceeded(predicted, weight_cap);
  ReluNetwork net = build_interpolation_net(spec, node_cap);
  FunctionalNet out{op, std::move(spec), std::move(net)};
  out.m = op->m();
  out.N = grid.N();
  out.R = grid.R();
  out.depth = out.net.depth();
  out.nonzeros = out.net.count_nonzero();
  out.build_seconds = elapsed(start);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
void read_opt(const Json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"s", "p", "functional", "filter", "input_class", "sweep", "seed",
                    "c1", "C_K", "node_cap", "weight_cap", "rate_m_max",
                    "truth_nodes", "dump_dir"},
                   "config");
    read_opt(j, "s", c.s);
    read_opt(j, "p", c.p);
    read_opt(j, "functional", c.functional);
    if (j.contains("filter")) c.filter = parse_filter_kind(j.at("filter").get<std::string>());
    if (j.contains("input_class")) {
      const Json& ic = j.at("input_class");
      reject_unknown(ic, {"kind", "beta", "sample_count", "seed", "series_degree", "degree"},
                     "input_class");
      if (ic.contains("kind")) c.input.kind = parse_input_kind(ic.at("kind").get<std::string>());
      read_opt(ic, "beta", c.input.beta);
      read_opt(ic, "sample_count", c.input.sample_count);
      read_opt(ic, "seed", c.input.seed);
      read_opt(ic, "series_degree", c.input.series_degree);
      read_opt(ic, "degree", c.input.degree);
    }
    read_opt(j, "seed", c.input.seed);
    if (j.contains("sweep")) {
      const Json& sw = j.at("sweep");
      reject_unknown(sw, {"m", "N"}, "sweep");
      read_opt(sw, "m", c.m_values);
      read_opt(sw, "N", c.N_values);
    }
    read_opt(j, "c1", c.c1);
    read_opt(j, "C_K", c.C_K);
    read_opt(j, "node_cap", c.node_cap);
    read_opt(j, "weight_cap", c.weight_cap);
    read_opt(j, "rate_m_max", c.rate_m_max);
    read_opt(j, "truth_nodes", c.truth_nodes);
    read_opt(j, "dump_dir", c.dump_dir);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  c.input.s = c.s;
  if (c.s == 0) throw std::invalid_argument("config: s must be >= 1");
  if (!(c.p >= 1.0) || !std::isfinite(c.p))
    throw std::invalid_argument("config: p must be finite and >= 1");
  for (auto N : c.N_values)
    if (N == 0) throw std::invalid_argument("config: N values must be >= 1");
  (void)TargetFunctional::by_name(c.functional, c.s);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

double c9_constant(std::size_t s, double lambda, double beta, double p) {
  const double sd = static_cast<double>(s);
  const double theta = 2.0 * sd * std::abs(1.0 / p - 0.5);
  return 8.0 * sd + std::pow(2.0, 1.0 + sd) * (sd / lambda + theta + beta);
}

std::size_t balanced_degree(double log_M, double c9, std::size_t s) {
  auto threshold = [&](std::size_t m) {
    const double md = static_cast<double>(m);
    return c9 * std::pow(md, static_cast<double>(s)) * std::log(3.0 * md);
  };
  std::size_t m = 0;
  while (threshold(m + 1) <= log_M) ++m;
  return m;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs at least two paired points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Per-axis node count that integrates f L_k exactly on each panel for a
// series of per-axis degree D.
std::size_t exact_nodes(std::size_t m, std::size_t D) {
  return std::max(default_nodes_per_axis(m), (D + 2 * m) / 2 + 1);
}

// Nonzeros of one scaled spike block with every shift and coefficient
// nonzero.
double block_nonzeros(std::size_t t) {
  const std::size_t forms = spike_form_count(t);
  return static_cast<double>(2 * t * t + min_net_nonzeros(forms) + forms + 1);
}

// Smallest c >= 0 with omega(c * eps) >= target.
double invert_modulus(const Modulus& omega, double eps, double target) {
  if (target <= 0.0) return 0.0;
  if (eps <= 0.0) return std::numeric_limits<double>::infinity();
  double hi = 1.0;
  while (omega(hi * eps) < target) {
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (omega(mid * eps) >= target ? hi : lo) = mid;
  }
  return hi;
}

struct MeasuredDegree {
  std::shared_ptr<const DiscretizationOperator> op;
  std::vector<std::vector<double>> nu;
  std::vector<double> F_Vm;  // F(V_m f) on the truth rule
  std::vector<double> mu;    // mu(nu) on op's rule
  double discretization_error = 0.0;
  double eps_hat = 0.0;
};

MeasuredDegree measure_degree(const ExperimentConfig& cfg, const TargetFunctional& F,
                              std::size_t m, const std::vector<SeriesInput>& inputs,
                              const std::vector<double>& truth,
                              const legendre::QuadratureRule& truth_rule,
                              bool with_radius) {
  MeasuredDegree d;
  const std::size_t D = cfg.input.effective_series_degree();
  d.op = std::make_shared<const DiscretizationOperator>(cfg.s, m, cfg.filter,
                                                        exact_nodes(m, D), 2);
  const RadiusSpec radius{m, cfg.s, cfg.p, cfg.C_K, cfg.c1};
  if (!inputs.empty()) {
    double change = d.op->refinement_change(inputs.front().function);
    if (change > kRefinementTolerance)
      std::cerr << "warning: m=" << m << " discretization changed by " << change
                << " under node doubling\n";
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto nu = d.op->discretize(inputs[i].function, with_radius ? &radius : nullptr);
    legendre::PolyCoeffs poly{d.op->basis_ptr(), nu};
    const double fv = F({[&poly](std::span<const double> x) { return poly(x); }, "V_m f"},
                        truth_rule);
    d.discretization_error = std::max(d.discretization_error, std::abs(truth[i] - fv));
    d.mu.push_back(functional_on_coefficients(F, *d.op, nu));
    d.F_Vm.push_back(fv);
    d.nu.push_back(std::move(nu));
  }
  return d;
}

}  // namespace

ExperimentReport run_rate_experiment(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.config = cfg;
  const TargetFunctional F = TargetFunctional::by_name(cfg.functional, cfg.s);
  const auto inputs = generate_inputs(cfg.input);
  const auto truth_rule = legendre::composite_gauss_rule(
      std::max(cfg.truth_nodes, cfg.input.effective_series_degree() / 2 + 2), 2, cfg.s);
  std::vector<double> truth;
  for (const auto& in : inputs) truth.push_back(F(in.function, truth_rule));

  for (std::size_t m : cfg.m_values) {
    const auto start = std::chrono::steady_clock::now();
    MeasuredDegree d = measure_degree(cfg, F, m, inputs, truth, truth_rule, true);
    double eps_hat = 0.0;
    for (const auto& in : inputs)
      eps_hat = std::max(eps_hat, projection_error(in.function, cfg.s, m, cfg.p));
    const double setup = elapsed(start);
    const Modulus transfer = transfer_modulus(F.omega, m, cfg.s, cfg.p, cfg.c1);
    const double R = RadiusSpec{m, cfg.s, cfg.p, cfg.C_K, cfg.c1}.R();

    std::vector<std::size_t> Ns = cfg.N_values;
    std::sort(Ns.begin(), Ns.end());
    for (std::size_t N : Ns) {
      const auto row_start = std::chrono::steady_clock::now();
      SweepRow row;
      row.m = m;
      row.t = d.op->t();
      row.N = N;
      row.R = R;
      row.eps_hat = eps_hat;
      row.discretization_error = d.discretization_error;
      row.bound_grid = 2.0 * static_cast<double>(row.t) *
                       transfer(2.0 * R / static_cast<double>(N));
      try {
        FunctionalNet fnet = build_functional_net(
            F, d.op, simplicial::ScaledGrid(row.t, R, N), cfg.node_cap, cfg.weight_cap);
        row.J = fnet.depth;
        row.M = fnet.nonzeros;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          const double theta = fnet.evaluate_discretized(d.nu[i]);
          const double oracle = fnet.evaluate_oracle_discretized(d.nu[i]);
          const double err = std::abs(truth[i] - theta);
          const double grid = std::abs(d.mu[i] - theta);
          const double slack = err - (std::abs(truth[i] - d.F_Vm[i]) + grid);
          row.sup_error = std::max(row.sup_error, err);
          row.grid_error = std::max(row.grid_error, grid);
          row.oracle_gap = std::max(row.oracle_gap, std::abs(theta - oracle));
          row.max_decomposition_slack =
              i == 0 ? slack : std::max(row.max_decomposition_slack, slack);
        }
        row.decomposition_holds = row.max_decomposition_slack <= 1e-9;
        if (!cfg.dump_dir.empty()) {
          std::filesystem::create_directories(cfg.dump_dir);
          save_network(fnet.net, cfg.dump_dir + "/net_m" + std::to_string(m) + "_N" +
                                     std::to_string(N) + ".json");
        }
      } catch (const NodeCapExceeded& e) {
        row.skipped = true;
        row.skip_reason = e.what();
      } catch (const WeightCapExceeded& e) {
        row.skipped = true;
        row.skip_reason = e.what();
      }
      row.seconds = elapsed(row_start) + (N == Ns.front() ? setup : 0.0);
      report.decomposition_holds = report.decomposition_holds && row.decomposition_holds;
      report.rows.push_back(std::move(row));
    }
  }

  // One constant for the whole run: the smallest c_hat with
  // sup_error <= omega_F(c_hat eps_hat) + grid bound at every point.
  for (const auto& row : report.rows)
    if (!row.skipped)
      report.c_hat = std::max(
          report.c_hat, invert_modulus(F.omega, row.eps_hat, row.sup_error - row.bound_grid));
  for (auto& row : report.rows) {
    if (row.skipped) continue;
    row.bound_discretization =
        std::isfinite(report.c_hat) ? F.omega(report.c_hat * row.eps_hat)
                                    : std::numeric_limits<double>::infinity();
    if (row.sup_error > row.bound_discretization + row.bound_grid + 1e-12)
      report.bound_holds = false;
  }

  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& a = report.rows[i - 1];
    const auto& b = report.rows[i];
    if (a.m != b.m || a.skipped || b.skipped) continue;
    if (b.sup_error > 1.1 * a.sup_error + 1e-12) report.monotone_in_N = false;
  }

  // Log-balance pairing: for each m the smallest M it is paired with, the
  // measured discretization error there, and the grid bound at the N that
  // M weights buy.
  report.c9 = c9_constant(cfg.s, F.lambda, cfg.input.beta, cfg.p);
  report.expected_exponent = -cfg.input.beta * F.lambda / static_cast<double>(cfg.s);
  std::vector<double> Ls, errs;
  for (std::size_t m = 1; m <= cfg.rate_m_max; ++m) {
    const double md = static_cast<double>(m);
    RatePoint pt;
    pt.m = m;
    pt.log_M = report.c9 * std::pow(md, static_cast<double>(cfg.s)) * std::log(3.0 * md);
    if (balanced_degree(pt.log_M * (1.0 + 1e-12), report.c9, cfg.s) != m)
      throw std::logic_error("log-balance pairing is inconsistent");
    pt.L = pt.log_M / std::log(pt.log_M);
    MeasuredDegree d = measure_degree(cfg, F, m, inputs, truth, truth_rule, false);
    pt.discretization_error = d.discretization_error;
    const std::size_t t = d.op->t();
    const double td = static_cast<double>(t);
    const double N =
        std::max(1.0, std::exp((pt.log_M - std::log(block_nonzeros(t))) / td) - 1.0);
    const double R = RadiusSpec{m, cfg.s, cfg.p, cfg.C_K, cfg.c1}.R();
    pt.grid_bound = 2.0 * td * transfer_modulus(F.omega, m, cfg.s, cfg.p, cfg.c1)(2.0 * R / N);
    pt.error = pt.discretization_error + pt.grid_bound;
    if (pt.error > 0.0) {
      Ls.push_back(pt.L);
      errs.push_back(pt.error);
    }
    report.rate_points.push_back(pt);
  }
  report.rate_exponent = Ls.size() >= 2 ? fit_loglog_slope(Ls, errs) : 0.0;
  return report;
}

std::string ExperimentReport::csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "m,t,N,J,M,R,sup_error,discretization_error,grid_error,eps_hat,"
        "bound_discretization,bound_grid,decomposition_holds,oracle_gap,seconds,"
        "skipped,skip_reason\n";
  for (const auto& r : rows) {
    os << r.m << ',' << r.t << ',' << r.N << ',' << r.J << ',' << r.M << ',' << r.R
       << ',' << r.sup_error << ',' << r.discretization_error << ',' << r.grid_error
       << ',' << r.eps_hat << ',' << r.bound_discretization << ',' << r.bound_grid
       << ',' << (r.decomposition_holds ? 1 : 0) << ',' << r.oracle_gap << ','
       << r.seconds << ',' << (r.skipped ? 1 : 0) << ",\"" << r.skip_reason << "\"\n";
  }
  return os.str();
}

std::string ExperimentReport::summary_json() const {
  Json j;
  j["s"] = config.s;
  j["p"] = config.p;
  j["functional"] = config.functional;
  j["filter"] = to_string(config.filter);
  j["input_class"] = {{"kind", to_string(config.input.kind)},
                      {"beta", config.input.beta},
                      {"sample_count", config.input.sample_count},
                      {"seed", config.input.seed},
                      {"series_degree", config.input.effective_series_degree()}};
  j["points"] = rows.size();
  j["skipped"] = std::count_if(rows.begin(), rows.end(),
                               [](const SweepRow& r) { return r.skipped; });
  j["c_hat"] = c_hat;
  j["bound_holds"] = bound_holds;
  j["decomposition_holds"] = decomposition_holds;
  j["monotone_in_N"] = monotone_in_N;
  Json rate;
  rate["c9"] = c9;
  rate["fitted_exponent"] = rate_exponent;
  rate["expected_exponent"] = expected_exponent;
  Json pts = Json::array();
  for (const auto& p : rate_points)
    pts.push_back({{"m", p.m},
                   {"log_M", p.log_M},
                   {"L", p.L},
                   {"discretization_error", p.discretization_error},
                   {"grid_bound", p.grid_bound},
                   {"error", p.error}});
  rate["points"] = std::move(pts);
  j["rate"] = std::move(rate);
  return j.dump(2);
}

}  // namespace funcrelu
