#include "funcrelu/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "funcrelu/constructors.hpp"
#include "funcrelu/discretize.hpp"
#include "funcrelu/pipeline.hpp"
#include "funcrelu/relu_net.hpp"
#include "funcrelu/simplicial.hpp"

namespace funcrelu::verify {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failure messages; the first few are kept for the report line.
struct Checker {
  std::size_t failures = 0;
  std::vector<std::string> first;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (first.size() < 3) first.push_back(what);
  }
  bool ok() const { return failures == 0; }
  std::string failures_text() const {
    std::string s = std::to_string(failures) + " failure(s)";
    for (const auto& f : first) s += "; " + f;
    return s;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

CriterionResult finish(int id, std::string name, const Checker& c, std::string detail,
                       Clock::time_point t0, double budget) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.seconds = since(t0);
  r.passed = c.ok() && r.seconds < budget;
  if (!c.ok()) detail = c.failures_text() + " | " + detail;
  if (r.seconds >= budget)
    detail += " | over the " + fmt(budget) + " s budget";
  r.detail = std::move(detail);
  return r;
}

std::vector<double> uniform_point(std::mt19937_64& rng, std::size_t t, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(t);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

CriterionResult min_network() {
  const auto t0 = Clock::now();
  Checker c;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (std::size_t d = 2; d <= 10; ++d) {
    const ReluNetwork net = build_min_net(d);
    c.expect(net.depth() == d - 1, "d=" + std::to_string(d) + " depth " +
                                       std::to_string(net.depth()));
    c.expect(net.count_nonzero() == d * d + 4 * d - 5,
             "d=" + std::to_string(d) + " M=" + std::to_string(net.count_nonzero()));
    for (int i = 0; i < 10000; ++i) {
      auto x = uniform_point(rng, d, -10.0, 10.0);
      const double err = std::abs(net.evaluate(x) - *std::min_element(x.begin(), x.end()));
      worst = std::max(worst, err);
      c.expect(err <= 1e-12, "d=" + std::to_string(d) + " error " + fmt(err));
    }
  }
  return finish(1, "min network exact, depth d-1, M = d^2+4d-5 (d=2..10)", c,
                "max error " + fmt(worst) + ", M(2)=" +
                    std::to_string(build_min_net(2).count_nonzero()) + ", M(3)=" +
                    std::to_string(build_min_net(3).count_nonzero()),
                t0, 5.0);
}

CriterionResult spike_equivalence() {
  const auto t0 = Clock::now();
  Checker c;
  std::mt19937_64 rng(202);
  double worst = 0.0;
  std::string depths;
  for (std::size_t t = 1; t <= 3; ++t) {
    const ReluNetwork net = build_spike_net(t);
    depths += (t > 1 ? "," : "") + std::to_string(net.depth());
    c.expect(net.depth() == t * t + t + 1, "t=" + std::to_string(t) + " depth");
    for (int i = 0; i < 10000; ++i) {
      auto y = uniform_point(rng, t, -2.0, 2.0);
      const double err = std::abs(net.evaluate(y) - simplicial::spike(y));
      worst = std::max(worst, err);
      c.expect(err <= 1e-12, "t=" + std::to_string(t) + " error " + fmt(err));
    }
    // Lattice {-2..2}^t.
    std::size_t total = 1;
    for (std::size_t k = 0; k < t; ++k) total *= 5;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::vector<double> y(t);
      bool origin = true;
      std::size_t r = flat;
      for (std::size_t k = 0; k < t; ++k, r /= 5) {
        y[k] = static_cast<double>(r % 5) - 2.0;
        origin = origin && y[k] == 0.0;
      }
      const double v = net.evaluate(y);
      c.expect(v == (origin ? 1.0 : 0.0),
               "t=" + std::to_string(t) + " lattice value " + fmt(v));
    }
  }
  return finish(2, "spike network matches the closed form, depth t^2+t+1 (t=1..3)", c,
                "max error " + fmt(worst) + ", depths " + depths, t0, 10.0);
}

CriterionResult triangulation_geometry() {
  const auto t0 = Clock::now();
  Checker c;
  std::mt19937_64 rng(303);
  std::size_t disagreements = 0;
  std::size_t in_support = 0;
  double worst = 0.0;
  for (std::size_t t = 2; t <= 3; ++t) {
    for (int i = 0; i < 100000; ++i) {
      auto z = uniform_point(rng, t, -5.0, 5.0);
      c.expect(simplicial::contains(simplicial::locate(z), z),
               "locate missed a point (t=" + std::to_string(t) + ")");
    }
    for (int i = 0; i < 100000; ++i) {
      auto y = uniform_point(rng, t, -2.0, 2.0);
      const bool a = simplicial::in_S0(y), b = simplicial::in_Sprime(y);
      in_support += a;
      if (a != b) ++disagreements;
    }
    const auto& fan = simplicial::origin_fan(t);
    std::vector<simplicial::AffineForm> forms;
    std::set<std::vector<double>> distinct;
    for (const auto& cell : fan) {
      auto h = simplicial::vertex_interpolant(cell);
      c.expect(h.shape(1e-12) != simplicial::AffineForm::Shape::kOther,
               "fan interpolant of unexpected shape");
      std::vector<double> key{std::round(h.constant * 1e9)};
      for (double v : h.coeffs) key.push_back(std::round(v * 1e9));
      distinct.insert(key);
      forms.push_back(std::move(h));
    }
    c.expect(distinct.size() == t * t + t,
             "t=" + std::to_string(t) + ": " + std::to_string(distinct.size()) +
                 " distinct interpolants");
    for (int i = 0; i < 1000; ++i) {
      auto y = uniform_point(rng, t, -2.0, 2.0);
      double m = std::numeric_limits<double>::infinity();
      for (const auto& h : forms) m = std::min(m, h(y));
      const double err = std::abs(std::max(m, 0.0) - simplicial::spike(y));
      worst = std::max(worst, err);
      c.expect(err <= 1e-12, "min of fan interpolants differs from spike by " + fmt(err));
    }
  }
  c.expect(disagreements == 0, std::to_string(disagreements) + " S0/S' disagreements");
  return finish(3, "triangulation: locate, support convexity, fan interpolant shapes", c,
                "S0/S' disagreements " + std::to_string(disagreements) + " (" +
                    std::to_string(in_support) + " points inside), fan sizes " +
                    std::to_string(simplicial::origin_fan(2).size()) + "," +
                    std::to_string(simplicial::origin_fan(3).size()) +
                    ", max min-form error " + fmt(worst),
                t0, 30.0);
}

CriterionResult interpolation_contract() {
  const auto t0 = Clock::now();
  Checker c;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t t = 2;
  const double R = 1.0;
  std::vector<double> sup_errors;
  std::string detail;
  for (std::size_t N : {4, 8, 16}) {
    const simplicial::ScaledGrid grid(t, R, N);
    const std::string tag = "N=" + std::to_string(N);

    InterpolationSpec random_spec{grid, {}};
    for (std::size_t i = 0; i < grid.node_count(); ++i) random_spec.node_values.push_back(u(rng));
    const ReluNetwork H = build_interpolation_net(random_spec);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      const double err = std::abs(H.evaluate(grid.node(i)) - random_spec.node_values[i]);
      c.expect(err <= 1e-10, tag + " node error " + fmt(err));
    }

    InterpolationSpec ones{grid, std::vector<double>(grid.node_count(), 1.0)};
    const ReluNetwork one = build_interpolation_net(ones);
    for (int i = 0; i < 1000; ++i) {
      auto y = uniform_point(rng, t, -R, R);
      const double err = std::abs(one.evaluate(y) - 1.0);
      c.expect(err <= 1e-10, tag + " partition of unity off by " + fmt(err));
    }

    auto norm = [](std::span<const double> y) { return std::hypot(y[0], y[1]); };
    const auto spec = InterpolationSpec::sample(grid, norm);
    const ReluNetwork Hn = build_interpolation_net(spec);
    double sup = 0.0;
    std::vector<double> y(2);
    for (int a = 0; a < 200; ++a)
      for (int b = 0; b < 200; ++b) {
        y[0] = -R + 2.0 * R * a / 199.0;
        y[1] = -R + 2.0 * R * b / 199.0;
        sup = std::max(sup, std::abs(Hn.evaluate(y) - norm(y)));
      }
    const double bound = interpolation_error_bound(t, N, R, [](double r) { return r; });
    c.expect(sup <= bound, tag + " sup error " + fmt(sup) + " above bound " + fmt(bound));
    if (!sup_errors.empty()) {
      const double ratio = sup_errors.back() / sup;
      c.expect(ratio >= 1.8, tag + " error ratio " + fmt(ratio));
      detail += ", ratio " + fmt(ratio);
    }
    sup_errors.push_back(sup);
    detail += (detail.empty() ? "" : "; ") + tag + " sup|mu-H| " + fmt(sup) + " <= " + fmt(bound);
  }
  return finish(4, "interpolation: node values, partition of unity, |y| error decay (t=2)", c,
                detail, t0, 60.0);
}

CriterionResult weight_growth() {
  const auto t0 = Clock::now();
  Checker c;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const std::vector<std::size_t> Ns{4, 8, 16, 32};
  std::string detail;
  double pooled_min = std::numeric_limits<double>::infinity(), pooled_max = 0.0;
  for (std::size_t t = 1; t <= 3; ++t) {
    std::vector<double> x, y;
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (std::size_t N : Ns) {
      const simplicial::ScaledGrid grid(t, 1.0, N);
      InterpolationSpec spec{grid, {}};
      for (std::size_t i = 0; i < grid.node_count(); ++i) spec.node_values.push_back(u(rng));
      const std::size_t M = build_interpolation_net(spec).count_nonzero();
      c.expect(M == predict_interpolation_nonzeros(spec), "predicted count differs");
      x.push_back(static_cast<double>(N + 1));
      y.push_back(static_cast<double>(M));
      const double ratio = weight_constant(M, t, N);
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    const double slope = fit_loglog_slope(x, y);
    const double td = static_cast<double>(t);
    c.expect(std::abs(slope - td) <= 0.05 * td,
             "t=" + std::to_string(t) + " slope " + fmt(slope));
    c.expect(rmax / rmin <= 4.0, "t=" + std::to_string(t) + " ratio spread " + fmt(rmax / rmin));
    pooled_min = std::min(pooled_min, rmin);
    pooled_max = std::max(pooled_max, rmax);
    detail += (t > 1 ? "; " : "") + std::string("t=") + std::to_string(t) + " slope " +
              fmt(slope) + ", M/(t^4(N+1)^t) in [" + fmt(rmin) + ", " + fmt(rmax) + "]";
  }
  detail += "; spread across t " + fmt(pooled_max / pooled_min);
  return finish(5, "weight growth: log M vs log(N+1) slope t, bounded M/(t^4(N+1)^t)", c,
                detail, t0, 60.0);
}

namespace {

ExperimentConfig acceptance_config(const std::string& functional) {
  ExperimentConfig cfg;
  cfg.s = 1;
  cfg.p = 2.0;
  cfg.functional = functional;
  cfg.input.kind = InputKind::kHoelderBall;
  cfg.input.s = 1;
  cfg.input.beta = 2.0;
  cfg.input.sample_count = 64;
  cfg.input.seed = 2024;
  cfg.m_values = {0, 1, 2};
  cfg.N_values = {4, 8, 16, 32};
  return cfg;
}

}  // namespace

CriterionResult end_to_end_decomposition() {
  const auto t0 = Clock::now();
  Checker c;
  std::string detail;
  for (const char* name : {"linear", "sine"}) {
    const auto rep = run_rate_experiment(acceptance_config(name));
    std::size_t evaluated = 0;
    std::vector<std::string> skipped;
    for (const auto& row : rep.rows) {
      if (row.skipped) {
        skipped.push_back("(" + std::to_string(row.m) + "," + std::to_string(row.N) + ")");
        continue;
      }
      ++evaluated;
      c.expect(row.decomposition_holds,
               std::string(name) + " decomposition violated at m=" + std::to_string(row.m) +
                   " N=" + std::to_string(row.N));
    }
    c.expect(rep.bound_holds, std::string(name) + " bound violated");
    c.expect(rep.c_hat <= 10.0, std::string(name) + " c_hat " + fmt(rep.c_hat));
    c.expect(evaluated > 0, std::string(name) + " no sweep point evaluated");
    detail += (detail.empty() ? "" : "; ") + std::string(name) + ": " +
              std::to_string(evaluated) + " points, c_hat " + fmt(rep.c_hat) +
              (rep.monotone_in_N ? ", monotone in N" : ", NOT monotone in N");
    if (!skipped.empty()) {
      detail += ", skipped by caps (m,N)=";
      for (const auto& s : skipped) detail += s;
    }
  }
  return finish(6, "end-to-end decomposition and reconstructed bound (s=1, beta=2)", c,
                detail, t0, 600.0);
}

CriterionResult rate_shape() {
  const auto t0 = Clock::now();
  Checker c;
  const auto rep = run_rate_experiment(acceptance_config("linear"));
  const double e = rep.rate_exponent, target = rep.expected_exponent;
  c.expect(e < 0.0, "exponent not negative");
  c.expect(e >= 2.0 * target && e <= 0.5 * target,
           "exponent " + fmt(e) + " not within a factor 2 of " + fmt(target));
  return finish(7, "rate shape over the log-balance pairing m(M) (lambda=1, beta=2, s=1)", c,
                "fitted exponent " + fmt(e) + " vs " + fmt(target) + " over m=1.." +
                    std::to_string(rep.rate_points.size()) + ", c9=" + fmt(rep.c9),
                t0, 600.0);
}

CriterionResult oracle_and_serialization(double suite_seconds) {
  const auto t0 = Clock::now();
  Checker c;
  double worst = 0.0;

  struct Case {
    std::string functional;
    std::size_t m, N;
  };
  const std::vector<Case> cases{{"linear", 1, 8}, {"sine", 0, 16}, {"sine", 1, 4},
                                {"squared_norm", 1, 8}};
  InputClass cls;
  cls.sample_count = 100;
  cls.seed = 808;
  const auto inputs = generate_inputs(cls);
  std::size_t checked_M = 0;
  for (const auto& k : cases) {
    auto op = std::make_shared<const DiscretizationOperator>(1, k.m, FilterKind::kDlvp,
                                                             std::max<std::size_t>(
                                                                 default_nodes_per_axis(k.m), 20),
                                                             2);
    const auto F = TargetFunctional::by_name(k.functional, 1);
    const auto fnet =
        build_functional_net(F, op, simplicial::ScaledGrid(op->t(), 1.0, k.N));
    for (const auto& in : inputs) {
      const auto nu = op->discretize(in.function);
      const double a = fnet.evaluate_discretized(nu);
      const double b = fnet.evaluate_oracle_discretized(nu);
      const double d = interpolate_direct(fnet.spec, nu);
      worst = std::max({worst, std::abs(a - b), std::abs(a - d)});
      c.expect(std::abs(a - b) <= 1e-9 && std::abs(a - d) <= 1e-9,
               k.functional + " network/oracle gap " + fmt(std::abs(a - b)));
    }

    const std::string text = serialize(fnet.net);
    const ReluNetwork back = deserialize(text);
    c.expect(back == fnet.net, k.functional + " round trip changed the network");
    c.expect(serialize(back) == text, k.functional + " re-serialization differs");
    const auto path = (std::filesystem::temp_directory_path() /
                       ("funcrelu_verify_" + std::to_string(k.m) + "_" + std::to_string(k.N) +
                        ".json"))
                          .string();
    save_network(fnet.net, path);
    const ReluNetwork loaded = load_network(path);
    std::filesystem::remove(path);
    c.expect(loaded.count_nonzero() == fnet.nonzeros, "reloaded M differs from report");
    checked_M += fnet.nonzeros;
  }

  // Raw interpolation net with random values, t=3.
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const simplicial::ScaledGrid grid(3, 1.0, 4);
  InterpolationSpec spec{grid, {}};
  for (std::size_t i = 0; i < grid.node_count(); ++i) spec.node_values.push_back(u(rng));
  const ReluNetwork H = build_interpolation_net(spec);
  for (int i = 0; i < 100; ++i) {
    auto y = uniform_point(rng, 3, -1.2, 1.2);
    const double a = H.evaluate(y);
    const double gap = std::max(std::abs(a - interpolate_local(spec, y)),
                                std::abs(a - interpolate_direct(spec, y)));
    worst = std::max(worst, gap);
    c.expect(gap <= 1e-9, "interpolation net/oracle gap " + fmt(gap));
  }
  c.expect(deserialize(serialize(H)) == H, "interpolation net round trip");

  const double total = suite_seconds + since(t0);
  c.expect(total < 900.0, "verification suite took " + fmt(total) + " s");
  return finish(8, "network path = direct formula; bit-exact serialization; suite time", c,
                "max gap " + fmt(worst) + ", reloaded M total " + std::to_string(checked_M) +
                    ", suite " + fmt(total) + " s",
                t0, 900.0);
}

std::string format(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " ("
     << std::fixed << std::setprecision(2) << r.seconds << " s) -- " << r.detail;
  return os.str();
}

std::vector<CriterionResult> run_all(std::ostream& out, std::span<const int> only) {
  const std::map<int, std::function<CriterionResult()>> table{
      {1, min_network},         {2, spike_equivalence},        {3, triangulation_geometry},
      {4, interpolation_contract}, {5, weight_growth},        {6, end_to_end_decomposition},
      {7, rate_shape}};
  std::vector<CriterionResult> results;
  auto wanted = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  double spent = 0.0;
  for (const auto& [id, fn] : table) {
    if (!wanted(id)) continue;
    results.push_back(fn());
    spent += results.back().seconds;
    out << format(results.back()) << std::endl;
  }
  if (wanted(8)) {
    results.push_back(oracle_and_serialization(spent));
    out << format(results.back()) << std::endl;
  }
  return results;
}

}  // namespace funcrelu::verify
