#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "funcrelu/pipeline.hpp"

using namespace funcrelu;

namespace {

ExperimentConfig small_config(const std::string& functional) {
  ExperimentConfig c;
  c.s = 1;
  c.functional = functional;
  c.input.s = 1;
  c.input.sample_count = 16;
  c.m_values = {0, 1};
  c.N_values = {2, 4, 8};
  c.rate_m_max = 3;
  return c;
}

}  // namespace

TEST_CASE("input sampling is deterministic and stays in the unit L2 ball") {
  for (InputKind kind : {InputKind::kHoelderBall, InputKind::kSobolevLike,
                         InputKind::kPolynomialBall}) {
    InputClass cls;
    cls.kind = kind;
    cls.s = 2;
    cls.sample_count = 8;
    cls.seed = 5;
    auto a = generate_inputs(cls);
    auto b = generate_inputs(cls);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].coeffs == b[i].coeffs);
      double n2 = 0.0;
      for (double c : a[i].coeffs) n2 += c * c;
      CHECK(n2 <= 1.0 + 1e-12);
    }
    cls.seed = 6;
    CHECK(generate_inputs(cls)[0].coeffs != a[0].coeffs);
  }
  CHECK(parse_input_kind("sobolev_like") == InputKind::kSobolevLike);
  CHECK(to_string(InputKind::kHoelderBall) == "hoelder_ball");
  CHECK_THROWS(parse_input_kind("besov"));
}

TEST_CASE("polynomial ball lies in Pi_degree") {
  InputClass cls;
  cls.kind = InputKind::kPolynomialBall;
  cls.s = 1;
  cls.degree = 2;
  cls.sample_count = 10;
  for (const auto& in : generate_inputs(cls)) {
    CHECK(in.tail_norm(2) == 0.0);
    CHECK(projection_error(in.function, 1, 2, 2.0) <= 1e-10);
    CHECK(in.tail_norm(1) > 0.0);
  }
}

TEST_CASE("hoelder ball: empirical decay of the best-approximation error") {
  InputClass cls;
  cls.kind = InputKind::kHoelderBall;
  cls.s = 1;
  cls.beta = 2.0;
  cls.sample_count = 64;
  auto inputs = generate_inputs(cls);
  std::vector<double> ms, errs;
  for (std::size_t m = 1; m <= 6; ++m) {
    double sup = 0.0;
    for (const auto& in : inputs) {
      const double tail = in.tail_norm(m);
      sup = std::max(sup, tail);
      // The quadrature value agrees with the coefficient tail.
      if (&in == &inputs.front())
        CHECK(projection_error(in.function, 1, m, 2.0) ==
              doctest::Approx(tail).epsilon(1e-8));
    }
    ms.push_back(static_cast<double>(m));
    errs.push_back(sup);
  }
  const double beta_hat = -fit_loglog_slope(ms, errs);
  MESSAGE("fitted beta = " << beta_hat);
  CHECK(std::abs(beta_hat - 2.0) <= 0.3 * 2.0);
}

TEST_CASE("functionals") {
  auto rule = legendre::composite_gauss_rule(16, 2, 1);
  InputFunction one{[](std::span<const double>) { return 1.0; }, "one"};
  InputFunction x{[](std::span<const double> y) { return y[0]; }, "x"};
  CHECK(TargetFunctional::linear(1)(one, rule) == doctest::Approx(1.0));
  CHECK(TargetFunctional::linear(1)(x, rule) == doctest::Approx(0.5));
  CHECK(TargetFunctional::sine(1)(x, rule) == doctest::Approx(std::sin(0.5)));
  CHECK(TargetFunctional::constant(3.0)(x, rule) == 3.0);
  CHECK(TargetFunctional::constant(3.0).omega(5.0) == 0.0);
  CHECK(TargetFunctional::squared_norm(1.0)(x, rule) == doctest::Approx(2.0 / 3.0));
  CHECK(TargetFunctional::squared_norm(1.0).omega(0.5) == doctest::Approx(1.25));
  auto basis = std::make_shared<const legendre::LegendreBasis>(1, 1);
  CHECK(TargetFunctional::coefficient(basis, 1)(x, rule) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(TargetFunctional::by_name("sine", 2).name.find("sin") != std::string::npos);
  CHECK_THROWS(TargetFunctional::by_name("entropy", 1));
}

TEST_CASE("coefficient functional with m = 0 is reproduced exactly") {
  auto op = std::make_shared<const DiscretizationOperator>(1, 0, FilterKind::kDlvp, 0, 2);
  auto F = TargetFunctional::coefficient(op->basis_ptr(), 0);
  auto fnet = build_functional_net(F, op, simplicial::ScaledGrid(op->t(), 1.0, 4));
  InputClass cls;
  cls.sample_count = 20;
  for (const auto& in : generate_inputs(cls)) {
    const double exact = F(in.function, op->rule());
    CHECK(std::abs(fnet.evaluate(in.function) - exact) <= 1e-10);
  }
}

TEST_CASE("functional net: depth, oracle agreement, node values") {
  auto op = std::make_shared<const DiscretizationOperator>(1, 1, FilterKind::kDlvp, 0, 2);
  auto F = TargetFunctional::squared_norm(1.0);
  simplicial::ScaledGrid grid(op->t(), 1.0, 6);
  auto fnet = build_functional_net(F, op, grid);
  const std::size_t t = op->t();
  CHECK(fnet.depth == t * t + t + 1);
  CHECK(fnet.nonzeros == fnet.net.count_nonzero());
  CHECK(fnet.nonzeros == predict_interpolation_nonzeros(fnet.spec));
  CHECK(fnet.R == 1.0);

  for (std::size_t i = 0; i < grid.node_count(); i += 7) {
    auto xi = grid.node(i);
    CHECK(std::abs(fnet.evaluate_discretized(xi) -
                   functional_on_coefficients(F, *op, xi)) <= 1e-10);
  }

  InputClass cls;
  cls.sample_count = 100;
  cls.seed = 9;
  for (const auto& in : generate_inputs(cls))
    CHECK(std::abs(fnet.evaluate(in.function) - fnet.evaluate_oracle(in.function)) <= 1e-10);
}

TEST_CASE("caps are checked before allocation") {
  auto op = std::make_shared<const DiscretizationOperator>(1, 1);
  auto F = TargetFunctional::linear(1);
  CHECK_THROWS_AS(build_functional_net(F, op, simplicial::ScaledGrid(3, 1.0, 4),
                                       kDefaultNodeCap, 10),
                  WeightCapExceeded);
  CHECK_THROWS_AS(build_functional_net(F, op, simplicial::ScaledGrid(3, 1.0, 100), 1000),
                  NodeCapExceeded);
  CHECK_THROWS_AS(build_functional_net(F, op, simplicial::ScaledGrid(2, 1.0, 4)),
                  DimensionError);
}

TEST_CASE("constant functional: the network is exact") {
  auto report = run_rate_experiment(small_config("constant"));
  for (const auto& row : report.rows) {
    CHECK_FALSE(row.skipped);
    CHECK(row.sup_error <= 1e-9);
  }
  CHECK(report.bound_holds);
}

TEST_CASE("sweep: decomposition, bound, monotonicity and dumps") {
  auto cfg = small_config("squared_norm");
  const auto dir = std::filesystem::temp_directory_path() / "funcrelu_test_dump";
  std::filesystem::remove_all(dir);
  cfg.dump_dir = dir.string();
  auto report = run_rate_experiment(cfg);
  REQUIRE(report.rows.size() == 6);
  CHECK(report.decomposition_holds);
  CHECK(report.bound_holds);
  CHECK(std::isfinite(report.c_hat));
  // sup_error need not shrink with N at m = 0, where the grid error partly
  // cancels the discretization error; the grid error itself does.
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].m == report.rows[i - 1].m)
      CHECK(report.rows[i].grid_error < report.rows[i - 1].grid_error);
  for (const auto& row : report.rows) {
    CHECK(row.J == row.t * row.t + row.t + 1);
    CHECK(row.oracle_gap <= 1e-9);
    CHECK(row.sup_error <= row.bound_discretization + row.bound_grid + 1e-12);
    auto net = load_network((dir / ("net_m" + std::to_string(row.m) + "_N" +
                                    std::to_string(row.N) + ".json"))
                                .string());
    CHECK(net.count_nonzero() == row.M);
  }
  CHECK(report.rate_points.size() == 3);
  CHECK(report.c9 == 20.0);
  CHECK(report.expected_exponent == -2.0);

  const auto csv = report.csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  const auto summary = report.summary_json();
  CHECK(summary.find("\"bound_holds\": true") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing") {
  auto c = ExperimentConfig::from_json_text(R"({
    "s": 2, "p": 4, "functional": "sine", "filter": "truncate",
    "input_class": {"kind": "sobolev_like", "beta": 1.5, "sample_count": 5},
    "sweep": {"m": [0, 1], "N": [2, 4]}, "seed": 3, "rate_m_max": 4
  })");
  CHECK(c.s == 2);
  CHECK(c.input.s == 2);
  CHECK(c.p == 4.0);
  CHECK(c.functional == "sine");
  CHECK(c.filter == FilterKind::kTruncate);
  CHECK(c.input.kind == InputKind::kSobolevLike);
  CHECK(c.input.beta == 1.5);
  CHECK(c.input.sample_count == 5);
  CHECK(c.input.seed == 3);
  CHECK(c.m_values == std::vector<std::size_t>{0, 1});
  CHECK(c.N_values == std::vector<std::size_t>{2, 4});
  CHECK(c.rate_m_max == 4);

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"s\": 1, \"colour\": 2}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"s\": 0}"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"p\": 0.5}"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"functional\": \"x\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"s\": \"two\"}"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"sweep\": {\"N\": [0]}}"),
                  std::invalid_argument);
  CHECK_THROWS(ExperimentConfig::load("/nonexistent/config.json"));
}

TEST_CASE("rate helpers") {
  CHECK(c9_constant(1, 1.0, 2.0, 2.0) == 20.0);
  CHECK(c9_constant(2, 1.0, 2.0, 2.0) == doctest::Approx(16.0 + 8.0 * 4.0));
  CHECK(balanced_degree(1.0, 20.0, 1) == 0);
  const double at3 = 20.0 * 3.0 * std::log(9.0);
  CHECK(balanced_degree(at3, 20.0, 1) == 3);
  CHECK(balanced_degree(at3 * 0.999, 20.0, 1) == 2);

  std::vector<double> x{1, 2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.7));
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(-1.7));
  CHECK_THROWS(fit_loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}));
}
