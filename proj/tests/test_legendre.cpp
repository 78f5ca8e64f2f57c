#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "funcrelu/legendre.hpp"

using namespace funcrelu::legendre;

TEST_CASE("univariate values") {
  for (double x : {-1.0, -0.3, 0.0, 0.8, 1.0}) {
    CHECK(orthonormal(0, x) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(orthonormal(1, x) == doctest::Approx(std::sqrt(1.5) * x).epsilon(1e-15));
    // P_2 = (3x^2 - 1)/2, P_3 = (5x^3 - 3x)/2
    CHECK(orthonormal(2, x) ==
          doctest::Approx(std::sqrt(2.5) * 0.5 * (3 * x * x - 1)).epsilon(1e-14));
    CHECK(orthonormal(3, x) ==
          doctest::Approx(std::sqrt(3.5) * 0.5 * (5 * x * x * x - 3 * x)).epsilon(1e-14));
  }
  CHECK(orthonormal(1, 1.0) == doctest::Approx(std::sqrt(1.5)));
  // P_n(1) = 1
  for (std::size_t n = 0; n < 40; ++n)
    CHECK(orthonormal(n, 1.0) == doctest::Approx(std::sqrt(n + 0.5)).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre rules") {
  auto r1 = gauss_legendre_rule(1);
  CHECK(r1.size() == 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == 2.0);

  auto r2 = gauss_legendre_rule(2);
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  for (std::size_t q : {3, 4, 7, 16, 33, 64}) {
    auto r = gauss_legendre_rule(q);
    const double sum = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    // Exact for x^k, k <= 2q - 1.
    for (std::size_t k = 0; k <= 2 * q - 1; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < q; ++i) acc += r.weights[i] * std::pow(r.nodes[i], double(k));
      const double exact = k % 2 ? 0.0 : 2.0 / double(k + 1);
      CHECK(std::abs(acc - exact) <= 1e-13);
    }
    for (std::size_t i = 0; i + 1 < q; ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
  }
  CHECK_THROWS(gauss_legendre_rule(0));
}

TEST_CASE("composite and tensor rules") {
  auto r = composite_gauss_rule(5, 2);
  CHECK(r.size() == 10);
  // |x| is piecewise linear with the kink on a panel boundary.
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * std::abs(r.nodes[i]);
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-14));

  auto r2 = gauss_legendre_rule(4, 2);
  CHECK(r2.size() == 16);
  CHECK(r2.s == 2);
  double vol = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i) {
    vol += r2.weights[i];
    auto p = r2.point(i);
    moment += r2.weights[i] * p[0] * p[0] * p[1] * p[1];
  }
  CHECK(vol == doctest::Approx(4.0));
  CHECK(moment == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("L_3 has unit norm with four nodes") {
  auto r = gauss_legendre_rule(4);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(orthonormal(3, r.nodes[i]), 2);
  CHECK(std::abs(acc - 1.0) <= 1e-12);
}

TEST_CASE("basis ordering") {
  LegendreBasis b(2, 1);
  CHECK(b.size() == 9);
  CHECK(b.max_degree() == 2);
  CHECK(b.multi_index(0) == MultiIndex{0, 0});
  CHECK(b.multi_index(1) == MultiIndex{0, 1});
  CHECK(b.multi_index(2) == MultiIndex{1, 0});
  CHECK(b.multi_index(3) == MultiIndex{0, 2});
  CHECK(b.multi_index(4) == MultiIndex{1, 1});
  CHECK(b.multi_index(5) == MultiIndex{2, 0});
  CHECK(b.multi_index(8) == MultiIndex{2, 2});
  CHECK_THROWS_AS(b.multi_index(9), std::out_of_range);
  CHECK(b.index_of(MultiIndex{1, 1}) == 4u);
  CHECK_FALSE(b.index_of(MultiIndex{3, 0}).has_value());
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    auto a = b.multi_index(k), c = b.multi_index(k + 1);
    CHECK(a[0] + a[1] <= c[0] + c[1]);
  }
  CHECK(LegendreBasis(3, 2).size() == 125);
  CHECK(LegendreBasis(1, 0).size() == 1);
  CHECK_THROWS(LegendreBasis(0, 1));
}

TEST_CASE("tensor values") {
  LegendreBasis b(2, 1);
  std::vector<double> x{0.3, -0.7};
  CHECK(b.eval(0, x) == doctest::Approx(0.5));
  std::vector<double> all(b.size());
  b.eval_all(x, all);
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto& a = b.multi_index(k);
    CHECK(all[k] == doctest::Approx(orthonormal(a[0], x[0]) * orthonormal(a[1], x[1])));
    CHECK(b.eval(k, x) == doctest::Approx(all[k]));
  }
  CHECK_THROWS(b.eval(0, std::vector{0.1}));
}

TEST_CASE("orthonormality of tensor bases") {
  for (std::size_t s : {1, 2, 3}) {
    for (std::size_t m : {0, 1, 2}) {
      if (s == 3 && m == 2) continue;
      LegendreBasis b(s, m);
      auto rule = gauss_legendre_rule(2 * m + 1, s);
      auto tab = b.table(rule);
      const std::size_t n = rule.size();
      for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
          double acc = 0.0;
          for (std::size_t l = 0; l < n; ++l)
            acc += rule.weights[l] * tab[i * n + l] * tab[j * n + l];
          CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    }
  }
}

TEST_CASE("phi and its inverse are an isometry on Pi_2m") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  auto basis = std::make_shared<const LegendreBasis>(2, 2);
  auto rule = gauss_legendre_rule(8, 2);
  for (int trial = 0; trial < 20; ++trial) {
    PolyCoeffs c{basis, std::vector<double>(basis->size())};
    for (auto& v : c.coeffs) v = g(rng);
    auto f = phi_inverse(c);
    auto back = phi(basis, f, rule);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
      CHECK(std::abs(back.coeffs[k] - c.coeffs[k]) <= 1e-10);
      norm2 += c.coeffs[k] * c.coeffs[k];
    }
    CHECK(lp_norm(f, rule, 2.0) == doctest::Approx(std::sqrt(norm2)).epsilon(1e-12));
  }
  CHECK_THROWS(phi_inverse(PolyCoeffs{basis, {1.0}}));
}

TEST_CASE("p-norm helpers") {
  auto rule = gauss_legendre_rule(20);
  Function one = [](std::span<const double>) { return 1.0; };
  CHECK(lp_norm(one, rule, 1.0) == doctest::Approx(2.0));
  CHECK(lp_norm(one, rule, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS(lp_norm(one, rule, 0.5));
  CHECK(degree_power(0, 3.0) == 1.0);
  CHECK(degree_power(4, 0.5) == 2.0);
}

TEST_CASE("norm comparison between L^p norms on Pi_2m") {
  auto rule = gauss_legendre_rule(64);
  // p = q gives ratio 1.
  auto same = measure_norm_comparison(LegendreBasis(1, 3), 2.0, 2.0, 50, 7, rule);
  CHECK(same.max_ratio == doctest::Approx(1.0));
  CHECK(same.exponent == 0.0);
  // ||Q||_4 <= C m^{1/2} ||Q||_2 in one variable: the fitted constant stays
  // bounded as m grows.
  double lo = 1e300, hi = 0.0;
  for (std::size_t m : {1, 2, 4, 8}) {
    auto r = measure_norm_comparison(LegendreBasis(1, m), 4.0, 2.0, 200, 11, rule);
    CHECK(r.exponent == doctest::Approx(0.5));
    CHECK(r.max_ratio >= 1.0 / std::pow(2.0, 0.25));
    lo = std::min(lo, r.fitted_constant);
    hi = std::max(hi, r.fitted_constant);
  }
  CHECK(hi / lo < 3.0);
}
