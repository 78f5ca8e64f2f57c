#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "funcrelu/constructors.hpp"

using namespace funcrelu;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t t, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<double> y(t);
  for (auto& v : y) v = u(rng);
  return y;
}

}  // namespace

TEST_CASE("min network: small cases") {
  auto m2 = build_min_net(2);
  CHECK(m2.depth() == 1);
  CHECK(m2.count_nonzero() == 7);
  CHECK(m2.evaluate(std::vector{3.0, 1.0}) == 1.0);
  CHECK(m2.evaluate(std::vector{-3.0, 1.0}) == -3.0);
  auto m3 = build_min_net(3);
  CHECK(m3.depth() == 2);
  CHECK(m3.count_nonzero() == 16);
  CHECK_THROWS(build_min_net(1));
  for (const auto& layer : m3.layers())
    for (double b : layer.shifts) CHECK(b == 0.0);
}

TEST_CASE("min network: exactness and accounting for d = 2..12") {
  std::mt19937_64 rng(21);
  for (std::size_t d = 2; d <= 12; ++d) {
    auto net = build_min_net(d);
    CHECK(net.depth() == d - 1);
    CHECK(net.count_nonzero() == min_net_nonzeros(d));
    CHECK(net.count_nonzero() == d * d + 4 * d - 5);
    if (d > 8) continue;
    for (int i = 0; i < 10000; ++i) {
      auto x = random_point(rng, d, 10.0);
      CHECK(std::abs(net.evaluate(x) - *std::min_element(x.begin(), x.end())) <= 1e-12);
    }
  }
}

TEST_CASE("relu(min a) = relu(min relu(a)) on mixed-sign inputs") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> sign(0, 2);
  for (int i = 0; i < 20000; ++i) {
    auto a = random_point(rng, 6, 3.0);
    // Force all-positive, all-negative and mixed patterns, with exact zeros.
    const int mode = sign(rng);
    for (auto& v : a) {
      if (mode == 0) v = std::abs(v);
      if (mode == 1) v = -std::abs(v);
    }
    if (i % 7 == 0) a[i % 6] = 0.0;
    std::vector<double> ra(a);
    for (auto& v : ra) v = relu(v);
    CHECK(relu(*std::min_element(a.begin(), a.end())) ==
          relu(*std::min_element(ra.begin(), ra.end())));
  }
}

TEST_CASE("spike network") {
  auto s1 = build_spike_net(1);
  CHECK(s1.evaluate(std::vector{0.0}) == 1.0);
  CHECK(s1.evaluate(std::vector{1.0}) == 0.0);
  CHECK(s1.evaluate(std::vector{-1.0}) == 0.0);
  CHECK(s1.evaluate(std::vector{0.25}) == 0.75);

  std::mt19937_64 rng(23);
  for (std::size_t t = 1; t <= 4; ++t) {
    auto net = build_spike_net(t);
    CHECK(net.depth() == spike_depth(t));
    CHECK(net.depth() == t * t + t + 1);
    // First layer at the origin: every shift is 1.
    CHECK(net.nonzero_breakdown().per_layer.front() == spike_first_layer_nominal(t));
    for (int i = 0; i < 10000 / static_cast<int>(t); ++i) {
      auto y = random_point(rng, t, 2.0);
      CHECK(std::abs(net.evaluate(y) - simplicial::spike(y)) <= 1e-12);
    }
  }
  CHECK(build_spike_net(2).depth() == 7);
  CHECK(build_spike_net(3).depth() == 13);
  CHECK_THROWS(build_spike_net(0));
}

TEST_CASE("scaled spike: shifted and rescaled copy") {
  std::vector<double> off{1.0, -2.0};
  auto net = build_scaled_spike_net(2, 4.0, off);
  std::mt19937_64 rng(24);
  for (int i = 0; i < 2000; ++i) {
    auto y = random_point(rng, 2, 1.0);
    std::vector<double> u{4.0 * y[0] - 1.0, 4.0 * y[1] + 2.0};
    CHECK(std::abs(net.evaluate(y) - simplicial::spike(u)) <= 1e-12);
  }
  CHECK_THROWS_AS(build_scaled_spike_net(2, 1.0, std::vector{0.0}), DimensionError);
}

TEST_CASE("interpolation net: zero values give the zero function") {
  simplicial::ScaledGrid grid(2, 1.0, 4);
  InterpolationSpec spec{grid, std::vector<double>(grid.node_count(), 0.0)};
  auto net = build_interpolation_net(spec);
  std::mt19937_64 rng(25);
  for (int i = 0; i < 200; ++i) CHECK(net.evaluate(random_point(rng, 2, 1.0)) == 0.0);
  CHECK(net.output().nonzeros() == 0);
}

TEST_CASE("interpolation net: depth, node values, partition of unity") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t t = 1; t <= 4; ++t) {
    simplicial::ScaledGrid grid(t, 1.5, t <= 2 ? 6 : 2);
    InterpolationSpec spec{grid, {}};
    for (std::size_t i = 0; i < grid.node_count(); ++i) spec.node_values.push_back(u(rng));
    auto net = build_interpolation_net(spec);
    CHECK(net.depth() == t * t + t + 1);
    CHECK(net.count_nonzero() == predict_interpolation_nonzeros(spec));
    for (std::size_t i = 0; i < grid.node_count(); ++i)
      CHECK(std::abs(net.evaluate(grid.node(i)) - spec.node_values[i]) <= 1e-10);

    InterpolationSpec ones{grid, std::vector<double>(grid.node_count(), 1.0)};
    auto one = build_interpolation_net(ones);
    for (int i = 0; i < 1000; ++i)
      CHECK(std::abs(one.evaluate(random_point(rng, t, 1.5)) - 1.0) <= 1e-10);
  }
}

TEST_CASE("interpolation net reproduces affine functions") {
  simplicial::ScaledGrid grid(2, 1.0, 4);
  auto spec = InterpolationSpec::sample(
      grid, [](std::span<const double> y) { return y[0] + 2.0 * y[1]; });
  auto net = build_interpolation_net(spec);
  std::mt19937_64 rng(27);
  for (int i = 0; i < 1000; ++i) {
    auto y = random_point(rng, 2, 1.0);
    CHECK(std::abs(net.evaluate(y) - (y[0] + 2.0 * y[1])) <= 1e-10);
  }
}

TEST_CASE("interpolation net is linear on every located cell") {
  simplicial::ScaledGrid grid(3, 1.0, 3);
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(-1, 1), lam(0, 1);
  InterpolationSpec spec{grid, {}};
  for (std::size_t i = 0; i < grid.node_count(); ++i) spec.node_values.push_back(u(rng));
  auto net = build_interpolation_net(spec);
  for (int trial = 0; trial < 500; ++trial) {
    auto y = random_point(rng, 3, 1.0);
    const auto cell = simplicial::locate(y, grid);
    // Barycentric combination of the cell's vertices in cube coordinates.
    auto verts = simplicial::vertices(cell);
    std::vector<double> w(verts.size());
    double tot = 0.0;
    for (auto& v : w) tot += (v = lam(rng));
    std::vector<double> p(3, 0.0);
    double expected = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      std::vector<std::size_t> idx(3);
      for (std::size_t k = 0; k < 3; ++k) {
        p[k] += w[i] / tot * (-1.0 + grid.spacing() * verts[i][k]);
        idx[k] = static_cast<std::size_t>(verts[i][k]);
      }
      expected += w[i] / tot * spec.node_values[grid.flat_index(idx)];
    }
    CHECK(std::abs(net.evaluate(p) - expected) <= 1e-10);
  }
}

TEST_CASE("network, direct sum and local formula agree") {
  simplicial::ScaledGrid grid(3, 2.0, 4);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  InterpolationSpec spec{grid, {}};
  for (std::size_t i = 0; i < grid.node_count(); ++i) spec.node_values.push_back(u(rng));
  auto net = build_interpolation_net(spec);
  for (int i = 0; i < 300; ++i) {
    auto y = random_point(rng, 3, 2.5);  // also outside the cube
    const double a = net.evaluate(y);
    CHECK(std::abs(a - interpolate_direct(spec, y)) <= 1e-10);
    CHECK(std::abs(a - interpolate_local(spec, y)) <= 1e-10);
  }
}

TEST_CASE("error bound and measured error for |y|") {
  std::function<double(double)> lip = [](double r) { return r; };
  CHECK(interpolation_error_bound(2, 10, 1.0, lip) == doctest::Approx(0.8));
  CHECK(interpolation_error_bound(2, 20, 1.0, lip) ==
        doctest::Approx(0.5 * interpolation_error_bound(2, 10, 1.0, lip)));
  auto norm = [](std::span<const double> y) { return std::hypot(y[0], y[1]); };
  for (std::size_t N : {4, 8, 16}) {
    simplicial::ScaledGrid grid(2, 1.0, N);
    auto spec = InterpolationSpec::sample(grid, norm);
    double sup = 0.0;
    std::vector<double> y(2);
    for (int a = 0; a <= 100; ++a)
      for (int b = 0; b <= 100; ++b) {
        y[0] = -1.0 + a / 50.0;
        y[1] = -1.0 + b / 50.0;
        sup = std::max(sup, std::abs(interpolate_local(spec, y) - norm(y)));
      }
    CHECK(sup <= interpolation_error_bound(2, N, 1.0, lip));
  }
}

TEST_CASE("weight accounting and the zero-shift effect") {
  // t = 1, N odd: offsets are half-integers and no shift vanishes.
  simplicial::ScaledGrid odd1(1, 1.0, 5);
  InterpolationSpec a{odd1, std::vector<double>(odd1.node_count(), 1.0)};
  const std::size_t block1 = 2 + min_net_nonzeros(2) + 2 + 1;
  CHECK(predict_interpolation_nonzeros(a) == block1 * odd1.node_count());
  CHECK(build_interpolation_net(a).count_nonzero() == predict_interpolation_nonzeros(a));

  // t = 2, N odd: the pair forms lose their shift exactly at the six nodes
  // whose lattice offsets differ by one.
  simplicial::ScaledGrid odd(2, 1.0, 3);
  InterpolationSpec b{odd, std::vector<double>(odd.node_count(), 1.0)};
  const std::size_t block = 2 * 4 + min_net_nonzeros(6) + 6 + 1;
  CHECK(predict_interpolation_nonzeros(b) == block * odd.node_count() - 6);

  // N even: the 1 -/+ offset terms also vanish on the middle row and column.
  simplicial::ScaledGrid even(2, 1.0, 4);
  InterpolationSpec c{even, std::vector<double>(even.node_count(), 1.0)};
  CHECK(predict_interpolation_nonzeros(c) < block * even.node_count());
  CHECK(build_interpolation_net(c).count_nonzero() == predict_interpolation_nonzeros(c));
  CHECK(weight_constant(81, 1, 2) == doctest::Approx(27.0));
}

TEST_CASE("interpolation input validation and node cap") {
  simplicial::ScaledGrid grid(2, 1.0, 2);
  InterpolationSpec bad{grid, std::vector<double>(8, 1.0)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  InterpolationSpec nan{grid, std::vector<double>(9, 1.0)};
  nan.node_values[4] = std::nan("");
  CHECK_THROWS_AS(build_interpolation_net(nan), std::invalid_argument);
  simplicial::ScaledGrid big(3, 1.0, 100);
  try {
    InterpolationSpec::sample(big, [](std::span<const double>) { return 0.0; });
    FAIL("expected the node cap to trigger");
  } catch (const NodeCapExceeded& e) {
    CHECK(e.nodes() == 101 * 101 * 101);
  }
}
