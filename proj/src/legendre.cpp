#include "funcrelu/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace funcrelu::legendre {

void orthonormal_all(double x, std::span<double> out) {
  if (out.empty()) return;
  // Classical P_n by (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}.
  double p_prev = 1.0;
  double p = x;
  out[0] = std::sqrt(0.5);
  if (out.size() > 1) out[1] = std::sqrt(1.5) * x;
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const auto nd = static_cast<double>(n);
    double p_next = ((2.0 * nd + 1.0) * x * p - nd * p_prev) / (nd + 1.0);
    p_prev = p;
    p = p_next;
    out[n + 1] = std::sqrt(nd + 1.5) * p;
  }
}

double orthonormal(std::size_t n, double x) {
  std::vector<double> v(n + 1);
  orthonormal_all(x, v);
  return v[n];
}

namespace {

struct Rule1d {
  std::vector<double> x, w;
};

Rule1d gauss_1d(std::size_t q) {
  if (q == 0) throw std::invalid_argument("quadrature needs q >= 1");
  Rule1d r{std::vector<double>(q), std::vector<double>(q)};
  const auto qd = static_cast<double>(q);
  for (std::size_t i = 0; i < (q + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (qd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t n = 1; n < q; ++n) {
        const auto nd = static_cast<double>(n);
        double p2 = ((2.0 * nd + 1.0) * z * p1 - nd * p0) / (nd + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = qd * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = z;
    for (std::size_t n = 1; n < q; ++n) {
      const auto nd = static_cast<double>(n);
      double p2 = ((2.0 * nd + 1.0) * z * p1 - nd * p0) / (nd + 1.0);
      p0 = p1;
      p1 = p2;
    }
    if (q == 1) {
      r.x[0] = 0.0;
      r.w[0] = 2.0;
      break;
    }
    dp = qd * (z * p1 - p0) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[q - 1 - i] = z;
    r.w[i] = w;
    r.w[q - 1 - i] = w;
  }
  if (q % 2 == 1) r.x[q / 2] = 0.0;
  return r;
}

QuadratureRule tensorize(const Rule1d& r, std::size_t s) {
  if (s == 0) throw std::invalid_argument("quadrature dimension must be >= 1");
  const std::size_t q = r.x.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < s; ++j) total *= q;
  QuadratureRule rule;
  rule.s = s;
  rule.nodes.resize(total * s);
  rule.weights.resize(total);
  std::vector<std::size_t> idx(s, 0);
  for (std::size_t i = 0; i < total; ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < s; ++j) {
      rule.nodes[i * s + j] = r.x[idx[j]];
      w *= r.w[idx[j]];
    }
    rule.weights[i] = w;
    for (std::size_t j = s; j-- > 0;) {
      if (++idx[j] < q) break;
      idx[j] = 0;
    }
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre_rule(std::size_t q, std::size_t s) {
  return tensorize(gauss_1d(q), s);
}

QuadratureRule composite_gauss_rule(std::size_t q, std::size_t panels,
                                    std::size_t s) {
  if (panels == 0) throw std::invalid_argument("need at least one panel");
  Rule1d base = gauss_1d(q);
  Rule1d r;
  const double h = 2.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    double a = -1.0 + h * static_cast<double>(p);
    for (std::size_t i = 0; i < q; ++i) {
      r.x.push_back(a + 0.5 * h * (base.x[i] + 1.0));
      r.w.push_back(0.5 * h * base.w[i]);
    }
  }
  return tensorize(r, s);
}

// ---------------------------------------------------------------------------

LegendreBasis::LegendreBasis(std::size_t s, std::size_t m) : s_(s), m_(m) {
  if (s == 0) throw std::invalid_argument("basis dimension s must be >= 1");
  const std::size_t side = 2 * m + 1;
  std::size_t total = 1;
  for (std::size_t j = 0; j < s; ++j) total *= side;
  order_.reserve(total);
  MultiIndex alpha(s, 0);
  for (std::size_t i = 0; i < total; ++i) {
    order_.push_back(alpha);
    for (std::size_t j = s; j-- > 0;) {
      if (++alpha[j] < side) break;
      alpha[j] = 0;
    }
  }
  auto degree = [](const MultiIndex& a) {
    std::uint64_t d = 0;
    for (auto v : a) d += v;
    return d;
  };
  std::stable_sort(order_.begin(), order_.end(),
                   [&](const MultiIndex& a, const MultiIndex& b) {
                     auto da = degree(a), db = degree(b);
                     return da != db ? da < db : a < b;
                   });
}

const MultiIndex& LegendreBasis::multi_index(std::size_t k) const {
  if (k >= order_.size())
    throw std::out_of_range("basis index " + std::to_string(k) +
                            " outside 0.." + std::to_string(order_.size() - 1));
  return order_[k];
}

std::optional<std::size_t> LegendreBasis::index_of(
    const MultiIndex& alpha) const {
  auto it = std::find(order_.begin(), order_.end(), alpha);
  if (it == order_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - order_.begin());
}

double LegendreBasis::eval(std::size_t k, std::span<const double> x) const {
  const MultiIndex& alpha = multi_index(k);
  if (x.size() != s_)
    throw std::invalid_argument("point dimension does not match basis");
  double v = 1.0;
  for (std::size_t j = 0; j < s_; ++j) v *= orthonormal(alpha[j], x[j]);
  return v;
}

void LegendreBasis::eval_all(std::span<const double> x,
                             std::span<double> out) const {
  if (x.size() != s_ || out.size() != size())
    throw std::invalid_argument("eval_all: dimension mismatch");
  const std::size_t side = 2 * m_ + 1;
  std::vector<double> axis(s_ * side);
  for (std::size_t j = 0; j < s_; ++j)
    orthonormal_all(x[j], std::span<double>(axis.data() + j * side, side));
  for (std::size_t k = 0; k < order_.size(); ++k) {
    double v = 1.0;
    for (std::size_t j = 0; j < s_; ++j) v *= axis[j * side + order_[k][j]];
    out[k] = v;
  }
}

std::vector<double> LegendreBasis::table(const QuadratureRule& rule) const {
  if (rule.s != s_)
    throw std::invalid_argument("rule dimension does not match basis");
  const std::size_t n = rule.size();
  std::vector<double> tab(size() * n);
  std::vector<double> vals(size());
  for (std::size_t i = 0; i < n; ++i) {
    eval_all(rule.point(i), vals);
    for (std::size_t k = 0; k < size(); ++k) tab[k * n + i] = vals[k];
  }
  return tab;
}

double PolyCoeffs::operator()(std::span<const double> x) const {
  std::vector<double> vals(basis->size());
  basis->eval_all(x, vals);
  double v = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) v += coeffs[k] * vals[k];
  return v;
}

PolyCoeffs phi(std::shared_ptr<const LegendreBasis> basis, const Function& f,
               const QuadratureRule& rule) {
  PolyCoeffs c{basis, std::vector<double>(basis->size(), 0.0)};
  std::vector<double> vals(basis->size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    auto x = rule.point(i);
    double fx = f(x) * rule.weights[i];
    basis->eval_all(x, vals);
    for (std::size_t k = 0; k < vals.size(); ++k) c.coeffs[k] += fx * vals[k];
  }
  return c;
}

Function phi_inverse(const PolyCoeffs& c) {
  if (c.coeffs.size() != c.basis->size())
    throw std::invalid_argument("coefficient vector does not match basis");
  return [c](std::span<const double> x) { return c(x); };
}

double lp_norm_values(std::span<const double> values,
                      std::span<const double> weights, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp norm needs p >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    acc += weights[i] * std::pow(std::abs(values[i]), p);
  return std::pow(acc, 1.0 / p);
}

double lp_norm(const Function& f, const QuadratureRule& rule, double p) {
  std::vector<double> vals(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) vals[i] = f(rule.point(i));
  return lp_norm_values(vals, rule.weights, p);
}

double degree_power(std::size_t m, double exponent) {
  if (m == 0) return 1.0;
  return std::pow(static_cast<double>(m), exponent);
}

NormComparison measure_norm_comparison(const LegendreBasis& basis, double p,
                                       double q, std::size_t samples,
                                       std::uint64_t seed,
                                       const QuadratureRule& rule) {
  NormComparison out;
  out.exponent = 2.0 * static_cast<double>(basis.s()) *
                 std::max(1.0 / q - 1.0 / p, 0.0);
  const auto tab = basis.table(rule);
  const std::size_t n = rule.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> vals(n);
  for (std::size_t trial = 0; trial < samples; ++trial) {
    std::fill(vals.begin(), vals.end(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      double c = gauss(rng);
      for (std::size_t i = 0; i < n; ++i) vals[i] += c * tab[k * n + i];
    }
    double np = lp_norm_values(vals, rule.weights, p);
    double nq = lp_norm_values(vals, rule.weights, q);
    if (nq > 0.0) out.max_ratio = std::max(out.max_ratio, np / nq);
  }
  out.fitted_constant = out.max_ratio / degree_power(basis.m(), out.exponent);
  return out;
}

}  // namespace funcrelu::legendre
