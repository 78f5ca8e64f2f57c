#include "funcrelu/simplicial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace funcrelu::simplicial {

ScaledGrid::ScaledGrid(std::size_t t, double R, std::size_t N)
    : t_(t), R_(R), N_(N) {
  if (t == 0) throw std::invalid_argument("grid dimension t must be >= 1");
  if (!(R > 0.0) || !std::isfinite(R))
    throw std::invalid_argument("grid radius R must be positive and finite");
  if (N == 0) throw std::invalid_argument("grid resolution N must be >= 1");
}

std::size_t ScaledGrid::node_count() const noexcept {
  std::size_t count = 1;
  for (std::size_t k = 0; k < t_; ++k) {
    if (count > std::numeric_limits<std::size_t>::max() / (N_ + 1))
      return std::numeric_limits<std::size_t>::max();
    count *= N_ + 1;
  }
  return count;
}

std::vector<std::size_t> ScaledGrid::node_index(std::size_t flat) const {
  std::vector<std::size_t> idx(t_);
  for (std::size_t k = t_; k-- > 0;) {
    idx[k] = flat % (N_ + 1);
    flat /= N_ + 1;
  }
  return idx;
}

std::size_t ScaledGrid::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != t_)
    throw std::invalid_argument("node index has wrong dimension");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < t_; ++k) {
    if (index[k] > N_) throw std::out_of_range("node index outside grid");
    flat = flat * (N_ + 1) + index[k];
  }
  return flat;
}

std::vector<double> ScaledGrid::node(std::size_t flat) const {
  std::vector<double> y(t_);
  auto idx = node_index(flat);
  for (std::size_t k = 0; k < t_; ++k)
    y[k] = -R_ + spacing() * static_cast<double>(idx[k]);
  return y;
}

std::vector<double> ScaledGrid::to_lattice(std::span<const double> y) const {
  if (y.size() != t_)
    throw std::invalid_argument("point has dimension " +
                                std::to_string(y.size()) + ", grid has " +
                                std::to_string(t_));
  std::vector<double> z(t_);
  for (std::size_t k = 0; k < t_; ++k) z[k] = (y[k] + R_) * scale();
  return z;
}

SimplexId locate(std::span<const double> z) {
  const std::size_t t = z.size();
  SimplexId cell;
  cell.n.resize(t);
  std::vector<double> offset(t);
  for (std::size_t k = 0; k < t; ++k) {
    double f = std::floor(z[k]);
    cell.n[k] = static_cast<std::int64_t>(f);
    if (z[k] == f) cell.n[k] -= 1;
    offset[k] = z[k] - static_cast<double>(cell.n[k]);
  }
  cell.rho.resize(t);
  std::iota(cell.rho.begin(), cell.rho.end(), std::size_t{0});
  std::stable_sort(cell.rho.begin(), cell.rho.end(),
                   [&](std::size_t a, std::size_t b) {
                     return offset[a] < offset[b];
                   });
  return cell;
}

SimplexId locate(std::span<const double> y, const ScaledGrid& grid) {
  return locate(grid.to_lattice(y));
}

bool contains(const SimplexId& cell, std::span<const double> z) {
  const std::size_t t = cell.n.size();
  if (z.size() != t || cell.rho.size() != t) return false;
  double prev = 0.0;
  for (std::size_t j = 0; j < t; ++j) {
    std::size_t k = cell.rho[j];
    double off = z[k] - static_cast<double>(cell.n[k]);
    if (!(prev <= off)) return false;
    prev = off;
  }
  return prev <= 1.0;
}

std::vector<std::vector<double>> vertices(const SimplexId& cell) {
  const std::size_t t = cell.n.size();
  std::vector<std::vector<double>> out(t + 1, std::vector<double>(t));
  for (std::size_t i = 0; i <= t; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      std::size_t k = cell.rho[j];
      out[i][k] = static_cast<double>(cell.n[k]) + (j >= t - i ? 1.0 : 0.0);
    }
  return out;
}

double spike(std::span<const double> y) {
  const std::size_t t = y.size();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t; ++k) {
    m = std::min(m, 1.0 + y[k]);
    m = std::min(m, 1.0 - y[k]);
  }
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t j = 0; j < t; ++j)
      if (k != j) m = std::min(m, 1.0 + y[k] - y[j]);
  return m > 0.0 ? m : 0.0;
}

namespace {

std::vector<SimplexId> enumerate_fan(std::size_t t) {
  std::vector<SimplexId> fan;
  const std::vector<double> origin(t, 0.0);
  std::vector<std::size_t> perm(t);
  for (std::size_t mask = 0; mask < (std::size_t{1} << t); ++mask) {
    std::vector<std::int64_t> n(t);
    for (std::size_t k = 0; k < t; ++k) n[k] = (mask >> k) & 1 ? -1 : 0;
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      SimplexId cell{n, perm};
      if (contains(cell, origin)) fan.push_back(std::move(cell));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return fan;
}

}  // namespace

const std::vector<SimplexId>& origin_fan(std::size_t t) {
  if (t == 0 || t > 8)
    throw std::invalid_argument("origin_fan supports 1 <= t <= 8");
  static std::mutex mu;
  static std::map<std::size_t, std::vector<SimplexId>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(t);
  if (it == cache.end()) it = cache.emplace(t, enumerate_fan(t)).first;
  return it->second;
}

bool in_S0(std::span<const double> y) {
  for (const SimplexId& cell : origin_fan(y.size()))
    if (contains(cell, y)) return true;
  return false;
}

bool in_Sprime(std::span<const double> y) {
  const std::size_t t = y.size();
  for (std::size_t k = 0; k < t; ++k) {
    if (!(1.0 + y[k] >= 0.0) || !(1.0 - y[k] >= 0.0)) return false;
    for (std::size_t l = 0; l < t; ++l)
      if (l != k && !(y[k] <= 1.0 + y[l])) return false;
  }
  return true;
}

double AffineForm::operator()(std::span<const double> y) const {
  double v = constant;
  for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * y[k];
  return v;
}

AffineForm::Shape AffineForm::shape(double tol) const {
  if (std::abs(constant - 1.0) > tol) return Shape::kOther;
  int plus = 0, minus = 0;
  for (double c : coeffs) {
    if (std::abs(c) <= tol) continue;
    if (std::abs(c - 1.0) <= tol)
      ++plus;
    else if (std::abs(c + 1.0) <= tol)
      ++minus;
    else
      return Shape::kOther;
  }
  if (plus == 1 && minus == 0) return Shape::kOnePlus;
  if (plus == 0 && minus == 1) return Shape::kOneMinus;
  if (plus == 1 && minus == 1) return Shape::kDifference;
  return Shape::kOther;
}

AffineForm vertex_interpolant(const SimplexId& cell) {
  const std::size_t t = cell.n.size();
  auto verts = vertices(cell);
  auto origin = std::find(verts.begin(), verts.end(),
                          std::vector<double>(t, 0.0));
  if (origin == verts.end())
    throw std::invalid_argument("the origin is not a vertex of this cell");
  const auto hit = static_cast<std::size_t>(origin - verts.begin());

  const auto dim = static_cast<Eigen::Index>(t + 1);
  Eigen::MatrixXd A(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i <= t; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    A(r, 0) = 1.0;
    for (std::size_t k = 0; k < t; ++k)
      A(r, static_cast<Eigen::Index>(k + 1)) = verts[i][k];
  }
  rhs(static_cast<Eigen::Index>(hit)) = 1.0;
  Eigen::VectorXd sol = A.partialPivLu().solve(rhs);

  AffineForm h;
  h.constant = sol(0);
  h.coeffs.resize(t);
  for (std::size_t k = 0; k < t; ++k)
    h.coeffs[k] = sol(static_cast<Eigen::Index>(k + 1));
  return h;
}

}  // namespace funcrelu::simplicial
