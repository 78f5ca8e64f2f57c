#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace funcrelu::simplicial {

/// Cell of the Kuhn-type triangulation of R^t:
///   { z : 0 <= z[rho[0]] - n[rho[0]] <= ... <= z[rho[t-1]] - n[rho[t-1]] <= 1 }.
/// `rho` is 0-based and lists coordinates in ascending order of offset.
struct SimplexId {
  std::vector<std::int64_t> n;
  std::vector<std::size_t> rho;

  auto operator<=>(const SimplexId&) const = default;
};

/// Grid { -R + (2R/N) i : i = 0..N }^t on the cube [-R, R]^t.
class ScaledGrid {
 public:
  ScaledGrid(std::size_t t, double R, std::size_t N);

  std::size_t t() const noexcept { return t_; }
  double R() const noexcept { return R_; }
  std::size_t N() const noexcept { return N_; }

  double spacing() const noexcept { return 2.0 * R_ / static_cast<double>(N_); }
  double scale() const noexcept { return static_cast<double>(N_) / (2.0 * R_); }

  /// (N+1)^t; saturates at SIZE_MAX instead of overflowing.
  std::size_t node_count() const noexcept;

  /// Node index vector of a flat node id (first coordinate varies slowest).
  std::vector<std::size_t> node_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::vector<double> node(std::size_t flat) const;

  /// Maps y to grid-index coordinates (y + R) N / (2R), where nodes sit on
  /// the integer lattice {0..N}^t.
  std::vector<double> to_lattice(std::span<const double> y) const;

 private:
  std::size_t t_;
  double R_;
  std::size_t N_;
};

/// Canonical cell of the unit triangulation containing z: integer
/// coordinates are assigned to the lower cell (offset 1), giving the
/// lexicographically smallest n, and ties in the ordering keep ascending
/// coordinate order, giving the lexicographically smallest rho.
SimplexId locate(std::span<const double> z);

/// Cell containing y in the triangulation induced by `grid`; n is expressed
/// in grid-index coordinates, so the cell's vertices are grid nodes whenever
/// y lies in the cube.
SimplexId locate(std::span<const double> y, const ScaledGrid& grid);

/// Exact check of the defining inequality chain.
bool contains(const SimplexId& cell, std::span<const double> z);

/// The t+1 vertices u_0..u_t, where u_i adds 1 to the last i coordinates in
/// rho order.
std::vector<std::vector<double>> vertices(const SimplexId& cell);

/// relu(min{1 + y_k - y_j (k != j), 1 + y_k, 1 - y_k}): the continuous,
/// cellwise-linear function with value 1 at 0 and 0 at every other lattice
/// point.
double spike(std::span<const double> y);

/// All cells having 0 as a vertex: n in {-1,0}^t with the -1 entries
/// trailing in rho order. There are (t+1)! of them. Cached per t.
const std::vector<SimplexId>& origin_fan(std::size_t t);

/// Membership in the union of origin_fan(t), by enumeration.
bool in_S0(std::span<const double> y);

/// Membership in { |y_k| <= 1, y_k <= 1 + y_l for all k != l }.
bool in_Sprime(std::span<const double> y);

struct AffineForm {
  enum class Shape { kOnePlus, kOneMinus, kDifference, kOther };

  double constant = 0.0;
  std::vector<double> coeffs;

  double operator()(std::span<const double> y) const;

  /// Matches 1 + y_l, 1 - y_l or 1 + y_l - y_k with coefficients within tol.
  Shape shape(double tol = 1e-12) const;
};

/// The affine function equal to 1 at the origin and 0 at the other vertices
/// of `cell`. Throws std::invalid_argument if 0 is not a vertex of the cell.
AffineForm vertex_interpolant(const SimplexId& cell);

}  // namespace funcrelu::simplicial
