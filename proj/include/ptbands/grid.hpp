#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace ptbands {

inline constexpr double kPi = 3.141592653589793238462643383279;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform periodic grid on [-L, L) with L = 2*pi*cells_per_side, so that
/// 2*pi-periodic potentials are exactly periodic on the domain. Point i sits
/// at x_i = -L + i*h and its mirror image -x_i is point (n - i) mod n.
struct RealLineGrid {
  int cells_per_side = 1;
  int n_points = 64;

  double half_length() const { return kTwoPi * cells_per_side; }
  double spacing() const { return 2.0 * half_length() / n_points; }
  double x(int i) const { return -half_length() + i * spacing(); }
  int mirror(int i) const { return (n_points - i) % n_points; }
  int points_per_cell() const { return n_points / (2 * cells_per_side); }
  /// Angular frequency of DFT index q (q >= n/2 wraps to negative).
  double frequency(int q) const {
    const int qs = q < n_points / 2 ? q : q - n_points;
    return qs * kPi / half_length();
  }
};

/// Validates the grid invariants: n a power of two, whole number of points
/// per cell, h <= 2*pi/32. Throws SolverError otherwise.
void validate_grid(const RealLineGrid& grid);

/// Smallest grid with at least `min_cells_per_side` cells on each side of the
/// origin (rounded up to a power of two) and `points_per_cell` points per cell.
RealLineGrid make_grid(int min_cells_per_side, int points_per_cell);

/// Nonlinear bound state sampled on a RealLineGrid.
struct BoundState {
  RealLineGrid grid;
  Eigen::VectorXcd values;
  double eps = 0.0;
  double omega = 0.0;
  double residual_norm = NAN;
  double hs_error_vs_ansatz = NAN;
};

/// max_i |conj(u(-x_i)) - u(x_i)|
double pt_defect(const Eigen::VectorXcd& u, const RealLineGrid& grid);

/// Orthogonal projection onto PT-symmetric fields: (u + conj(u(-x)))/2.
Eigen::VectorXcd pt_project(const Eigen::VectorXcd& u, const RealLineGrid& grid);

/// Discrete L^2 norm sqrt(h * sum |u_i|^2).
double l2_norm(const Eigen::VectorXcd& u, const RealLineGrid& grid);

}  // namespace ptbands
