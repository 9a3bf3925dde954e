#include "ptbands/grid.hpp"

#include <string>

#include "ptbands/error.hpp"

namespace ptbands {

void validate_grid(const RealLineGrid& grid) {
  const int n = grid.n_points;
  if (grid.cells_per_side < 1) throw SolverError("grid: need at least one cell per side");
  if (n < 2 || (n & (n - 1)) != 0)
    throw SolverError("grid: n_points must be a power of two, got " + std::to_string(n));
  if (n % (2 * grid.cells_per_side) != 0)
    throw SolverError("grid: n_points must be a multiple of the number of cells");
  if (grid.points_per_cell() < 32)
    throw SolverError("grid: cell resolution " + std::to_string(grid.points_per_cell()) +
                      " < 32 points per 2*pi cell");
}

RealLineGrid make_grid(int min_cells_per_side, int points_per_cell) {
  RealLineGrid g;
  g.cells_per_side = 1;
  while (g.cells_per_side < min_cells_per_side) g.cells_per_side *= 2;
  g.n_points = 2 * g.cells_per_side * points_per_cell;
  validate_grid(g);
  return g;
}

double pt_defect(const Eigen::VectorXcd& u, const RealLineGrid& grid) {
  double d = 0.0;
  for (int i = 0; i < grid.n_points; ++i)
    d = std::max(d, std::abs(std::conj(u[grid.mirror(i)]) - u[i]));
  return d;
}

Eigen::VectorXcd pt_project(const Eigen::VectorXcd& u, const RealLineGrid& grid) {
  Eigen::VectorXcd out(u.size());
  for (int i = 0; i < grid.n_points; ++i) out[i] = 0.5 * (u[i] + std::conj(u[grid.mirror(i)]));
  return out;
}

double l2_norm(const Eigen::VectorXcd& u, const RealLineGrid& grid) {
  return std::sqrt(grid.spacing()) * u.norm();
}

}  // namespace ptbands
