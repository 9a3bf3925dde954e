#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ptbands/effective.hpp"
#include "ptbands/fft.hpp"
#include "ptbands/grid.hpp"
#include "ptbands/potential.hpp"

namespace ptbands {

/// Stationary GP operator F(u) = -u'' + V u + sigma |u|^2 u - omega u on a
/// periodic RealLineGrid, with u'' by discrete Fourier differentiation.
class GpOperator {
 public:
  GpOperator(const PeriodicPotential& V, const PeriodicPotential& sigma, double omega,
             const RealLineGrid& grid);

  const RealLineGrid& grid() const { return grid_; }
  double omega() const { return omega_; }
  const PeriodicPotential& potential() const { return V_; }

  Eigen::VectorXcd second_derivative(const Eigen::VectorXcd& u) const;
  Eigen::VectorXcd residual(const Eigen::VectorXcd& u) const;
  /// Real-linear Jacobian action at u: J dv = -dv'' + (V - omega) dv
  ///   + sigma (2 |u|^2 dv + u^2 conj(dv)).
  Eigen::VectorXcd jacobian_apply(const Eigen::VectorXcd& u, const Eigen::VectorXcd& dv) const;

  const Eigen::VectorXcd& V_values() const { return V_values_; }
  const Eigen::VectorXcd& sigma_values() const { return sigma_values_; }
  const Eigen::VectorXd& xi2() const { return xi2_; }
  const Fft& fft() const { return fft_; }

 private:
  PeriodicPotential V_;
  RealLineGrid grid_;
  double omega_;
  Eigen::VectorXcd V_values_;
  Eigen::VectorXcd sigma_values_;
  Eigen::VectorXd xi2_;
  Fft fft_;
};

Eigen::VectorXcd gp_residual(const Eigen::VectorXcd& u, double omega, const PeriodicPotential& V,
                             const PeriodicPotential& sigma, const RealLineGrid& grid);

/// Discrete Sobolev norm (h/n * sum_q (1 + xi_q^2)^s |U_q|^2)^{1/2} with U the
/// DFT of u; at s = 0 this is the discrete L^2 norm. Requires 0 <= s <= 2.
double hs_norm(const Eigen::VectorXcd& u, double s, const RealLineGrid& grid);

enum class LinearSolver { Auto, Dense, Krylov };

struct NewtonOptions {
  int max_iter = 30;
  double tol = 1e-10;
  LinearSolver linear_solver = LinearSolver::Auto;
  int dense_limit = 2048;  // Auto uses the dense path up to this many points
  double krylov_rtol = 1e-11;
  int krylov_restart = 120;
  int krylov_max_iter = 1200;
};

struct NewtonReport {
  BoundState state;
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<int> linear_iterations;
  std::vector<double> pt_defects;        // after every update
  double quadratic_constant = 0.0;       // max r_{k+1} / r_k^2 over the final reductions
  bool used_dense = false;
};

/// Newton iteration in the PT-symmetric subspace {conj(u(-x)) = u(x)}. The
/// unknowns are the even part of Re u and the odd part of Im u on the half
/// grid; the gauge and translation directions are absent from that subspace.
/// The dense path factorizes the reduced real Jacobian; the Krylov path runs
/// GMRES on the same subspace preconditioned by the exact inverse of the
/// linear periodic operator (block diagonal over Bloch residues).
/// Throws SolverError when max_iter is exceeded or the Jacobian is singular.
NewtonReport newton_solve(const Eigen::VectorXcd& u0, double omega, const PeriodicPotential& V,
                          const PeriodicPotential& sigma, const RealLineGrid& grid,
                          const NewtonOptions& options = {});

/// Exact inverse of (-d^2/dx^2 + V - omega) on the periodic grid. The discrete
/// operator couples DFT index q only to q + 2*cells*d for harmonics d, so it
/// splits into 2*cells independent blocks of size points_per_cell.
class BlochBlockInverse {
 public:
  BlochBlockInverse(const GpOperator& op);
  Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const;

 private:
  const GpOperator* op_;
  std::vector<std::vector<int>> groups_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> blocks_;
};

// -- convergence study ------------------------------------------------------

struct StudyOptions {
  EdgeOptions edge;
  int points_per_cell = 32;
  double tail_factor = 20.0;  // half-length >= tail_factor * width / eps
  double s = 1.0;
  NewtonOptions newton;
};

struct StudyRow {
  double eps = 0.0;
  double half_length = 0.0;
  int n_points = 0;
  int newton_iters = 0;
  double residual = 0.0;
  double hs_error = 0.0;
  double hs_error_rel = 0.0;
  double ansatz_norm = 0.0;
  double quadratic_constant = 0.0;
  double max_pt_defect = 0.0;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Least-squares line through (log x, log y); empty with fewer than two points.
std::optional<LogLogFit> fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct StudyResult {
  EdgeSetup setup;
  SechEnvelope envelope;
  std::vector<StudyRow> rows;
  std::optional<LogLogFit> fit;
  std::optional<LogLogFit> fit_rel;
};

/// For each eps: build u_form, Newton-solve from it at omega = omega* +
/// eps^2 Omega, and record e(eps) = ||u - u_form||_{H^s}. Throws
/// AssumptionError if the band or the existence condition fails and
/// SolverError (naming eps) if Newton diverges.
StudyResult convergence_study(const PeriodicPotential& V, const PeriodicPotential& sigma, int m,
                              char which_edge, const std::vector<double>& eps_list,
                              const StudyOptions& options);

/// Half-grid cell count needed for a given envelope width and eps.
int cells_for(double width, double eps, double tail_factor);

void write_converge_csv(std::ostream& os, const StudyResult& result);
nlohmann::json study_summary(const StudyResult& result);

}  // namespace ptbands
