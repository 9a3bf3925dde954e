#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ptbands/discretize.hpp"

namespace ptbands {

/// Eigenvalues sorted ascending by real part (ties broken by imaginary part)
/// with matching unit-norm right eigenvectors as columns.
struct Spectrum {
  double k = 0.0;
  int J = 0;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_vectors;
  double matrix_norm = 0.0;  // infinity norm of the assembled matrix

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Dense non-Hermitian eigendecomposition (Hessenberg reduction + shifted QR).
/// Throws SolverError on non-convergence or when a residual exceeds
/// 1e-9 * ||M||.
Spectrum solve(const BlochOperatorMatrix& m);

/// Reality tolerance scaled with the eigenvalue: tol * max(1, |omega|).
double real_tolerance(double tol_real, cplx omega);

struct Classification {
  std::vector<int> real;                    // indices into the spectrum
  std::vector<std::pair<int, int>> pairs;   // (Im > 0, Im < 0)
};

/// Splits the spectrum into real eigenvalues and conjugate pairs. Throws
/// SolverError if a complex eigenvalue has no conjugate partner.
Classification classify(const Spectrum& spec, double tol_real);
Classification classify(const std::vector<cplx>& eigenvalues, double tol_real);

/// Bloch eigenpair in the e^{ijx} coefficient basis (index a <-> j = a - J),
/// normalized so that ||p||_{L^2(0,2pi)} = 1 and <p*, p> = 1.
struct BlochMode {
  double k = 0.0;
  int J = 0;
  cplx omega;
  Eigen::VectorXcd p_coeffs;
  Eigen::VectorXcd pstar_coeffs;
};

/// <f, g> = int_0^{2pi} f conj(g) dx for coefficient vectors.
cplx inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);
double l2_norm(const Eigen::VectorXcd& f);

/// Builds the biorthonormal mode for eigenvalue `index` of `spec`. The adjoint
/// eigenvector is taken from `adjoint` at conj(omega). Refuses eigenvalues
/// closer than 1e-6 ||M|| to another eigenvalue.
BlochMode make_mode(const Spectrum& spec, int index, const BlochOperatorMatrix& adjoint);

/// Rotates p (and p*) by a global phase so the largest coefficient is real
/// and positive. For a simple real eigenvalue of a PT potential this makes
/// every coefficient real, i.e. conj(p(-x)) = p(x).
BlochMode fix_pt_phase(const BlochMode& mode, double tol_real = 1e-8, double tol_imag = 1e-8);

double max_imag_coeff(const Eigen::VectorXcd& v);

/// Polishes an approximate simple eigenpair by inverse iteration on both the
/// right and left eigenvectors, then returns the two-sided Rayleigh quotient.
/// `v` is updated to the refined right eigenvector.
cplx refine_eigenvalue(const BlochOperatorMatrix& m, cplx omega, Eigen::VectorXcd& v,
                       int iterations = 2);

/// Evaluates sum_j c_j e^{i(j + shift) x}.
cplx eval_coeffs(const Eigen::VectorXcd& c, int J, double x, double shift = 0.0);

}  // namespace ptbands
