#include "ptbands/discretize.hpp"

#include <cmath>
#include <string>

#include "ptbands/error.hpp"

namespace ptbands {

namespace {

void check_args(const PeriodicPotential& p, double k, int J) {
  if (std::abs(k) > 0.5 + 1e-12)
    throw SolverError("assemble: quasimomentum k = " + std::to_string(k) + " outside [-1/2, 1/2]");
  if (J < p.max_harmonic())
    throw SolverError("assemble: truncation J = " + std::to_string(J) +
                      " drops potential harmonics up to " + std::to_string(p.max_harmonic()));
}

}  // namespace

BlochOperatorMatrix assemble(const PeriodicPotential& p, double k, int J) {
  check_args(p, k, J);
  BlochOperatorMatrix m;
  m.k = k;
  m.J = J;
  const int n = 2 * J + 1;
  m.entries = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double jk = (a - J) + k;
    m.entries(a, a) = jk * jk;
  }
  for (const auto& [d, c] : p.coeffs()) {
    // entry (j, l) with j - l = d
    for (int b = 0; b < n; ++b) {
      const int a = b + d;
      if (a >= 0 && a < n) m.entries(a, b) += c;
    }
  }
  return m;
}

BlochOperatorMatrix assemble_adjoint(const PeriodicPotential& p, double k, int J) {
  BlochOperatorMatrix m = assemble(p, k, J);
  m.entries.adjointInPlace();
  return m;
}

double max_imag_entry(const BlochOperatorMatrix& m) {
  return m.entries.imag().cwiseAbs().maxCoeff();
}

}  // namespace ptbands
