#pragma once

#include <Eigen/Dense>

#include "ptbands/potential.hpp"

namespace ptbands {

/// Galerkin matrix of L(k) = -(d/dx + ik)^2 + V in the basis e^{ijx},
/// |j| <= J. Row/column index a corresponds to harmonic j = a - J.
///   M_{jl} = (j + k)^2 delta_{jl} + c_{j-l}
struct BlochOperatorMatrix {
  double k = 0.0;
  int J = 0;
  Eigen::MatrixXcd entries;

  int size() const { return 2 * J + 1; }
  static int index(int j, int J) { return j + J; }
  static int harmonic(int a, int J) { return a - J; }
};

BlochOperatorMatrix assemble(const PeriodicPotential& p, double k, int J);

/// Conjugate transpose of assemble(p, k, J), i.e. the matrix of
/// -(d/dx + ik)^2 + conj(V).
BlochOperatorMatrix assemble_adjoint(const PeriodicPotential& p, double k, int J);

double max_imag_entry(const BlochOperatorMatrix& m);

}  // namespace ptbands
