#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptbands/eigensolve.hpp"
#include "ptbands/potential.hpp"

namespace ptbands {

/// Band curves omega_m(k) on a uniform grid over (-1/2, 1/2]. Bands are
/// followed from k to k by eigenvector overlap; band b (0-based) starts as the
/// b-th eigenvalue by real part at the first grid point.
struct BandStructure {
  PeriodicPotential potential;
  int J = 0;
  int n_bands = 0;
  std::vector<double> k_grid;
  std::vector<std::vector<cplx>> omega;                 // [band][k]
  std::vector<std::vector<Eigen::VectorXcd>> vectors;   // [band][k]
  std::vector<std::vector<double>> overlap;             // [band][k], 1 at the first k
  std::vector<double> tracking_quality;                 // [k], min overlap over bands
  std::vector<std::vector<cplx>> raw_window;            // [k], solver's lowest n_bands

  int n_k() const { return static_cast<int>(k_grid.size()); }
  int k_index(double k) const;  // -1 when k is not a grid point
};

/// N_k must be even and >= 16 so the grid contains 0 and 1/2.
BandStructure compute_bands(const PeriodicPotential& p, int J, int N_k, int n_bands);

struct BandEdge {
  double k0 = 0.0;
  double omega_star = 0.0;
  char which = 'a';         // 'a' lower edge, 'b' upper edge
  double curvature = 0.0;   // omega''(k0)
  double slope = 0.0;       // omega'(k0), central difference
  double curvature_error = 0.0;
};

struct BandEdgeReport {
  int m = 0;  // 1-based band index
  bool is_real = false;
  double max_imag = 0.0;
  double witness_k = 0.0;
  double isolation_gap = 0.0;
  double simplicity_margin = 0.0;
  bool tracked = true;
  std::vector<BandEdge> edges;
  std::vector<std::string> failures;

  static constexpr double kIsolationThreshold = 1e-3;
  bool passes() const { return failures.empty(); }
  const BandEdge& edge(char which) const;
};

/// Reality, isolation and simplicity of band m (1-based) plus its edges.
/// Failures are recorded in the report rather than thrown.
BandEdgeReport check_assumption(const BandStructure& bs, int m, double tol_real);

struct SecondDerivative {
  double value = 0.0;
  double error_estimate = 0.0;
  double first_derivative = 0.0;
};

/// omega_m''(k0) for the m-th eigenvalue (1-based, by real part at k0) via
/// Richardson extrapolation of central second differences with steps h, h/2.
/// Samples are matched to the k0 eigenvector by overlap and must stay real.
SecondDerivative second_derivative_estimate(const PeriodicPotential& p, int m, double k0, int J,
                                            double h = 1e-3, double tol_real = 1e-8);
double second_derivative(const PeriodicPotential& p, int m, double k0, int J);

/// omega at arbitrary real k (reduced into the zone by 1-periodicity) for the
/// eigenvalue whose eigenvector best overlaps `reference` (coefficients at
/// k_ref, expressed with the same harmonic labels). Returns the refined
/// eigenvalue and the matched overlap.
struct MatchedEigenvalue {
  cplx omega;
  double overlap = 0.0;
};
MatchedEigenvalue matched_eigenvalue(const PeriodicPotential& p, double k, int J,
                                     const Eigen::VectorXcd& reference);

void write_bands_csv(std::ostream& os, const BandStructure& bs);

}  // namespace ptbands
