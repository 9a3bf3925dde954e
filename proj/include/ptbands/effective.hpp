#pragma once

#include <string>

#include <json.hpp>

#include "ptbands/bands.hpp"
#include "ptbands/eigensolve.hpp"
#include "ptbands/grid.hpp"
#include "ptbands/potential.hpp"

namespace ptbands {

/// Coefficients of the envelope equation
///   -(1/2) omega''(k0) A'' + Gamma |A|^2 A = Omega A
/// at a real band edge omega_star.
struct EffectiveModel {
  double k0 = 0.0;
  double omega_star = 0.0;
  double curvature = 0.0;
  cplx gamma_nl;
  int Omega = -1;   // -1 at the lower edge a, +1 at the upper edge b
  bool exists = false;
};

/// Builds the model and evaluates the existence condition
/// Gamma != 0 and sign(Gamma) = -sign(omega'') = sign(Omega).
EffectiveModel make_model(double k0, double omega_star, double curvature, cplx gamma_nl,
                          char which_edge);

/// Empty when a bound state exists; otherwise names the violated condition.
std::string existence_violation(const EffectiveModel& model);

/// Gamma = int_{-pi}^{pi} sigma p |p|^2 conj(q) dx with q(x) = p(-x, -k0),
/// where q is scaled so that <q, p> = 1 (biorthogonal normalization of the
/// reflected mode). mode_minus_k0 may sit at any k congruent to -k0 mod 1;
/// the coefficients are shifted accordingly. Uniform trapezoid with n_quad
/// nodes on one period.
cplx gamma_coefficient(const BlochMode& mode_k0, const BlochMode& mode_minus_k0,
                       const PeriodicPotential& sigma, int n_quad);

/// Same integral with the adjoint eigenfunction p* of mode_k0 in place of the
/// reflected mode.
cplx gamma_coefficient_adjoint(const BlochMode& mode_k0, const PeriodicPotential& sigma,
                               int n_quad);

/// A(X) = amplitude * sech(X / width) in the slow variable X = eps x.
struct SechEnvelope {
  double amplitude = 0.0;
  double width = 0.0;
  double k0 = 0.0;
  double omega_star = 0.0;
  int Omega = -1;

  double value(double X) const;
  double second_derivative(double X) const;
};

/// Throws AssumptionError naming the violated sign condition if no bound
/// state exists.
SechEnvelope sech_envelope(const EffectiveModel& model);

/// -(1/2) omega'' A'' + Gamma A^3 - Omega A at X, with A'' evaluated in closed form.
double snls_residual(const EffectiveModel& model, const SechEnvelope& env, double X);

/// u_form(x) = eps A(eps x) e^{i k0 x} p(x, k0) on the grid, with
/// omega = omega_star + eps^2 Omega. Rejects grids with fewer than 32 points
/// per cell or with eps L / width < 15 (envelope tail above ~1e-6).
BoundState build_ansatz(const SechEnvelope& env, const BlochMode& mode, double eps,
                        const RealLineGrid& grid);

/// Band-edge data bundled for the nonlinear stages.
struct EdgeSetup {
  BandEdgeReport report;
  BandEdge edge;
  BlochMode mode;
  EffectiveModel model;
};

struct EdgeOptions {
  int J = 32;
  int N_k = 64;
  int n_bands = 6;
  double tol_real = 1e-8;
  int n_quad = 0;  // 0: 8 * (J + J_pot) rounded up to a multiple of 64
  bool require_assumption = true;  // false: proceed on local edge data alone
};

/// Computes bands, checks the spectral assumption for band m, builds the
/// PT-phase-fixed mode at the requested edge and the effective model.
/// Throws AssumptionError if the band check fails (only when the requested
/// edge itself is unusable if require_assumption is false).
EdgeSetup prepare_edge(const PeriodicPotential& V, const PeriodicPotential& sigma, int m,
                       char which_edge, const EdgeOptions& options);

nlohmann::json to_json(const EffectiveModel& model);

}  // namespace ptbands
