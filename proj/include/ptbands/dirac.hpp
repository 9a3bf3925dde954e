#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ptbands/bands.hpp"
#include "ptbands/potential.hpp"

namespace ptbands {

/// Double eigenvalue mu of the real even problem at k0 in {0, 1/2}. phi_plus
/// and phi_minus span the eigenspace, are L^2(0,2pi)-normalized and carry
/// parity: phi_+ e^{ik0x} is real and even (real coefficients), phi_-
/// e^{ik0x} is real and odd (imaginary coefficients).
struct DiracPoint {
  double k0 = 0.0;
  double mu = 0.0;
  int band_lower = 0;  // the crossing bands are (band_lower, band_lower + 1), 1-based
  int J = 0;
  double gap = 0.0;    // |omega_m(k0) - omega_{m+1}(k0)|
  Eigen::VectorXcd phi_plus;
  Eigen::VectorXcd phi_minus;
};

/// Scans k0 in {0, 1/2} of a band structure computed for a real even
/// potential for adjacent eigenvalues within tol. Crossings whose eigenspace
/// is not two-dimensional or not parity-split are skipped and described in
/// `skipped` when given. Throws ConfigError if the potential is not real and
/// even. Sorted by mu.
std::vector<DiracPoint> find_dirac_points(const BandStructure& bs_gamma0, double tol = 1e-8,
                                          std::vector<std::string>* skipped = nullptr);

/// Coefficient-space parity at k0: j -> -j (k0 = 0) or j -> -j-1 (k0 = 1/2).
Eigen::VectorXcd apply_parity(const Eigen::VectorXcd& v, int J, double k0);

/// Coefficients of W f, truncated to |j| <= J.
Eigen::VectorXcd multiply(const PeriodicPotential& W, const Eigen::VectorXcd& f, int J);

/// M[r][c] = <W phi_c, phi_r> in the basis (phi_+, phi_-).
Eigen::Matrix2cd mw_matrix(const DiracPoint& dp, const PeriodicPotential& W);
Eigen::Matrix2cd mw_matrix(const DiracPoint& dp, const PotentialParts& W_parts);
/// Same matrix in an arbitrary basis (columns of `basis`).
Eigen::Matrix2cd mw_matrix(const Eigen::Matrix<cplx, Eigen::Dynamic, 2>& basis,
                           const PeriodicPotential& W, int J);

enum class SplittingRegime { Perturbative, HighBand };

struct SplittingPrediction {
  SplittingRegime regime = SplittingRegime::Perturbative;
  double k0 = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  /// Perturbative: mu + eigenvalues of i*gamma*M_W. HighBand: the offsets
  /// +-sqrt(a^2 - gamma^2 b^2) before mu is added. Sorted by Im descending.
  std::array<cplx, 2> leading;
  bool inconclusive = false;
  std::optional<std::array<cplx, 2>> measured;
  double relative_gap = NAN;

  double predicted_im() const { return std::abs(leading[0].imag()); }
};

/// Requires |gamma| <= 0.5. Declared inconclusive when |<W phi_+, phi_->| <= 1e-12.
SplittingPrediction predict_splitting(const DiracPoint& dp, const PotentialParts& W_parts,
                                      double gamma);
SplittingPrediction predict_splitting(const DiracPoint& dp, const PeriodicPotential& W,
                                      double gamma);

/// The two eigenvalues of L(k0) nearest mu, the one with larger Im first.
/// Throws SolverError when fewer than two lie within |omega - mu| < 1.
std::array<cplx, 2> measure_splitting(const PeriodicPotential& p, double k0, double mu, int J);

/// Stores the measurement and relative_gap = ||Im meas| - |Im pred|| / |Im pred|
/// (or the analogous real-offset gap when the prediction is real).
void attach_measurement(SplittingPrediction& pred, const std::array<cplx, 2>& measured);

/// U + i*gamma*W.
PeriodicPotential perturbed(const PeriodicPotential& U, const PeriodicPotential& W, double gamma);

struct SlopeEstimate {
  std::array<double, 3> gammas{};
  std::array<double, 3> im_over_gamma{};
  double slope = 0.0;      // Richardson limit of Im omega_+ / gamma as gamma -> 0
  double predicted = 0.0;  // |<W phi_+, phi_->|
  double relative_gap() const { return std::abs(slope - predicted) / predicted; }
};

/// Im omega_+(gamma)/gamma at gamma0, 2 gamma0, 4 gamma0. The ratio is even in
/// gamma, so two Richardson levels remove the gamma^2 and gamma^4 terms.
SlopeEstimate gamma_slope(const DiracPoint& dp, const PeriodicPotential& U,
                          const PeriodicPotential& W, double gamma0 = 0.01);

/// One row of the high-band scan around mu = m^2 at k0 = 0 for
/// V = 2 sum a_j cos(jx) + 2 i gamma sum b_j sin(jx).
struct HighBandRow {
  int m = 0;
  SplittingPrediction prediction;  // offsets +-sqrt(a_{2m}^2 - gamma^2 b_{2m}^2)
  cplx literal_offset;             // sqrt(a_m^2 - gamma^2 b_m^2), Im >= 0
  double gamma_b_m = 0.0;          // |gamma b_m|
  bool measured_complex = false;
  double ratio_to_gamma_b_m = 0.0; // |Im measured| / |gamma b_m|
};

/// The modes e^{+-imx} at k0 = 0 are coupled by harmonic 2m, so the
/// two-mode prediction uses a_{2m}, b_{2m}; the index-m value is reported
/// alongside. a[0], b[0] are harmonic 1. Requires J >= 2 max(m) + 16 and
/// J >= the number of harmonics.
std::vector<HighBandRow> prop3_scan(const std::vector<double>& a, const std::vector<double>& b,
                                    double gamma, int m_first, int m_last, int J,
                                    double tol_real = 1e-8);

struct DiracRow {
  double k0 = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  double pred_im = 0.0;
  double meas_re_plus = 0.0;
  double meas_im_plus = 0.0;
  double rel_gap = 0.0;
};

DiracRow to_row(const SplittingPrediction& pred);
void write_dirac_csv(std::ostream& os, const std::vector<DiracRow>& rows);
nlohmann::json to_json(const DiracPoint& dp);

}  // namespace ptbands
