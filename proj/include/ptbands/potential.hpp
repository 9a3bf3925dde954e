#pragma once

#include <complex>
#include <map>
#include <vector>

#include <json.hpp>

namespace ptbands {

using cplx = std::complex<double>;

/// A 2*pi-periodic potential V(x) = sum_j c_j e^{ijx} with finitely many
/// harmonics. Coefficients are stored sparsely by harmonic index.
class PeriodicPotential {
 public:
  PeriodicPotential() = default;
  explicit PeriodicPotential(std::map<int, cplx> coeffs);

  static PeriodicPotential constant(double value);

  const std::map<int, cplx>& coeffs() const { return coeffs_; }
  cplx coeff(int j) const;
  /// Largest |j| with a stored coefficient; 0 for the zero potential.
  int max_harmonic() const { return max_harmonic_; }
  bool is_zero() const { return coeffs_.empty(); }

 private:
  std::map<int, cplx> coeffs_;
  int max_harmonic_ = 0;
};

/// Sine-series normalization of the odd part W.
///   Prop2Sine:     W(x) =   sum_j b_j sin(jx)
///   Prop3Doubled:  W(x) = 2 sum_j b_j sin(jx)
/// The even part always uses U(x) = 2 sum_j a_j cos(jx), so a_j is the
/// exponential coefficient of e^{+-ijx}.
enum class SineConvention { Prop2Sine, Prop3Doubled };

/// V = U + i*gamma*W with U even and W odd; index 0 of each sequence is
/// harmonic 1.
struct PotentialParts {
  std::vector<double> cosine_coeffs;
  std::vector<double> sine_coeffs;
  double gamma = 0.0;
  SineConvention convention = SineConvention::Prop2Sine;
};

PeriodicPotential from_parts(const PotentialParts& parts);

/// Inverse of from_parts for the given gamma and convention. Requires real
/// coefficients, zero mean and gamma != 0 unless the odd part vanishes.
PotentialParts to_parts(const PeriodicPotential& p, double gamma, SineConvention convention);

/// Even part U (gamma = 0) and odd part W of a parts description.
PeriodicPotential even_part(const PotentialParts& parts);
PeriodicPotential odd_part(const PotentialParts& parts);

cplx eval(const PeriodicPotential& p, double x);

/// PT-symmetry V(-x) = conj(V(x)) holds iff every coefficient is real.
bool validate_pt(const PeriodicPotential& p, double tol);
double max_imag_coeff(const PeriodicPotential& p);

/// JSON forms:
///   {"cosine": [...], "sine": [...], "gamma": g, "convention": "prop2"|"prop3"}
///   {"exp_coeffs": [[j, re, im], ...]}
/// Unknown keys are rejected with ConfigError.
PeriodicPotential potential_from_json(const nlohmann::json& j);
PotentialParts parts_from_json(const nlohmann::json& j);
bool json_has_parts(const nlohmann::json& j);
nlohmann::json potential_to_json(const PeriodicPotential& p);

}  // namespace ptbands
