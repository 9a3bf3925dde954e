#include "ptbands/potential.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

#include "ptbands/error.hpp"

namespace ptbands {

PeriodicPotential::PeriodicPotential(std::map<int, cplx> coeffs) {
  for (const auto& [j, c] : coeffs) {
    if (c == cplx(0.0, 0.0)) continue;
    coeffs_.emplace(j, c);
    max_harmonic_ = std::max(max_harmonic_, std::abs(j));
  }
}

PeriodicPotential PeriodicPotential::constant(double value) {
  return PeriodicPotential({{0, cplx(value, 0.0)}});
}

cplx PeriodicPotential::coeff(int j) const {
  auto it = coeffs_.find(j);
  return it == coeffs_.end() ? cplx(0.0, 0.0) : it->second;
}

namespace {

double sine_factor(SineConvention c) {
  return c == SineConvention::Prop3Doubled ? 1.0 : 0.5;
}

void add(std::map<int, cplx>& m, int j, cplx v) { m[j] += v; }

}  // namespace

PeriodicPotential from_parts(const PotentialParts& parts) {
  std::map<int, cplx> c;
  for (std::size_t i = 0; i < parts.cosine_coeffs.size(); ++i) {
    const int j = static_cast<int>(i) + 1;
    add(c, j, parts.cosine_coeffs[i]);
    add(c, -j, parts.cosine_coeffs[i]);
  }
  // i*gamma*f*b*(e^{ijx} - e^{-ijx})/i = gamma*f*b*(e^{ijx} - e^{-ijx})
  const double f = sine_factor(parts.convention) * parts.gamma;
  for (std::size_t i = 0; i < parts.sine_coeffs.size(); ++i) {
    const int j = static_cast<int>(i) + 1;
    add(c, j, f * parts.sine_coeffs[i]);
    add(c, -j, -f * parts.sine_coeffs[i]);
  }
  return PeriodicPotential(std::move(c));
}

PotentialParts to_parts(const PeriodicPotential& p, double gamma, SineConvention convention) {
  if (!validate_pt(p, 1e-14)) throw ConfigError("to_parts: potential is not PT-symmetric");
  if (std::abs(p.coeff(0)) > 0.0) throw ConfigError("to_parts: potential has a nonzero mean");
  PotentialParts parts;
  parts.gamma = gamma;
  parts.convention = convention;
  const int n = p.max_harmonic();
  parts.cosine_coeffs.assign(n, 0.0);
  parts.sine_coeffs.assign(n, 0.0);
  const double f = sine_factor(convention) * gamma;
  for (int j = 1; j <= n; ++j) {
    const double plus = p.coeff(j).real();
    const double minus = p.coeff(-j).real();
    parts.cosine_coeffs[j - 1] = 0.5 * (plus + minus);
    const double odd = 0.5 * (plus - minus);
    if (odd != 0.0 && f == 0.0) throw ConfigError("to_parts: odd part present but gamma = 0");
    parts.sine_coeffs[j - 1] = f == 0.0 ? 0.0 : odd / f;
  }
  return parts;
}

PeriodicPotential even_part(const PotentialParts& parts) {
  PotentialParts u = parts;
  u.gamma = 0.0;
  u.sine_coeffs.clear();
  return from_parts(u);
}

PeriodicPotential odd_part(const PotentialParts& parts) {
  // W itself (real, odd): b*(e^{ijx} - e^{-ijx})/(2i) per unit amplitude.
  std::map<int, cplx> c;
  const double f = parts.convention == SineConvention::Prop3Doubled ? 2.0 : 1.0;
  for (std::size_t i = 0; i < parts.sine_coeffs.size(); ++i) {
    const int j = static_cast<int>(i) + 1;
    const cplx v = f * parts.sine_coeffs[i] / cplx(0.0, 2.0);
    c[j] += v;
    c[-j] -= v;
  }
  return PeriodicPotential(std::move(c));
}

cplx eval(const PeriodicPotential& p, double x) {
  cplx sum(0.0, 0.0);
  for (const auto& [j, c] : p.coeffs()) sum += c * std::polar(1.0, j * x);
  return sum;
}

double max_imag_coeff(const PeriodicPotential& p) {
  double m = 0.0;
  for (const auto& kv : p.coeffs()) m = std::max(m, std::abs(kv.second.imag()));
  return m;
}

bool validate_pt(const PeriodicPotential& p, double tol) { return max_imag_coeff(p) <= tol; }

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

std::vector<double> real_array(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError("potential: '" + what + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("potential: '" + what + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

bool json_has_parts(const nlohmann::json& j) { return j.is_object() && !j.contains("exp_coeffs"); }

PotentialParts parts_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"cosine", "sine", "gamma", "convention"}, "potential");
  PotentialParts parts;
  if (j.contains("cosine")) parts.cosine_coeffs = real_array(j["cosine"], "cosine");
  if (j.contains("sine")) parts.sine_coeffs = real_array(j["sine"], "sine");
  if (j.contains("gamma")) {
    if (!j["gamma"].is_number()) throw ConfigError("potential: 'gamma' must be a number");
    parts.gamma = j["gamma"].get<double>();
  }
  if (j.contains("convention")) {
    const auto c = j["convention"].get<std::string>();
    if (c == "prop2")
      parts.convention = SineConvention::Prop2Sine;
    else if (c == "prop3")
      parts.convention = SineConvention::Prop3Doubled;
    else
      throw ConfigError("potential: convention must be 'prop2' or 'prop3', got '" + c + "'");
  }
  return parts;
}

PeriodicPotential potential_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("potential: expected an object");
  if (!j.contains("exp_coeffs")) return from_parts(parts_from_json(j));
  reject_unknown(j, {"exp_coeffs"}, "potential");
  std::map<int, cplx> c;
  for (const auto& row : j["exp_coeffs"]) {
    if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer())
      throw ConfigError("potential: exp_coeffs rows must be [j, re, im]");
    c[row[0].get<int>()] += cplx(row[1].get<double>(), row[2].get<double>());
  }
  return PeriodicPotential(std::move(c));
}

nlohmann::json potential_to_json(const PeriodicPotential& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [j, c] : p.coeffs()) rows.push_back({j, c.real(), c.imag()});
  return {{"exp_coeffs", rows}};
}

}  // namespace ptbands
