#include "ptbands/config.hpp"

#include <fstream>
#include <set>

#include "ptbands/error.hpp"

namespace ptbands {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

double positive(const json& j, const std::string& key) {
  const double v = number(j, key);
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

int integer(const json& j, const std::string& key, int min_value) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  const int v = j.get<int>();
  if (v < min_value)
    throw ConfigError("'" + key + "' must be at least " + std::to_string(min_value));
  return v;
}

std::vector<double> positive_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError("'" + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(positive(v, key));
  return out;
}

Numerics parse_numerics(const json& j) {
  reject_unknown(j,
                 {"J", "N_k", "n_bands", "tol_real", "n_quad", "points_per_cell", "tail_factor",
                  "newton_tol", "max_iter", "hs_s", "linear_solver", "dense_limit"},
                 "numerics");
  Numerics n;
  if (j.contains("J")) n.J = integer(j["J"], "J", 1);
  if (j.contains("N_k")) n.N_k = integer(j["N_k"], "N_k", 16);
  if (j.contains("n_bands")) n.n_bands = integer(j["n_bands"], "n_bands", 1);
  if (j.contains("tol_real")) n.tol_real = positive(j["tol_real"], "tol_real");
  if (j.contains("n_quad")) n.n_quad = integer(j["n_quad"], "n_quad", 0);
  if (j.contains("points_per_cell"))
    n.points_per_cell = integer(j["points_per_cell"], "points_per_cell", 32);
  if (j.contains("tail_factor")) n.tail_factor = positive(j["tail_factor"], "tail_factor");
  if (j.contains("newton_tol")) n.newton_tol = positive(j["newton_tol"], "newton_tol");
  if (j.contains("max_iter")) n.max_iter = integer(j["max_iter"], "max_iter", 1);
  if (j.contains("hs_s")) {
    n.hs_s = number(j["hs_s"], "hs_s");
    if (n.hs_s < 0.0 || n.hs_s > 2.0) throw ConfigError("'hs_s' must lie in [0, 2]");
  }
  if (j.contains("linear_solver")) {
    if (!j["linear_solver"].is_string()) throw ConfigError("'linear_solver' must be a string");
    const auto s = j["linear_solver"].get<std::string>();
    if (s == "auto")
      n.linear_solver = LinearSolver::Auto;
    else if (s == "dense")
      n.linear_solver = LinearSolver::Dense;
    else if (s == "krylov")
      n.linear_solver = LinearSolver::Krylov;
    else
      throw ConfigError("'linear_solver' must be auto, dense or krylov");
  }
  if (j.contains("dense_limit")) n.dense_limit = integer(j["dense_limit"], "dense_limit", 0);
  if (n.N_k % 2 != 0) throw ConfigError("'N_k' must be even");
  return n;
}

DiracConfig parse_dirac(const json& j) {
  reject_unknown(j, {"gamma_list", "slope", "slope_gamma0", "tol"}, "dirac");
  DiracConfig d;
  if (j.contains("gamma_list")) {
    if (!j["gamma_list"].is_array()) throw ConfigError("'gamma_list' must be an array");
    for (const auto& v : j["gamma_list"]) d.gamma_list.push_back(number(v, "gamma_list"));
  }
  if (j.contains("slope")) {
    if (!j["slope"].is_boolean()) throw ConfigError("'slope' must be a boolean");
    d.slope = j["slope"].get<bool>();
  }
  if (j.contains("slope_gamma0")) d.slope_gamma0 = positive(j["slope_gamma0"], "slope_gamma0");
  if (j.contains("tol")) d.tol = positive(j["tol"], "tol");
  return d;
}

Prop3Config parse_prop3(const json& j) {
  reject_unknown(j, {"a_power", "b_power", "n_harmonics", "gamma", "m_range", "J"}, "prop3");
  Prop3Config p;
  if (j.contains("a_power")) p.a_power = positive(j["a_power"], "a_power");
  if (j.contains("b_power")) p.b_power = positive(j["b_power"], "b_power");
  if (j.contains("n_harmonics")) p.n_harmonics = integer(j["n_harmonics"], "n_harmonics", 1);
  if (j.contains("gamma")) p.gamma = number(j["gamma"], "gamma");
  if (j.contains("m_range")) {
    const auto& r = j["m_range"];
    if (!r.is_array() || r.size() != 2) throw ConfigError("'m_range' must be [first, last]");
    p.m_first = integer(r[0], "m_range", 1);
    p.m_last = integer(r[1], "m_range", p.m_first);
  }
  if (j.contains("J")) p.J = integer(j["J"], "J", 1);
  return p;
}

}  // namespace

RunConfig parse_config(const json& j) {
  reject_unknown(j,
                 {"potential", "sigma", "numerics", "band", "edge", "eps", "eps_list", "dirac",
                  "prop3"},
                 "config");
  RunConfig c;
  if (j.contains("potential")) {
    c.potential = potential_from_json(j["potential"]);
    if (json_has_parts(j["potential"])) c.parts = parts_from_json(j["potential"]);
    if (!validate_pt(*c.potential, 1e-14))
      throw ConfigError("potential is not PT-symmetric (complex Fourier coefficient)");
  }
  if (j.contains("sigma")) {
    c.sigma = j["sigma"].is_number() ? PeriodicPotential::constant(j["sigma"].get<double>())
                                     : potential_from_json(j["sigma"]);
    if (!validate_pt(*c.sigma, 1e-14)) throw ConfigError("sigma is not PT-symmetric");
  }
  if (j.contains("numerics")) c.numerics = parse_numerics(j["numerics"]);
  if (j.contains("band")) c.band = integer(j["band"], "band", 1);
  if (j.contains("edge")) {
    if (!j["edge"].is_string() || (j["edge"] != "a" && j["edge"] != "b"))
      throw ConfigError("'edge' must be \"a\" or \"b\"");
    c.edge = j["edge"].get<std::string>()[0];
  }
  if (j.contains("eps")) {
    c.eps = positive(j["eps"], "eps");
    if (c.eps > 0.5) throw ConfigError("'eps' must not exceed 0.5");
  }
  if (j.contains("eps_list")) {
    c.eps_list = positive_list(j["eps_list"], "eps_list");
    for (double e : c.eps_list)
      if (e > 0.5) throw ConfigError("'eps_list' entries must not exceed 0.5");
  }
  if (j.contains("dirac")) c.dirac = parse_dirac(j["dirac"]);
  if (j.contains("prop3")) c.prop3 = parse_prop3(j["prop3"]);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

const PeriodicPotential& RunConfig::require_potential() const {
  if (!potential) throw ConfigError("config: 'potential' is required for this command");
  return *potential;
}

const PeriodicPotential& RunConfig::require_sigma() const {
  if (!sigma) throw ConfigError("config: 'sigma' is required for this command");
  return *sigma;
}

int RunConfig::require_band() const {
  if (!band) throw ConfigError("config: 'band' is required for this command");
  if (*band > numerics.n_bands) throw ConfigError("config: 'band' exceeds numerics.n_bands");
  return *band;
}

EdgeOptions RunConfig::edge_options() const {
  EdgeOptions o;
  o.J = numerics.J;
  o.N_k = numerics.N_k;
  o.n_bands = numerics.n_bands;
  o.tol_real = numerics.tol_real;
  o.n_quad = numerics.n_quad;
  return o;
}

NewtonOptions RunConfig::newton_options() const {
  NewtonOptions o;
  o.max_iter = numerics.max_iter;
  o.tol = numerics.newton_tol;
  o.linear_solver = numerics.linear_solver;
  o.dense_limit = numerics.dense_limit;
  return o;
}

StudyOptions RunConfig::study_options() const {
  StudyOptions o;
  o.edge = edge_options();
  o.points_per_cell = numerics.points_per_cell;
  o.tail_factor = numerics.tail_factor;
  o.s = numerics.hs_s;
  o.newton = newton_options();
  return o;
}

}  // namespace ptbands
