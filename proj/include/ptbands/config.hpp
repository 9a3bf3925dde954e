#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptbands/effective.hpp"
#include "ptbands/gpsolve.hpp"
#include "ptbands/potential.hpp"

namespace ptbands {

struct Numerics {
  int J = 32;
  int N_k = 64;
  int n_bands = 6;
  double tol_real = 1e-8;
  int n_quad = 0;
  int points_per_cell = 32;
  double tail_factor = 20.0;
  double newton_tol = 1e-10;
  int max_iter = 30;
  double hs_s = 1.0;
  LinearSolver linear_solver = LinearSolver::Auto;
  int dense_limit = 2048;
};

struct DiracConfig {
  std::vector<double> gamma_list;  // empty: the potential's own gamma
  bool slope = false;
  double slope_gamma0 = 0.01;
  double tol = 1e-8;
};

struct Prop3Config {
  double a_power = 2.5;  // a_j = j^-a_power
  double b_power = 1.5;  // b_j = j^-b_power
  int n_harmonics = 62;
  double gamma = 0.5;
  int m_first = 6;
  int m_last = 12;
  int J = 64;
};

/// Parsed run configuration. Keys:
///   potential   potential spec (see potential_from_json)
///   sigma       number or potential spec
///   numerics    {J, N_k, n_bands, tol_real, n_quad, points_per_cell,
///                tail_factor, newton_tol, max_iter, hs_s, linear_solver,
///                dense_limit}
///   band, edge ("a"|"b"), eps, eps_list
///   dirac       {gamma_list, slope, slope_gamma0, tol}
///   prop3       {a_power, b_power, n_harmonics, gamma, m_range: [first, last], J}
struct RunConfig {
  std::optional<PeriodicPotential> potential;
  std::optional<PotentialParts> parts;  // when the potential is given in parts form
  std::optional<PeriodicPotential> sigma;
  Numerics numerics;
  std::optional<int> band;
  char edge = 'a';
  double eps = 0.1;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::optional<DiracConfig> dirac;
  std::optional<Prop3Config> prop3;

  const PeriodicPotential& require_potential() const;
  const PeriodicPotential& require_sigma() const;
  int require_band() const;
  EdgeOptions edge_options() const;
  NewtonOptions newton_options() const;
  StudyOptions study_options() const;
};

/// Strict parsing: unknown keys, wrong types and non-positive tolerances
/// raise ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace ptbands
