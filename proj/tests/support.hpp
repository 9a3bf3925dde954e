#pragma once

#include <random>

#include "ptbands/potential.hpp"

namespace testing {

using ptbands::cplx;
using ptbands::PeriodicPotential;

// V = 2cos x + cos 2x + i gamma sin 2x
inline PeriodicPotential model_potential(double gamma) {
  return PeriodicPotential(
      {{1, 1.0}, {-1, 1.0}, {2, 0.5 + 0.5 * gamma}, {-2, 0.5 - 0.5 * gamma}});
}

inline PeriodicPotential two_cos() { return PeriodicPotential({{1, 1.0}, {-1, 1.0}}); }

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace testing
