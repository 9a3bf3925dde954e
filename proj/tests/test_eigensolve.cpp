#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ptbands/discretize.hpp"
#include "ptbands/eigensolve.hpp"
#include "ptbands/error.hpp"
#include "ptbands/grid.hpp"
#include "support.hpp"

using namespace ptbands;

namespace {

double residual(const BlochOperatorMatrix& m, const Spectrum& s, int i) {
  return (m.entries * s.right_vectors.col(i) - s.eigenvalues[i] * s.right_vectors.col(i)).norm();
}

BlochMode mode_at(const PeriodicPotential& V, double k, int index, int J = 24) {
  const auto s = solve(assemble(V, k, J));
  return make_mode(s, index, assemble_adjoint(V, k, J));
}

}  // namespace

TEST_CASE("free spectrum at k = 0") {
  const auto s = solve(assemble(PeriodicPotential{}, 0.0, 3));
  const double expect[] = {0, 1, 1, 4, 4, 9, 9};
  for (int i = 0; i < 7; ++i) CHECK(std::abs(s.eigenvalues[i] - expect[i]) < 1e-13);
}

TEST_CASE("free spectrum at k = 0.3 is sorted") {
  const auto s = solve(assemble(PeriodicPotential{}, 0.3, 6));
  std::vector<double> expect;
  for (int j = -6; j <= 6; ++j) expect.push_back((j + 0.3) * (j + 0.3));
  std::sort(expect.begin(), expect.end());
  CHECK(std::abs(expect[0] - 0.09) < 1e-15);
  CHECK(std::abs(expect[1] - 0.49) < 1e-15);
  CHECK(std::abs(expect[2] - 1.69) < 1e-15);
  for (int i = 0; i < s.size(); ++i) CHECK(std::abs(s.eigenvalues[i] - expect[i]) < 1e-12);
}

TEST_CASE("model potential gamma = 1.5: the two lowest eigenvalues at k = 0 are a conjugate pair") {
  const auto s = solve(assemble(testing::model_potential(1.5), 0.0, 24));
  CHECK(std::abs(s.eigenvalues[0].imag()) > 0.1);
  CHECK(std::abs(s.eigenvalues[0] - std::conj(s.eigenvalues[1])) < 1e-10);
  CHECK(s.eigenvalues[0].imag() < 0.0);  // ties in Re ordered by Im
}

TEST_CASE("eigenpair residuals stay below 1e-9 ||M||") {
  for (double g : {0.0, 1.0, 1.5})
    for (double k : {-0.5, -0.1, 0.0, 0.25, 0.5}) {
      const auto m = assemble(testing::model_potential(g), k, 24);
      const auto s = solve(m);
      for (int i = 0; i < s.size(); ++i) CHECK(residual(m, s, i) <= 1e-9 * s.matrix_norm);
    }
}

TEST_CASE("classify examples") {
  const auto all_real = classify(solve(assemble(testing::two_cos(), 0.2, 8)), 1e-8);
  CHECK(all_real.real.size() == 17);
  CHECK(all_real.pairs.empty());

  const auto c = classify(std::vector<cplx>{{1, 0.1}, {1, -0.1}, {2, 0}}, 1e-8);
  CHECK(c.real == std::vector<int>{2});
  REQUIRE(c.pairs.size() == 1);
  CHECK(c.pairs[0] == std::pair<int, int>{0, 1});

  CHECK_THROWS_AS(classify(std::vector<cplx>{{1, 0.1}, {2, 0}}, 1e-8), SolverError);

  // 0.2 i sin 2x at k = 0: the eigenvalues near 1 form one pair
  const auto V = PeriodicPotential({{2, 0.1}, {-2, -0.1}});
  const auto s = solve(assemble(V, 0.0, 24));
  const auto cls = classify(s, 1e-8);
  int near_one = 0;
  for (auto [a, b] : cls.pairs)
    if (std::abs(s.eigenvalues[a] - 1.0) < 0.2) {
      ++near_one;
      CHECK(std::abs(s.eigenvalues[b] - 1.0) < 0.2);
    }
  CHECK(near_one == 1);
}

TEST_CASE("free ground mode is the normalized constant") {
  const auto mode = fix_pt_phase(mode_at(PeriodicPotential{}, 0.0, 0, 4));
  const double c = 1.0 / std::sqrt(kTwoPi);
  CHECK(std::abs(mode.omega) < 1e-14);
  for (int a = 0; a < mode.p_coeffs.size(); ++a) {
    const double expect = a == 4 ? c : 0.0;
    CHECK(std::abs(mode.p_coeffs[a] - expect) < 1e-14);
    CHECK(std::abs(mode.pstar_coeffs[a] - expect) < 1e-14);
  }
}

TEST_CASE("band 3 of model potential gamma = 1.5 at k = 0 is PT-phase fixable") {
  const auto mode = fix_pt_phase(mode_at(testing::model_potential(1.5), 0.0, 2));
  CHECK(std::abs(mode.omega.imag()) < 1e-10);
  CHECK(max_imag_coeff(mode.p_coeffs) <= 1e-8);
  CHECK(std::abs(l2_norm(mode.p_coeffs) - 1.0) <= 1e-12);
  CHECK(std::abs(inner(mode.p_coeffs, mode.pstar_coeffs) - 1.0) <= 1e-10);
}

TEST_CASE("reflection identity for 2cos x, lowest band at k = 1/2") {
  // p*(x, k) = p(-x, -k). With -1/2 = 1/2 - 1, the coefficients of
  // p(-x, -1/2) are pi_{-j-1}(1/2); for a real potential p* = p.
  const int J = 24;
  const auto mode = fix_pt_phase(mode_at(testing::two_cos(), 0.5, 0, J));
  Eigen::VectorXcd reflected = Eigen::VectorXcd::Zero(2 * J + 1);
  for (int j = -J; j <= J; ++j)
    if (-j - 1 >= -J) reflected[j + J] = mode.p_coeffs[-j - 1 + J];
  const double sign = std::real(reflected.dot(mode.pstar_coeffs)) >= 0 ? 1.0 : -1.0;
  CHECK((mode.pstar_coeffs - sign * reflected).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fix_pt_phase examples") {
  auto mode = mode_at(testing::model_potential(1.0), 0.25, 0);
  const auto fixed = fix_pt_phase(mode);
  CHECK(max_imag_coeff(fixed.p_coeffs) <= 1e-8);
  // already real: unchanged up to sign
  const auto again = fix_pt_phase(fixed);
  CHECK(std::min((again.p_coeffs - fixed.p_coeffs).norm(), (again.p_coeffs + fixed.p_coeffs).norm()) <
        1e-14);
  // a rotation by e^{i pi/3} is undone
  BlochMode rotated = fixed;
  const cplx phase = std::polar(1.0, kPi / 3);
  rotated.p_coeffs *= phase;
  rotated.pstar_coeffs *= phase;
  const auto back = fix_pt_phase(rotated);
  CHECK(max_imag_coeff(back.p_coeffs) <= 1e-8);
  CHECK(std::min((back.p_coeffs - fixed.p_coeffs).norm(), (back.p_coeffs + fixed.p_coeffs).norm()) <
        1e-12);
}

TEST_CASE("fix_pt_phase succeeds on the lowest five bands at 21 k-points (gamma = 1)") {
  const auto V = testing::model_potential(1.0);
  for (int t = 0; t <= 20; ++t) {
    const double k = -0.5 + t / 20.0;
    const auto s = solve(assemble(V, k, 24));
    const auto adj = assemble_adjoint(V, k, 24);
    for (int b = 0; b < 5; ++b) {
      if (b + 1 < s.size() && std::abs(s.eigenvalues[b + 1] - s.eigenvalues[b]) < 1e-6 * s.matrix_norm)
        continue;
      if (b > 0 && std::abs(s.eigenvalues[b] - s.eigenvalues[b - 1]) < 1e-6 * s.matrix_norm) continue;
      const auto mode = fix_pt_phase(make_mode(s, b, adj));
      INFO("k=" << k << " band " << b + 1);
      CHECK(max_imag_coeff(mode.p_coeffs) <= 1e-8);
    }
  }
}

TEST_CASE("biorthogonality across distinct eigenvalues") {
  const auto V = testing::model_potential(1.0);
  for (double k : {0.0, 0.5}) {
    const auto s = solve(assemble(V, k, 24));
    const auto adj = assemble_adjoint(V, k, 24);
    std::vector<BlochMode> modes;
    for (int b = 0; b < 5; ++b) modes.push_back(make_mode(s, b, adj));
    for (int n = 0; n < 5; ++n)
      for (int m = 0; m < 5; ++m) {
        const cplx v = inner(modes[m].p_coeffs, modes[n].pstar_coeffs);
        if (n == m)
          CHECK(std::abs(v - 1.0) <= 1e-10);
        else
          CHECK(std::abs(v) <= 1e-8);
      }
  }
}

TEST_CASE("make_mode refuses a degenerate eigenvalue") {
  const auto s = solve(assemble(PeriodicPotential{}, 0.0, 4));
  CHECK_THROWS_AS(make_mode(s, 1, assemble_adjoint(PeriodicPotential{}, 0.0, 4)), SolverError);
}

TEST_CASE("refine_eigenvalue polishes a perturbed guess") {
  const auto m = assemble(testing::model_potential(1.0), 0.17, 24);
  const auto s = solve(m);
  Eigen::VectorXcd v = s.right_vectors.col(2) + 1e-6 * Eigen::VectorXcd::Ones(49);
  const cplx w = refine_eigenvalue(m, s.eigenvalues[2] + 1e-7, v);
  CHECK(std::abs(w - s.eigenvalues[2]) < 1e-12);
}
