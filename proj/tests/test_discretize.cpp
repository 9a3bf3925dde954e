#include <doctest.h>

#include <cmath>

#include "ptbands/discretize.hpp"
#include "ptbands/eigensolve.hpp"
#include "ptbands/error.hpp"
#include "support.hpp"

using namespace ptbands;

TEST_CASE("free operator at k = 0, J = 2") {
  const auto m = assemble(PeriodicPotential{}, 0.0, 2);
  Eigen::VectorXcd expect(5);
  expect << 4, 1, 0, 1, 4;
  CHECK((m.entries - Eigen::MatrixXcd(expect.asDiagonal())).norm() == 0.0);
}

TEST_CASE("free operator at k = 1/2, J = 1") {
  const auto m = assemble(PeriodicPotential{}, 0.5, 1);
  CHECK(std::abs(m.entries(0, 0) - 0.25) == 0.0);
  CHECK(std::abs(m.entries(1, 1) - 0.25) == 0.0);
  CHECK(std::abs(m.entries(2, 2) - 2.25) == 0.0);
  CHECK(std::abs(m.entries(0, 1)) == 0.0);
}

TEST_CASE("2cos x gives a tridiagonal matrix with unit off-diagonals") {
  const int J = 6;
  const auto m = assemble(testing::two_cos(), 0.0, J);
  for (int a = 0; a < 2 * J + 1; ++a)
    for (int b = 0; b < 2 * J + 1; ++b) {
      const int j = a - J;
      cplx expect = 0.0;
      if (a == b) expect = double(j * j);
      if (std::abs(a - b) == 1) expect = 1.0;
      CHECK(m.entries(a, b) == expect);
    }
}

TEST_CASE("adjoint is the conjugate transpose") {
  const auto V = testing::model_potential(1.5);
  const auto m = assemble(V, 0.3, 8), ma = assemble_adjoint(V, 0.3, 8);
  CHECK((ma.entries - m.entries.adjoint()).norm() == 0.0);
  // real entries: adjoint equals transpose
  CHECK((ma.entries - m.entries.transpose()).norm() == 0.0);
  const auto u = assemble(testing::model_potential(0.0), 0.3, 8);
  CHECK((assemble_adjoint(testing::model_potential(0.0), 0.3, 8).entries - u.entries).norm() == 0.0);
  const auto f = assemble(PeriodicPotential{}, 0.1, 4);
  CHECK((assemble_adjoint(PeriodicPotential{}, 0.1, 4).entries - f.entries).norm() == 0.0);
}

TEST_CASE("assemble rejects truncated harmonics and k outside the zone") {
  CHECK_THROWS_AS(assemble(testing::model_potential(1.0), 0.0, 1), SolverError);
  CHECK_THROWS_AS(assemble(testing::model_potential(1.0), 0.6, 8), SolverError);
  CHECK_NOTHROW(assemble(testing::model_potential(1.0), -0.5, 8));
}

TEST_CASE("PT potentials assemble to real matrices") {
  for (double g : {0.0, 0.7, 1.0, 1.5, 4.0})
    for (double k : {-0.5, -0.2, 0.0, 0.35, 0.5})
      CHECK(max_imag_entry(assemble(testing::model_potential(g), k, 16)) <= 1e-14);
}

TEST_CASE("diagonal approaches the free symbol away from the potential's band") {
  const auto m = assemble(testing::model_potential(1.0), 0.25, 20);
  for (int j : {-20, -19, 19, 20}) {
    const int a = j + 20;
    CHECK(m.entries(a, a) == cplx((j + 0.25) * (j + 0.25)));
  }
}

TEST_CASE("spectral convergence under J -> J + 8") {
  // Lowest 2J - 8 eigenvalues; members of a near-coalescing cluster are
  // ill-conditioned individually, so clusters are compared through their mean.
  for (double g : {0.0, 1.0, 1.5})
    for (int J : {24, 32})
      for (double k : {0.0, 0.2, 0.5}) {
        const auto a = solve(assemble(testing::model_potential(g), k, J));
        const auto b = solve(assemble(testing::model_potential(g), k, J + 8));
        const int n = 2 * J - 8;
        double worst = 0.0;
        for (int i = 0; i < n;) {
          int e = i + 1;
          while (e < n && std::abs(a.eigenvalues[e] - a.eigenvalues[e - 1]) < 1e-5) ++e;
          cplx sa = 0.0, sb = 0.0;
          for (int q = i; q < e; ++q) {
            sa += a.eigenvalues[q];
            sb += b.eigenvalues[q];
          }
          worst = std::max(worst, std::abs(sa - sb) / double(e - i));
          i = e;
        }
        INFO("gamma=" << g << " J=" << J << " k=" << k);
        CHECK(worst <= 1e-10);
      }
}
