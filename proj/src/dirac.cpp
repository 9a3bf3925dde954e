#include "ptbands/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "ptbands/discretize.hpp"
#include "ptbands/eigensolve.hpp"
#include "ptbands/error.hpp"
#include "ptbands/grid.hpp"
#include "ptbands/parallel.hpp"

namespace ptbands {

Eigen::VectorXcd apply_parity(const Eigen::VectorXcd& v, int J, double k0) {
  const int shift = std::abs(k0) < 1e-12 ? 0 : 1;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int j = -J; j <= J; ++j) {
    const int src = -j - shift;
    if (src >= -J && src <= J) out[j + J] = v[src + J];
  }
  return out;
}

Eigen::VectorXcd multiply(const PeriodicPotential& W, const Eigen::VectorXcd& f, int J) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(f.size());
  for (const auto& [d, w] : W.coeffs())
    for (int j = -J; j <= J; ++j) {
      const int src = j - d;
      if (src >= -J && src <= J) out[j + J] += w * f[src + J];
    }
  return out;
}

namespace {

void check_real_even(const PeriodicPotential& U) {
  for (const auto& [j, c] : U.coeffs()) {
    if (std::abs(c.imag()) > 1e-14 || std::abs(c - U.coeff(-j)) > 1e-14)
      throw ConfigError("find_dirac_points: potential must be real and even (gamma = 0)");
  }
}

// Rotates by a global phase so the largest coefficient becomes `target` times
// a positive number.
Eigen::VectorXcd align_phase(const Eigen::VectorXcd& v, cplx target) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const cplx phase = target * std::abs(v[imax]) / v[imax];
  return v * phase;
}

}  // namespace

std::vector<DiracPoint> find_dirac_points(const BandStructure& bs, double tol,
                                          std::vector<std::string>* skipped) {
  check_real_even(bs.potential);
  const double norm = std::sqrt(kTwoPi);
  auto skip = [&](const std::string& why) {
    if (skipped) skipped->push_back(why);
  };
  std::vector<DiracPoint> out;
  for (double k0 : {0.0, 0.5}) {
    const int i = bs.k_index(k0);
    if (i < 0) continue;
    const auto& vals = bs.raw_window[i];
    const int n = static_cast<int>(vals.size());
    for (int m = 0; m + 1 < n; ++m) {
      if (std::abs(vals[m + 1] - vals[m]) > tol) continue;
      char where[96];
      std::snprintf(where, sizeof where, "k0 = %g, omega = %.10g", k0, vals[m].real());
      if (m + 2 < n && std::abs(vals[m + 2] - vals[m]) <= tol) {
        skip(std::string(where) + ": eigenspace dimension > 2");
        m += 2;
        continue;
      }
      // the matrix of a real even potential is real symmetric
      const Eigen::MatrixXd M = assemble(bs.potential, k0, bs.J).entries.real();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
      const double mu_guess = 0.5 * (vals[m] + vals[m + 1]).real();
      std::vector<int> idx;
      for (int t = 0; t < es.eigenvalues().size(); ++t)
        if (std::abs(es.eigenvalues()[t] - mu_guess) <= std::max(10 * tol, 1e-9)) idx.push_back(t);
      if (idx.size() != 2) {
        skip(std::string(where) + ": eigenspace dimension " + std::to_string(idx.size()));
        ++m;
        continue;
      }
      Eigen::MatrixXcd B(M.rows(), 2);
      B.col(0) = es.eigenvectors().col(idx[0]).cast<cplx>();
      B.col(1) = es.eigenvectors().col(idx[1]).cast<cplx>();
      Eigen::Matrix2d P;
      for (int c = 0; c < 2; ++c) {
        const Eigen::VectorXcd Pb = apply_parity(B.col(c), bs.J, k0);
        for (int r = 0; r < 2; ++r) P(r, c) = B.col(r).dot(Pb).real();
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ps(0.5 * (P + P.transpose()));
      if (std::abs(ps.eigenvalues()[0] + 1.0) > 1e-6 || std::abs(ps.eigenvalues()[1] - 1.0) > 1e-6) {
        skip(std::string(where) + ": eigenspace is not split by parity");
        ++m;
        continue;
      }
      DiracPoint dp;
      dp.k0 = k0;
      dp.mu = 0.5 * (es.eigenvalues()[idx[0]] + es.eigenvalues()[idx[1]]);
      dp.band_lower = m + 1;
      dp.J = bs.J;
      dp.gap = std::abs(vals[m + 1] - vals[m]);
      Eigen::VectorXcd plus = B * ps.eigenvectors().col(1).cast<cplx>();
      Eigen::VectorXcd minus = B * ps.eigenvectors().col(0).cast<cplx>();
      dp.phi_plus = align_phase(plus, 1.0) / (norm * plus.norm());
      dp.phi_minus = align_phase(minus, cplx(0.0, 1.0)) / (norm * minus.norm());
      out.push_back(std::move(dp));
      ++m;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DiracPoint& l, const DiracPoint& r) { return l.mu < r.mu; });
  return out;
}

Eigen::Matrix2cd mw_matrix(const Eigen::Matrix<cplx, Eigen::Dynamic, 2>& basis,
                           const PeriodicPotential& W, int J) {
  Eigen::Matrix2cd M;
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXcd Wc = multiply(W, basis.col(c), J);
    for (int r = 0; r < 2; ++r) M(r, c) = inner(Wc, basis.col(r));
  }
  return M;
}

Eigen::Matrix2cd mw_matrix(const DiracPoint& dp, const PeriodicPotential& W) {
  Eigen::Matrix<cplx, Eigen::Dynamic, 2> basis(dp.phi_plus.size(), 2);
  basis.col(0) = dp.phi_plus;
  basis.col(1) = dp.phi_minus;
  return mw_matrix(basis, W, dp.J);
}

Eigen::Matrix2cd mw_matrix(const DiracPoint& dp, const PotentialParts& W_parts) {
  return mw_matrix(dp, odd_part(W_parts));
}

namespace {

std::array<cplx, 2> sorted_by_im(cplx x, cplx y) {
  if (x.imag() < y.imag() || (x.imag() == y.imag() && x.real() < y.real())) std::swap(x, y);
  return {x, y};
}

}  // namespace

SplittingPrediction predict_splitting(const DiracPoint& dp, const PeriodicPotential& W,
                                      double gamma) {
  if (!(std::abs(gamma) <= 0.5))
    throw ConfigError("predict_splitting: |gamma| must not exceed 0.5");
  const Eigen::Matrix2cd M = mw_matrix(dp, W);
  const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(cplx(0.0, gamma) * M);
  SplittingPrediction pred;
  pred.regime = SplittingRegime::Perturbative;
  pred.k0 = dp.k0;
  pred.mu = dp.mu;
  pred.gamma = gamma;
  pred.leading = sorted_by_im(dp.mu + es.eigenvalues()[0], dp.mu + es.eigenvalues()[1]);
  pred.inconclusive = std::max(std::abs(M(0, 1)), std::abs(M(1, 0))) <= 1e-12;
  return pred;
}

SplittingPrediction predict_splitting(const DiracPoint& dp, const PotentialParts& W_parts,
                                      double gamma) {
  return predict_splitting(dp, odd_part(W_parts), gamma);
}

std::array<cplx, 2> measure_splitting(const PeriodicPotential& p, double k0, double mu, int J) {
  const Spectrum s = solve(assemble(p, k0, J));
  std::vector<int> order(s.size());
  for (int i = 0; i < s.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(s.eigenvalues[x] - mu) < std::abs(s.eigenvalues[y] - mu);
  });
  if (s.size() < 2 || std::abs(s.eigenvalues[order[1]] - mu) >= 1.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "measure_splitting: fewer than two eigenvalues within 1 of %.10g", mu);
    throw SolverError(buf);
  }
  return sorted_by_im(s.eigenvalues[order[0]], s.eigenvalues[order[1]]);
}

void attach_measurement(SplittingPrediction& pred, const std::array<cplx, 2>& measured) {
  pred.measured = measured;
  const double pim = pred.predicted_im();
  if (pim > 1e-14) {
    pred.relative_gap = std::abs(std::abs(measured[0].imag()) - pim) / pim;
    return;
  }
  const double center = pred.regime == SplittingRegime::Perturbative ? pred.mu : 0.0;
  const double pre = std::abs(pred.leading[0].real() - center);
  const double mre = std::max(std::abs(measured[0].real() - pred.mu),
                              std::abs(measured[1].real() - pred.mu));
  pred.relative_gap = pre > 1e-14 ? std::abs(mre - pre) / pre : NAN;
}

PeriodicPotential perturbed(const PeriodicPotential& U, const PeriodicPotential& W, double gamma) {
  std::map<int, cplx> c = U.coeffs();
  for (const auto& [j, w] : W.coeffs()) c[j] += cplx(0.0, gamma) * w;
  return PeriodicPotential(std::move(c));
}

SlopeEstimate gamma_slope(const DiracPoint& dp, const PeriodicPotential& U,
                          const PeriodicPotential& W, double gamma0) {
  SlopeEstimate est;
  est.gammas = {gamma0, 2 * gamma0, 4 * gamma0};
  for (int t = 0; t < 3; ++t) {
    const auto meas = measure_splitting(perturbed(U, W, est.gammas[t]), dp.k0, dp.mu, dp.J);
    est.im_over_gamma[t] = std::abs(meas[0].imag()) / est.gammas[t];
  }
  const auto& g = est.im_over_gamma;
  const double r1 = (4 * g[0] - g[1]) / 3, r2 = (4 * g[1] - g[2]) / 3;
  est.slope = (16 * r1 - r2) / 15;
  const Eigen::Matrix2cd M = mw_matrix(dp, W);
  est.predicted = std::abs(M(1, 0));
  return est;
}

std::vector<HighBandRow> prop3_scan(const std::vector<double>& a, const std::vector<double>& b,
                                    double gamma, int m_first, int m_last, int J,
                                    double tol_real) {
  if (m_first < 1 || m_last < m_first) throw ConfigError("prop3_scan: invalid m range");
  if (J < 2 * m_last + 16)
    throw ConfigError("prop3_scan: J = " + std::to_string(J) + " too small for m = " +
                      std::to_string(m_last) + " (need J >= " + std::to_string(2 * m_last + 16) +
                      ")");
  PotentialParts parts{a, b, gamma, SineConvention::Prop3Doubled};
  const PeriodicPotential V = from_parts(parts);
  if (V.max_harmonic() > J)
    throw ConfigError("prop3_scan: J = " + std::to_string(J) + " is below the number of harmonics");
  auto coef = [](const std::vector<double>& s, int j) {
    return j >= 1 && j <= static_cast<int>(s.size()) ? s[j - 1] : 0.0;
  };
  const double c0 = V.coeff(0).real();
  return parallel_map(static_cast<std::size_t>(m_last - m_first + 1), [&](std::size_t t) {
    const int m = m_first + static_cast<int>(t);
    HighBandRow row;
    row.m = m;
    auto& pred = row.prediction;
    pred.regime = SplittingRegime::HighBand;
    pred.k0 = 0.0;
    pred.mu = static_cast<double>(m) * m + c0;
    pred.gamma = gamma;
    const double a2 = coef(a, 2 * m), b2 = coef(b, 2 * m);
    const cplx omega = std::sqrt(cplx(a2 * a2 - gamma * gamma * b2 * b2, 0.0));
    pred.leading = sorted_by_im(omega, -omega);
    const double am = coef(a, m), bm = coef(b, m);
    row.literal_offset = std::sqrt(cplx(am * am - gamma * gamma * bm * bm, 0.0));
    row.gamma_b_m = std::abs(gamma * bm);
    attach_measurement(pred, measure_splitting(V, 0.0, pred.mu, J));
    const cplx top = (*pred.measured)[0];
    row.measured_complex = std::abs(top.imag()) > real_tolerance(tol_real, top);
    row.ratio_to_gamma_b_m = row.gamma_b_m > 0.0 ? std::abs(top.imag()) / row.gamma_b_m : NAN;
    return row;
  });
}

DiracRow to_row(const SplittingPrediction& pred) {
  DiracRow r;
  r.k0 = pred.k0;
  r.mu = pred.mu;
  r.gamma = pred.gamma;
  r.pred_im = pred.predicted_im();
  if (pred.measured) {
    r.meas_re_plus = (*pred.measured)[0].real();
    r.meas_im_plus = (*pred.measured)[0].imag();
  }
  r.rel_gap = pred.relative_gap;
  return r;
}

void write_dirac_csv(std::ostream& os, const std::vector<DiracRow>& rows) {
  auto g17 = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "k0,mu,gamma,pred_im,meas_re_plus,meas_im_plus,rel_gap\n";
  for (const auto& r : rows)
    os << g17(r.k0) << ',' << g17(r.mu) << ',' << g17(r.gamma) << ',' << g17(r.pred_im) << ','
       << g17(r.meas_re_plus) << ',' << g17(r.meas_im_plus) << ',' << g17(r.rel_gap) << '\n';
}

nlohmann::json to_json(const DiracPoint& dp) {
  return {{"k0", dp.k0},
          {"mu", dp.mu},
          {"bands", {dp.band_lower, dp.band_lower + 1}},
          {"gap", dp.gap}};
}

}  // namespace ptbands
