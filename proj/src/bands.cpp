#include "ptbands/bands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ptbands/discretize.hpp"
#include "ptbands/error.hpp"
#include "ptbands/parallel.hpp"

namespace ptbands {

int BandStructure::k_index(double k) const {
  for (int i = 0; i < n_k(); ++i)
    if (std::abs(k_grid[i] - k) < 1e-12) return i;
  return -1;
}

const BandEdge& BandEdgeReport::edge(char which) const {
  for (const auto& e : edges)
    if (e.which == which) return e;
  throw AssumptionError(std::string("band ") + std::to_string(m) + " has no edge '" + which + "'");
}

BandStructure compute_bands(const PeriodicPotential& p, int J, int N_k, int n_bands) {
  if (N_k < 16 || N_k % 2 != 0)
    throw SolverError("compute_bands: N_k must be even and >= 16, got " + std::to_string(N_k));
  if (n_bands < 1 || n_bands > 2 * J + 1)
    throw SolverError("compute_bands: n_bands out of range");

  BandStructure bs;
  bs.potential = p;
  bs.J = J;
  bs.n_bands = n_bands;
  for (int i = 0; i < N_k; ++i) bs.k_grid.push_back(-0.5 + static_cast<double>(i + 1) / N_k);
  bs.k_grid[N_k / 2 - 1] = 0.0;
  bs.k_grid[N_k - 1] = 0.5;

  const auto spectra = parallel_map(static_cast<std::size_t>(N_k), [&](std::size_t i) {
    return solve(assemble(p, bs.k_grid[i], J));
  });

  bs.omega.assign(n_bands, std::vector<cplx>(N_k));
  bs.vectors.assign(n_bands, std::vector<Eigen::VectorXcd>(N_k));
  bs.overlap.assign(n_bands, std::vector<double>(N_k, 1.0));
  bs.tracking_quality.assign(N_k, 1.0);
  bs.raw_window.resize(N_k);
  for (int i = 0; i < N_k; ++i)
    for (int b = 0; b < n_bands; ++b) bs.raw_window[i].push_back(spectra[i].eigenvalues[b]);

  for (int b = 0; b < n_bands; ++b) {
    bs.omega[b][0] = spectra[0].eigenvalues[b];
    bs.vectors[b][0] = spectra[0].right_vectors.col(b);
  }

  // Each band keeps its own reference: the eigenvector at its last
  // unambiguous match. Exceptional points then only stall the bands that
  // take part in them.
  std::vector<Eigen::VectorXcd> ref(n_bands);
  std::vector<cplx> ref_value(n_bands);
  for (int b = 0; b < n_bands; ++b) {
    ref[b] = bs.vectors[b][0];
    ref_value[b] = bs.omega[b][0];
  }
  for (int i = 1; i < N_k; ++i) {
    Eigen::MatrixXd ov(n_bands, n_bands);
    for (int b = 0; b < n_bands; ++b)
      for (int c = 0; c < n_bands; ++c)
        ov(b, c) = std::abs(ref[b].dot(spectra[i].right_vectors.col(c)));
    std::vector<bool> band_done(n_bands, false), col_done(n_bands, false);
    std::vector<int> col(n_bands);
    double quality = 1.0;
    for (int step = 0; step < n_bands; ++step) {
      int bb = -1, cc = -1;
      double best = -1.0, best_dist = 0.0;
      for (int b = 0; b < n_bands; ++b) {
        if (band_done[b]) continue;
        for (int c = 0; c < n_bands; ++c) {
          if (col_done[c]) continue;
          const double dist = std::abs(spectra[i].eigenvalues[c] - ref_value[b]);
          // near-equal overlaps are resolved by eigenvalue proximity
          if (ov(b, c) > best + 1e-3 || (ov(b, c) > best - 1e-3 && dist < best_dist)) {
            best = std::max(best, ov(b, c));
            best_dist = dist;
            bb = b;
            cc = c;
          }
        }
      }
      band_done[bb] = col_done[cc] = true;
      col[bb] = cc;
      bs.omega[bb][i] = spectra[i].eigenvalues[cc];
      bs.vectors[bb][i] = spectra[i].right_vectors.col(cc);
      bs.overlap[bb][i] = ov(bb, cc);
      quality = std::min(quality, ov(bb, cc));
    }
    // Bands whose references overlap their assigned columns about equally
    // (typically after passing an exceptional point together) are relabeled
    // in sorted order.
    std::vector<int> comp(n_bands);
    for (int b = 0; b < n_bands; ++b) comp[b] = b;
    auto find = [&](int b) {
      while (comp[b] != b) b = comp[b] = comp[comp[b]];
      return b;
    };
    for (int b = 0; b < n_bands; ++b)
      for (int c = 0; c < n_bands; ++c)
        if (c != b && std::abs(ov(b, col[c]) - ov(b, col[b])) < 0.1) comp[find(b)] = find(c);
    for (int root = 0; root < n_bands; ++root) {
      std::vector<int> members;
      for (int b = 0; b < n_bands; ++b)
        if (find(b) == root) members.push_back(b);
      if (members.size() < 2) continue;
      std::vector<int> cols;
      for (int b : members) cols.push_back(col[b]);
      std::sort(cols.begin(), cols.end(), [&](int x, int y) {
        const cplx zx = spectra[i].eigenvalues[x], zy = spectra[i].eigenvalues[y];
        return zx.real() != zy.real() ? zx.real() < zy.real() : zx.imag() < zy.imag();
      });
      for (std::size_t t = 0; t < members.size(); ++t) {
        const int b = members[t], c = cols[t];
        bs.omega[b][i] = spectra[i].eigenvalues[c];
        bs.vectors[b][i] = spectra[i].right_vectors.col(c);
        bs.overlap[b][i] = std::min(bs.overlap[b][i], ov(b, c));
      }
    }
    // conjugate pairs: the member with negative imaginary part comes first
    for (int b = 0; b < n_bands; ++b)
      for (int c = b + 1; c < n_bands; ++c) {
        const cplx zb = bs.omega[b][i], zc = bs.omega[c][i];
        if (zb.imag() > 0.0 && std::abs(zb - std::conj(zc)) <= 1e-8 * std::max(1.0, std::abs(zb))) {
          std::swap(bs.omega[b][i], bs.omega[c][i]);
          std::swap(bs.vectors[b][i], bs.vectors[c][i]);
          std::swap(bs.overlap[b][i], bs.overlap[c][i]);
        }
      }
    bs.tracking_quality[i] = quality;
    for (int b = 0; b < n_bands; ++b) {
      if (bs.overlap[b][i] >= 0.5) {
        ref[b] = bs.vectors[b][i];
        ref_value[b] = bs.omega[b][i];
      }
    }
  }
  return bs;
}

namespace {

Eigen::VectorXcd shift_coeffs(const Eigen::VectorXcd& v, int n) {
  // pi_j(k' + n) = pi_{j+n}(k')
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int a = 0; a < v.size(); ++a) {
    const int src = a + n;
    if (src >= 0 && src < v.size()) out[a] = v[src];
  }
  return out;
}

}  // namespace

MatchedEigenvalue matched_eigenvalue(const PeriodicPotential& p, double k, int J,
                                     const Eigen::VectorXcd& reference) {
  const int shift = static_cast<int>(std::lround(k));
  const double k_red = k - shift;
  const auto m = assemble(p, k_red, J);
  const Spectrum s = solve(m);
  int best = 0;
  double best_ov = -1.0;
  for (int i = 0; i < s.size(); ++i) {
    const double ov = std::abs(reference.dot(shift_coeffs(s.right_vectors.col(i), shift)));
    if (ov > best_ov) {
      best_ov = ov;
      best = i;
    }
  }
  Eigen::VectorXcd v = s.right_vectors.col(best);
  MatchedEigenvalue out;
  out.omega = refine_eigenvalue(m, s.eigenvalues[best], v);
  out.overlap = best_ov / reference.norm();
  return out;
}

SecondDerivative second_derivative_estimate(const PeriodicPotential& p, int m, double k0, int J,
                                            double h, double tol_real) {
  const auto mat = assemble(p, k0, J);
  const Spectrum s = solve(mat);
  if (m < 1 || m > s.size()) throw SolverError("second_derivative: band index out of range");
  Eigen::VectorXcd v0 = s.right_vectors.col(m - 1);
  const cplx w0 = refine_eigenvalue(mat, s.eigenvalues[m - 1], v0);
  if (std::abs(w0.imag()) > real_tolerance(tol_real, w0))
    throw AssumptionError("second_derivative: omega is complex at k0 = " + std::to_string(k0));

  auto sample = [&](double k) {
    const auto r = matched_eigenvalue(p, k, J, v0);
    if (r.overlap < 0.9)
      throw SolverError("second_derivative: lost track of band near k = " + std::to_string(k));
    if (std::abs(r.omega.imag()) > real_tolerance(tol_real, r.omega))
      throw AssumptionError("second_derivative: omega is complex at sample k = " +
                            std::to_string(k));
    return r.omega.real();
  };
  const double fp1 = sample(k0 + h), fm1 = sample(k0 - h);
  const double fp2 = sample(k0 + h / 2), fm2 = sample(k0 - h / 2);
  const double d_h = (fp1 + fm1 - 2 * w0.real()) / (h * h);
  const double d_h2 = (fp2 + fm2 - 2 * w0.real()) / (h * h / 4);
  SecondDerivative out;
  out.value = (4 * d_h2 - d_h) / 3;
  out.error_estimate = std::abs(out.value - d_h2);
  out.first_derivative = (fp2 - fm2) / h;
  return out;
}

double second_derivative(const PeriodicPotential& p, int m, double k0, int J) {
  return second_derivative_estimate(p, m, k0, J).value;
}

BandEdgeReport check_assumption(const BandStructure& bs, int m, double tol_real) {
  BandEdgeReport r;
  r.m = m;
  if (m < 1 || m > bs.n_bands) {
    r.failures.push_back("band index outside the computed window");
    return r;
  }
  const auto& band = bs.omega[m - 1];
  const int nk = bs.n_k();

  for (int i = 0; i < nk; ++i) {
    if (bs.overlap[m - 1][i] < 0.5) r.tracked = false;
    const double im = std::abs(band[i].imag());
    if (im > r.max_imag) {
      r.max_imag = im;
      r.witness_k = bs.k_grid[i];
    }
  }
  r.is_real = true;
  for (int i = 0; i < nk; ++i)
    if (std::abs(band[i].imag()) > real_tolerance(tol_real, band[i])) r.is_real = false;
  if (!r.tracked) r.failures.push_back("ambiguous band tracking (overlap < 0.5)");
  if (!r.is_real)
    r.failures.push_back("band is not real: |Im omega| = " + std::to_string(r.max_imag) +
                         " at k = " + std::to_string(r.witness_k));

  int i_min = 0, i_max = 0;
  for (int i = 1; i < nk; ++i) {
    if (band[i].real() < band[i_min].real()) i_min = i;
    if (band[i].real() > band[i_max].real()) i_max = i;
  }
  const double a = band[i_min].real(), b = band[i_max].real();

  r.isolation_gap = std::numeric_limits<double>::infinity();
  r.simplicity_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nk; ++i) {
    for (int c = 0; c < bs.n_bands; ++c) {
      if (c == m - 1) continue;
      const cplx z = bs.omega[c][i];
      const double dx = std::max({a - z.real(), 0.0, z.real() - b});
      r.isolation_gap = std::min(r.isolation_gap, std::hypot(dx, z.imag()));
      r.simplicity_margin = std::min(r.simplicity_margin, std::abs(z - band[i]));
    }
  }
  if (bs.n_bands == 1) r.isolation_gap = r.simplicity_margin = 0.0;
  if (!(r.isolation_gap > BandEdgeReport::kIsolationThreshold))
    r.failures.push_back("band is not isolated: gap " + std::to_string(r.isolation_gap));
  if (!(r.simplicity_margin > 1e-6))
    r.failures.push_back("band is not simple: margin " + std::to_string(r.simplicity_margin));
  // Edges are still located for real bands that fail isolation or
  // simplicity; callers may want the local edge data.
  if (!r.is_real || !r.tracked) return r;

  for (auto [idx, which] : {std::pair{i_min, 'a'}, std::pair{i_max, 'b'}}) {
    BandEdge e;
    e.k0 = bs.k_grid[idx];
    e.which = which;
    e.omega_star = band[idx].real();
    if (std::abs(e.k0) > 1e-12 && std::abs(e.k0 - 0.5) > 1e-12) {
      r.failures.push_back(std::string("edge ") + which + " attained at interior k = " +
                           std::to_string(e.k0));
      continue;
    }
    // position of this band in the sorted spectrum at k0
    int sorted_pos = 1;
    for (const cplx z : bs.raw_window[idx])
      if (z.real() < e.omega_star - 1e-12) ++sorted_pos;
    SecondDerivative d;
    try {
      d = second_derivative_estimate(bs.potential, sorted_pos, e.k0, bs.J, 1e-3, tol_real);
    } catch (const Error& err) {
      r.failures.push_back(std::string("edge ") + which + ": " + err.what());
      continue;
    }
    e.curvature = d.value;
    e.curvature_error = d.error_estimate;
    e.slope = d.first_derivative;
    if (std::abs(e.slope) > 1e-6)
      r.failures.push_back(std::string("edge ") + which + " is not stationary: omega' = " +
                           std::to_string(e.slope));
    if (std::abs(e.curvature) <= 1e-8)
      r.failures.push_back(std::string("edge ") + which + " is degenerate: omega'' = 0");
    r.edges.push_back(e);
  }
  return r;
}

void write_bands_csv(std::ostream& os, const BandStructure& bs) {
  os << "k,band_index,re_omega,im_omega,tracking_overlap\n";
  char buf[160];
  for (int i = 0; i < bs.n_k(); ++i)
    for (int b = 0; b < bs.n_bands; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g\n", bs.k_grid[i], b + 1,
                    bs.omega[b][i].real(), bs.omega[b][i].imag(), bs.overlap[b][i]);
      os << buf;
    }
}

}  // namespace ptbands
