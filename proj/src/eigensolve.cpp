#include "ptbands/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ptbands/error.hpp"

namespace ptbands {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<int> sorted_order(const Eigen::VectorXcd& w, double scale) {
  std::vector<int> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (w[a].real() != w[b].real()) return w[a].real() < w[b].real();
    return w[a].imag() < w[b].imag();
  });
  // Conjugate partners differ in the real part only by rounding; order
  // near-ties by imaginary part.
  const double tie = 1e-12 * std::max(1.0, scale);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && w[order[j]].real() - w[order[i]].real() <= tie) ++j;
    std::sort(order.begin() + i, order.begin() + j,
              [&](int a, int b) { return w[a].imag() < w[b].imag(); });
    i = j;
  }
  return order;
}

}  // namespace

Spectrum solve(const BlochOperatorMatrix& m) {
  if (!m.entries.allFinite()) throw SolverError("solve: matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.entries, true);
  if (es.info() != Eigen::Success)
    throw SolverError("solve: QR iteration did not converge (k = " + std::to_string(m.k) +
                      ", J = " + std::to_string(m.J) + ")");
  Spectrum s;
  s.k = m.k;
  s.J = m.J;
  s.matrix_norm = m.entries.cwiseAbs().rowwise().sum().maxCoeff();
  const auto order = sorted_order(es.eigenvalues(), s.matrix_norm);
  const int n = m.size();
  s.eigenvalues.resize(n);
  s.right_vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    s.eigenvalues[i] = es.eigenvalues()[order[i]];
    Eigen::VectorXcd v = es.eigenvectors().col(order[i]);
    s.right_vectors.col(i) = v / v.norm();
  }
  for (int i = 0; i < n; ++i) {
    const double r =
        (m.entries * s.right_vectors.col(i) - s.eigenvalues[i] * s.right_vectors.col(i)).norm();
    if (r > 1e-9 * s.matrix_norm)
      throw SolverError("solve: eigenpair residual " + std::to_string(r) + " exceeds bound at k = " +
                        std::to_string(m.k));
  }
  return s;
}

double real_tolerance(double tol_real, cplx omega) {
  return tol_real * std::max(1.0, std::abs(omega));
}

Classification classify(const std::vector<cplx>& w, double tol_real) {
  Classification out;
  std::vector<int> upper, lower;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    if (std::abs(w[i].imag()) <= real_tolerance(tol_real, w[i]))
      out.real.push_back(i);
    else
      (w[i].imag() > 0 ? upper : lower).push_back(i);
  }
  std::vector<bool> used(w.size(), false);
  for (int a : upper) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int b : lower) {
      if (used[b]) continue;
      const double d = std::abs(w[a] - std::conj(w[b]));
      if (d < dist) {
        dist = d;
        best = b;
      }
    }
    if (best < 0 || dist > real_tolerance(tol_real, w[a]))
      throw SolverError("classify: eigenvalue (" + std::to_string(w[a].real()) + ", " +
                        std::to_string(w[a].imag()) + ") has no conjugate partner");
    used[best] = true;
    out.pairs.emplace_back(a, best);
  }
  for (int b : lower)
    if (!used[b])
      throw SolverError("classify: eigenvalue (" + std::to_string(w[b].real()) + ", " +
                        std::to_string(w[b].imag()) + ") has no conjugate partner");
  return out;
}

Classification classify(const Spectrum& spec, double tol_real) {
  std::vector<cplx> w(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.size());
  return classify(w, tol_real);
}

cplx inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) {
  // vdot conjugates its first argument
  return kTwoPi * g.dot(f);
}

double l2_norm(const Eigen::VectorXcd& f) { return std::sqrt(kTwoPi) * f.norm(); }

double max_imag_coeff(const Eigen::VectorXcd& v) { return v.imag().cwiseAbs().maxCoeff(); }

cplx eval_coeffs(const Eigen::VectorXcd& c, int J, double x, double shift) {
  cplx sum(0.0, 0.0);
  for (int a = 0; a < c.size(); ++a) sum += c[a] * std::polar(1.0, (a - J + shift) * x);
  return sum;
}

cplx refine_eigenvalue(const BlochOperatorMatrix& m, cplx omega, Eigen::VectorXcd& v,
                       int iterations) {
  const int n = m.size();
  const Eigen::MatrixXcd shifted = m.entries - omega * Eigen::MatrixXcd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_adj(shifted.adjoint());
  Eigen::VectorXcd y = v;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd x = lu.solve(v);
    Eigen::VectorXcd z = lu_adj.solve(y);
    if (!x.allFinite() || !z.allFinite() || x.norm() == 0.0 || z.norm() == 0.0) break;
    v = x / x.norm();
    y = z / z.norm();
  }
  const cplx denom = y.dot(v);
  if (std::abs(denom) < 1e-12) return omega;
  return y.dot(m.entries * v) / denom;
}

BlochMode make_mode(const Spectrum& spec, int index, const BlochOperatorMatrix& adjoint) {
  if (index < 0 || index >= spec.size()) throw SolverError("make_mode: index out of range");
  if (adjoint.J != spec.J || std::abs(adjoint.k - spec.k) > 1e-14)
    throw SolverError("make_mode: adjoint matrix assembled at a different (k, J)");
  const cplx omega = spec.eigenvalues[index];
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.size(); ++i)
    if (i != index) gap = std::min(gap, std::abs(spec.eigenvalues[i] - omega));
  if (gap <= 1e-6 * spec.matrix_norm)
    throw SolverError("make_mode: eigenvalue at k = " + std::to_string(spec.k) +
                      " is not simple (gap " + std::to_string(gap) +
                      "); biorthogonal normalization is unstable");

  BlochMode mode;
  mode.k = spec.k;
  mode.J = spec.J;
  mode.omega = omega;
  Eigen::VectorXcd v = spec.right_vectors.col(index);
  mode.p_coeffs = v / l2_norm(v);

  const Spectrum adj = solve(adjoint);
  int best = 0;
  for (int i = 1; i < adj.size(); ++i)
    if (std::abs(adj.eigenvalues[i] - std::conj(omega)) <
        std::abs(adj.eigenvalues[best] - std::conj(omega)))
      best = i;
  if (std::abs(adj.eigenvalues[best] - std::conj(omega)) > 1e-8 * spec.matrix_norm)
    throw SolverError("make_mode: adjoint spectrum does not contain conj(omega)");
  const Eigen::VectorXcd w = adj.right_vectors.col(best);
  const cplx s = inner(w, mode.p_coeffs);
  if (std::abs(s) <= 1e-10 * l2_norm(w) * l2_norm(mode.p_coeffs))
    throw SolverError("make_mode: <p*, p> vanishes (exceptional point)");
  mode.pstar_coeffs = w / s;
  return mode;
}

BlochMode fix_pt_phase(const BlochMode& mode, double tol_real, double tol_imag) {
  if (std::abs(mode.omega.imag()) > real_tolerance(tol_real, mode.omega))
    throw SolverError("fix_pt_phase: eigenvalue is not real (Im = " +
                      std::to_string(mode.omega.imag()) + ")");
  Eigen::Index jmax = 0;
  mode.p_coeffs.cwiseAbs().maxCoeff(&jmax);
  const cplx rot = std::polar(1.0, -std::arg(mode.p_coeffs[jmax]));
  BlochMode out = mode;
  out.p_coeffs *= rot;
  out.pstar_coeffs *= rot;
  const double residual = max_imag_coeff(out.p_coeffs);
  if (residual > tol_imag)
    throw SolverError("fix_pt_phase: residual imaginary part " + std::to_string(residual) +
                      " after phase fix");
  return out;
}

}  // namespace ptbands
