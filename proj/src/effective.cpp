#include "ptbands/effective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptbands/discretize.hpp"
#include "ptbands/error.hpp"

namespace ptbands {

namespace {

int sign_of(double v) { return (v > 0) - (v < 0); }

Eigen::VectorXcd shift_coeffs(const Eigen::VectorXcd& v, int n) {
  // pi_j(k + n) = pi_{j+n}(k)
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int a = 0; a < v.size(); ++a) {
    const int src = a + n;
    if (src >= 0 && src < v.size()) out[a] = v[src];
  }
  return out;
}

cplx quadrature(const Eigen::VectorXcd& p, const Eigen::VectorXcd& q_reflected_src, int J,
                const PeriodicPotential& sigma, int n_quad, bool reflect) {
  cplx sum(0.0, 0.0);
  const double dx = kTwoPi / n_quad;
  for (int i = 0; i < n_quad; ++i) {
    const double x = i * dx;
    const cplx px = eval_coeffs(p, J, x);
    const cplx qx = eval_coeffs(q_reflected_src, J, reflect ? -x : x);
    sum += eval(sigma, x) * px * std::norm(px) * std::conj(qx);
  }
  return sum * dx;
}

}  // namespace

EffectiveModel make_model(double k0, double omega_star, double curvature, cplx gamma_nl,
                          char which_edge) {
  EffectiveModel m;
  m.k0 = k0;
  m.omega_star = omega_star;
  m.curvature = curvature;
  m.gamma_nl = gamma_nl;
  m.Omega = which_edge == 'b' ? 1 : -1;
  const int sg = sign_of(gamma_nl.real());
  m.exists = sg != 0 && sg == m.Omega && m.Omega == -sign_of(curvature);
  return m;
}

std::string existence_violation(const EffectiveModel& m) {
  const int sg = sign_of(m.gamma_nl.real());
  if (sg == 0) return "Gamma = 0";
  if (m.Omega != -sign_of(m.curvature))
    return "sign(Omega) != -sign(omega''(k0)) (Omega = " + std::to_string(m.Omega) +
           ", omega'' = " + std::to_string(m.curvature) + ")";
  if (sg != m.Omega)
    return "sign(Gamma) != sign(Omega) (Gamma = " + std::to_string(m.gamma_nl.real()) +
           ", Omega = " + std::to_string(m.Omega) + ")";
  return {};
}

cplx gamma_coefficient(const BlochMode& mode_k0, const BlochMode& mode_minus_k0,
                       const PeriodicPotential& sigma, int n_quad) {
  if (mode_k0.J != mode_minus_k0.J) throw SolverError("gamma_coefficient: modes differ in J");
  const double target = -mode_k0.k;
  const double diff = target - mode_minus_k0.k;
  const int shift = static_cast<int>(std::lround(diff));
  if (std::abs(diff - shift) > 1e-12)
    throw SolverError("gamma_coefficient: second mode is not at -k0 (mod 1)");
  if (n_quad < 8) throw SolverError("gamma_coefficient: n_quad too small");
  const Eigen::VectorXcd q = shift_coeffs(mode_minus_k0.p_coeffs, shift);
  // q(x) = p(-x, -k0) = sum_j q_j e^{-ijx}; reflect the coefficients so that
  // inner() sees the reflected function.
  Eigen::VectorXcd q_reflected = q.reverse();
  const cplx norm = inner(q_reflected, mode_k0.p_coeffs);
  if (std::abs(norm) < 1e-12) throw SolverError("gamma_coefficient: <q, p> vanishes");
  const cplx raw = quadrature(mode_k0.p_coeffs, q, mode_k0.J, sigma, n_quad, true);
  return raw / std::conj(norm);
}

cplx gamma_coefficient_adjoint(const BlochMode& mode, const PeriodicPotential& sigma, int n_quad) {
  return quadrature(mode.p_coeffs, mode.pstar_coeffs, mode.J, sigma, n_quad, false);
}

double SechEnvelope::value(double X) const { return amplitude / std::cosh(X / width); }

double SechEnvelope::second_derivative(double X) const {
  const double s = 1.0 / std::cosh(X / width);
  return amplitude / (width * width) * (s - 2.0 * s * s * s);
}

SechEnvelope sech_envelope(const EffectiveModel& model) {
  if (!model.exists)
    throw AssumptionError("sech_envelope: no bound state, " + existence_violation(model));
  SechEnvelope env;
  env.amplitude = std::sqrt(2.0 * model.Omega / model.gamma_nl.real());
  env.width = std::sqrt(-model.curvature / (2.0 * model.Omega));
  env.k0 = model.k0;
  env.omega_star = model.omega_star;
  env.Omega = model.Omega;
  return env;
}

double snls_residual(const EffectiveModel& model, const SechEnvelope& env, double X) {
  const double A = env.value(X);
  return -0.5 * model.curvature * env.second_derivative(X) + model.gamma_nl.real() * A * A * A -
         model.Omega * A;
}

BoundState build_ansatz(const SechEnvelope& env, const BlochMode& mode, double eps,
                        const RealLineGrid& grid) {
  if (!(eps > 0.0 && eps <= 0.5)) throw SolverError("build_ansatz: eps must lie in (0, 0.5]");
  validate_grid(grid);
  if (eps * grid.half_length() / env.width < 15.0)
    throw SolverError("build_ansatz: domain too short, need half-length >= " +
                      std::to_string(15.0 * env.width / eps) + " (have " +
                      std::to_string(grid.half_length()) + ")");
  if (std::abs(mode.k - env.k0) > 1e-12)
    throw SolverError("build_ansatz: mode and envelope sit at different k0");
  BoundState st;
  st.grid = grid;
  st.eps = eps;
  st.omega = env.omega_star + eps * eps * env.Omega;
  st.values.resize(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.x(i);
    st.values[i] = eps * env.value(eps * x) * eval_coeffs(mode.p_coeffs, mode.J, x, mode.k);
  }
  return st;
}

EdgeSetup prepare_edge(const PeriodicPotential& V, const PeriodicPotential& sigma, int m,
                       char which_edge, const EdgeOptions& opt) {
  const BandStructure bs = compute_bands(V, opt.J, opt.N_k, opt.n_bands);
  EdgeSetup setup;
  setup.report = check_assumption(bs, m, opt.tol_real);
  const bool has_edge = std::any_of(setup.report.edges.begin(), setup.report.edges.end(),
                                    [&](const BandEdge& e) { return e.which == which_edge; });
  if (!setup.report.passes() && (opt.require_assumption || !has_edge)) {
    std::string why;
    for (const auto& f : setup.report.failures) why += "; " + f;
    throw AssumptionError("band " + std::to_string(m) + " fails the spectral assumption" + why);
  }
  setup.edge = setup.report.edge(which_edge);
  const double k0 = setup.edge.k0;
  const auto mat = assemble(V, k0, opt.J);
  const Spectrum spec = solve(mat);
  int index = 0;
  for (int i = 1; i < spec.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - setup.edge.omega_star) <
        std::abs(spec.eigenvalues[index] - setup.edge.omega_star))
      index = i;
  setup.mode = fix_pt_phase(make_mode(spec, index, assemble_adjoint(V, k0, opt.J)), opt.tol_real);
  int n_quad = opt.n_quad;
  if (n_quad <= 0) {
    n_quad = 8 * (opt.J + std::max(V.max_harmonic(), sigma.max_harmonic()));
    n_quad = (n_quad + 63) / 64 * 64;
  }
  // At k0 in {0, 1/2}, -k0 is congruent to k0 mod 1.
  const cplx gamma = gamma_coefficient(setup.mode, setup.mode, sigma, n_quad);
  setup.model = make_model(k0, setup.edge.omega_star, setup.edge.curvature, gamma, which_edge);
  return setup;
}

nlohmann::json to_json(const EffectiveModel& m) {
  return {{"k0", m.k0},
          {"omega_star", m.omega_star},
          {"curvature", m.curvature},
          {"gamma_re", m.gamma_nl.real()},
          {"gamma_im", m.gamma_nl.imag()},
          {"Omega", m.Omega},
          {"exists", m.exists}};
}

}  // namespace ptbands
