#include "ptbands/gpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ptbands/error.hpp"
#include "ptbands/parallel.hpp"

namespace ptbands {

GpOperator::GpOperator(const PeriodicPotential& V, const PeriodicPotential& sigma, double omega,
                       const RealLineGrid& grid)
    : V_(V), grid_(grid), omega_(omega), fft_(grid.n_points) {
  validate_grid(grid);
  const int n = grid.n_points;
  V_values_.resize(n);
  sigma_values_.resize(n);
  xi2_.resize(n);
  for (int i = 0; i < n; ++i) {
    V_values_[i] = eval(V, grid.x(i));
    sigma_values_[i] = eval(sigma, grid.x(i));
    const double xi = grid.frequency(i);
    xi2_[i] = xi * xi;
  }
}

Eigen::VectorXcd GpOperator::second_derivative(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd uh = fft_.forward(u);
  uh.array() *= -xi2_.array();
  return fft_.inverse(uh);
}

Eigen::VectorXcd GpOperator::residual(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd r = -second_derivative(u);
  r.array() += (V_values_.array() - omega_) * u.array() +
               sigma_values_.array() * u.array().abs2() * u.array();
  return r;
}

Eigen::VectorXcd GpOperator::jacobian_apply(const Eigen::VectorXcd& u,
                                            const Eigen::VectorXcd& dv) const {
  Eigen::VectorXcd r = -second_derivative(dv);
  r.array() += (V_values_.array() - omega_) * dv.array() +
               sigma_values_.array() * (2.0 * u.array().abs2() * dv.array() +
                                        u.array().square() * dv.array().conjugate());
  return r;
}

Eigen::VectorXcd gp_residual(const Eigen::VectorXcd& u, double omega, const PeriodicPotential& V,
                             const PeriodicPotential& sigma, const RealLineGrid& grid) {
  return GpOperator(V, sigma, omega, grid).residual(u);
}

double hs_norm(const Eigen::VectorXcd& u, double s, const RealLineGrid& grid) {
  if (s < 0.0 || s > 2.0) throw SolverError("hs_norm: s must lie in [0, 2]");
  const int n = grid.n_points;
  const Fft fft(n);
  const Eigen::VectorXcd uh = fft.forward(u);
  double sum = 0.0;
  for (int q = 0; q < n; ++q) {
    const double xi = grid.frequency(q);
    sum += std::pow(1.0 + xi * xi, s) * std::norm(uh[q]);
  }
  return std::sqrt(grid.spacing() / n * sum);
}

// -- preconditioner ---------------------------------------------------------

BlochBlockInverse::BlochBlockInverse(const GpOperator& op) : op_(&op) {
  const RealLineGrid& g = op.grid();
  const int n = g.n_points;
  const int stride = 2 * g.cells_per_side;
  const int size = g.points_per_cell();
  groups_.resize(stride);
  for (int r = 0; r < stride; ++r) {
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(size, size);
    for (int s = 0; s < size; ++s) {
      const int q = r + stride * s;
      groups_[r].push_back(q);
      B(s, s) = op.xi2()[q] - op.omega();
    }
    for (const auto& [d, c] : op.potential().coeffs()) {
      for (int s = 0; s < size; ++s) {
        const int q_src = r + stride * s;
        const int q_dst = ((q_src + stride * d) % n + n) % n;
        B((q_dst - r) / stride, s) += c;
      }
    }
    blocks_.emplace_back(B);
  }
}

Eigen::VectorXcd BlochBlockInverse::apply(const Eigen::VectorXcd& f) const {
  const Eigen::VectorXcd fh = op_->fft().forward(f);
  Eigen::VectorXcd out(fh.size());
  for (std::size_t r = 0; r < groups_.size(); ++r) {
    const auto& idx = groups_[r];
    Eigen::VectorXcd local(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) local[s] = fh[idx[s]];
    const Eigen::VectorXcd sol = blocks_[r].solve(local);
    for (std::size_t s = 0; s < idx.size(); ++s) out[idx[s]] = sol[s];
  }
  return op_->fft().inverse(out);
}

namespace {

double real_dot(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return a.dot(b).real(); }

struct GmresResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double relative_residual = 1.0;
};

/// Restarted GMRES over the reals for a real-linear operator on complex
/// vectors, with inner product Re <a, b>.
template <class Op>
GmresResult gmres(const Op& A, const Eigen::VectorXcd& b, double rtol, int restart,
                  int max_iter) {
  GmresResult res;
  const int n = static_cast<int>(b.size());
  res.x = Eigen::VectorXcd::Zero(n);
  const double bnorm = std::sqrt(real_dot(b, b));
  if (bnorm == 0.0) {
    res.relative_residual = 0.0;
    return res;
  }
  Eigen::VectorXcd r = b;
  double beta = bnorm;
  while (res.iterations < max_iter) {
    std::vector<Eigen::VectorXcd> V;
    V.push_back(r / beta);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
    std::vector<double> cs(restart), sn(restart);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(restart + 1);
    g[0] = beta;
    int k = 0;
    for (; k < restart && res.iterations < max_iter; ++k, ++res.iterations) {
      Eigen::VectorXcd w = A(V[k]);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = real_dot(V[i], w);
        w -= H(i, k) * V[i];
      }
      // second orthogonalization pass
      for (int i = 0; i <= k; ++i) {
        const double c = real_dot(V[i], w);
        H(i, k) += c;
        w -= c * V[i];
      }
      H(k + 1, k) = std::sqrt(real_dot(w, w));
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = denom == 0.0 ? 1.0 : H(k, k) / denom;
      sn[k] = denom == 0.0 ? 0.0 : H(k + 1, k) / denom;
      const double hk1 = H(k + 1, k);
      H(k, k) = cs[k] * H(k, k) + sn[k] * hk1;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      res.relative_residual = std::abs(g[k + 1]) / bnorm;
      if (res.relative_residual <= rtol || hk1 == 0.0) {
        ++k;
        ++res.iterations;
        break;
      }
      V.push_back(w / hk1);
    }
    // back substitution on the k x k upper triangle
    Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double t = g[i];
      for (int j = i + 1; j < k; ++j) t -= H(i, j) * y[j];
      y[i] = H(i, i) == 0.0 ? 0.0 : t / H(i, i);
    }
    for (int i = 0; i < k; ++i) res.x += y[i] * V[i];
    r = b - A(res.x);
    beta = std::sqrt(real_dot(r, r));
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= rtol) break;
  }
  return res;
}

/// Dense reduced Jacobian in the half-grid unknowns
///   z = (Re u_0 .. Re u_{n/2}, Im u_1 .. Im u_{n/2-1}).
Eigen::MatrixXd reduced_jacobian(const GpOperator& op, const Eigen::VectorXcd& u) {
  const RealLineGrid& g = op.grid();
  const int n = g.n_points;
  const int half = n / 2;
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  e0[0] = 1.0;
  const Eigen::VectorXd d2 = op.second_derivative(e0).real();
  auto D2 = [&](int i, int j) { return d2[((i - j) % n + n) % n]; };
  const double omega = op.omega();

  Eigen::VectorXcd dga(n), dgb(n);
  for (int i = 0; i < n; ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const cplx s = op.sigma_values()[i];
    dga[i] = s * cplx(3 * a * a + b * b, 2 * a * b);
    dgb[i] = s * cplx(2 * a * b, a * a + 3 * b * b);
  }
  const cplx I(0.0, 1.0);

  // complex column of dF/d(a_j) and dF/d(b_j) at grid index j, row i
  auto col_a = [&](int i, int j) {
    cplx v = -D2(i, j);
    if (i == j) v += -omega + op.V_values()[i] + dga[i];
    return v;
  };
  auto col_b = [&](int i, int j) {
    cplx v = -I * D2(i, j);
    if (i == j) v += -I * omega + I * op.V_values()[i] + dgb[i];
    return v;
  };

  Eigen::MatrixXd R(n, n);
  auto fill_column = [&](int c, auto&& column) {
    for (int i = 0; i <= half; ++i) R(i, c) = column(i).real();
    for (int i = 1; i < half; ++i) R(half + i, c) = column(i).imag();
  };
  for (int j = 0; j <= half; ++j) {
    const int jp = g.mirror(j);
    fill_column(j, [&](int i) { return jp == j ? col_a(i, j) : col_a(i, j) + col_a(i, jp); });
  }
  for (int j = 1; j < half; ++j) {
    const int jp = g.mirror(j);
    fill_column(half + j, [&](int i) { return col_b(i, j) - col_b(i, jp); });
  }
  return R;
}

Eigen::VectorXcd dense_step(const GpOperator& op, const Eigen::VectorXcd& u,
                            const Eigen::VectorXcd& r) {
  const RealLineGrid& g = op.grid();
  const int n = g.n_points;
  const int half = n / 2;
  const Eigen::MatrixXd R = reduced_jacobian(op, u);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i <= half; ++i) rhs[i] = -r[i].real();
  for (int i = 1; i < half; ++i) rhs[half + i] = -r[i].imag();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(R);
  if (!(lu.rcond() > 1e-14))
    throw SolverError("newton_solve: singular Jacobian (rcond " + std::to_string(lu.rcond()) + ")");
  const Eigen::VectorXd z = lu.solve(rhs);
  Eigen::VectorXcd du(n);
  for (int i = 0; i <= half; ++i) du[i] = z[i];
  for (int i = half + 1; i < n; ++i) du[i] = z[g.mirror(i)];
  for (int i = 1; i < half; ++i) {
    du[i] += cplx(0.0, z[half + i]);
    du[g.mirror(i)] += cplx(0.0, -z[half + i]);
  }
  return du;
}

double quadratic_constant(const std::vector<double>& r) {
  // last two reductions that are still above the round-off floor
  std::vector<double> ratios;
  for (std::size_t k = 0; k + 1 < r.size(); ++k)
    if (r[k + 1] > 1e-10 && r[k] > 0.0) ratios.push_back(r[k + 1] / (r[k] * r[k]));
  double c = 0.0;
  for (std::size_t i = ratios.size() >= 2 ? ratios.size() - 2 : 0; i < ratios.size(); ++i)
    c = std::max(c, ratios[i]);
  return c;
}

}  // namespace

NewtonReport newton_solve(const Eigen::VectorXcd& u0, double omega, const PeriodicPotential& V,
                          const PeriodicPotential& sigma, const RealLineGrid& grid,
                          const NewtonOptions& opt) {
  const GpOperator op(V, sigma, omega, grid);
  if (u0.size() != grid.n_points) throw SolverError("newton_solve: initial field has wrong size");
  const double scale = std::max(1.0, u0.cwiseAbs().maxCoeff());
  if (pt_defect(u0, grid) > 1e-6 * scale)
    throw SolverError("newton_solve: initial guess is not PT-symmetric");

  NewtonReport rep;
  rep.used_dense = opt.linear_solver == LinearSolver::Dense ||
                   (opt.linear_solver == LinearSolver::Auto && grid.n_points <= opt.dense_limit);
  std::unique_ptr<BlochBlockInverse> precond;
  if (!rep.used_dense) precond = std::make_unique<BlochBlockInverse>(op);

  Eigen::VectorXcd u = pt_project(u0, grid);
  for (int it = 0;; ++it) {
    const Eigen::VectorXcd r = op.residual(u);
    const double rn = l2_norm(r, grid);
    rep.residual_history.push_back(rn);
    if (!std::isfinite(rn)) throw SolverError("newton_solve: residual is not finite");
    if (rn <= opt.tol) break;
    if (it >= opt.max_iter)
      throw SolverError("newton_solve: diverged, no convergence in " + std::to_string(opt.max_iter) +
                        " iterations (last residual " + std::to_string(rn) + ")");
    if (rn > 1e8 * std::max(rep.residual_history.front(), 1e-300))
      throw SolverError("newton_solve: diverged (residual " + std::to_string(rn) + ")");

    Eigen::VectorXcd du;
    if (rep.used_dense) {
      du = dense_step(op, u, r);
      rep.linear_iterations.push_back(0);
    } else {
      const auto A = [&](const Eigen::VectorXcd& y) {
        return pt_project(op.jacobian_apply(u, precond->apply(y)), grid);
      };
      const auto sol = gmres(A, pt_project(-r, grid), opt.krylov_rtol, opt.krylov_restart,
                             opt.krylov_max_iter);
      if (!(sol.relative_residual < 0.5))
        throw SolverError("newton_solve: linear solve stalled (relative residual " +
                          std::to_string(sol.relative_residual) + "), Jacobian may be singular");
      du = precond->apply(sol.x);
      rep.linear_iterations.push_back(sol.iterations);
    }
    u = pt_project(u + pt_project(du, grid), grid);
    rep.pt_defects.push_back(pt_defect(u, grid));
    rep.iterations = it + 1;
  }
  rep.quadratic_constant = quadratic_constant(rep.residual_history);
  rep.state.grid = grid;
  rep.state.values = std::move(u);
  rep.state.omega = omega;
  rep.state.residual_norm = rep.residual_history.back();
  return rep;
}

}  // namespace ptbands

namespace ptbands {

std::optional<LogLogFit> fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw SolverError("fit_loglog: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw SolverError("fit_loglog: non-positive data");
    A(i, 0) = std::log(x[i]);
    A(i, 1) = 1.0;
    b[i] = std::log(y[i]);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  LogLogFit fit{c[0], c[1], 0.0};
  if (n > 2) {
    const double rss = (A * c - b).squaredNorm();
    const double mean = A.col(0).mean();
    const double sxx = (A.col(0).array() - mean).square().sum();
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

int cells_for(double width, double eps, double tail_factor) {
  if (!(width > 0.0) || !(eps > 0.0)) throw SolverError("cells_for: width and eps must be positive");
  return static_cast<int>(std::ceil(tail_factor * width / (eps * kTwoPi) - 1e-9));
}

StudyResult convergence_study(const PeriodicPotential& V, const PeriodicPotential& sigma, int m,
                              char which_edge, const std::vector<double>& eps_list,
                              const StudyOptions& opt) {
  if (eps_list.empty()) throw ConfigError("convergence_study: eps list is empty");
  StudyResult res;
  res.setup = prepare_edge(V, sigma, m, which_edge, opt.edge);
  res.envelope = sech_envelope(res.setup.model);

  res.rows = parallel_map(eps_list.size(), [&](std::size_t i) {
    const double eps = eps_list[i];
    const RealLineGrid grid =
        make_grid(cells_for(res.envelope.width, eps, opt.tail_factor), opt.points_per_cell);
    const BoundState ans = build_ansatz(res.envelope, res.setup.mode, eps, grid);
    NewtonReport rep;
    try {
      rep = newton_solve(ans.values, ans.omega, V, sigma, grid, opt.newton);
    } catch (const SolverError& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "eps = %.6g: ", eps);
      throw SolverError(buf + std::string(e.what()));
    }
    StudyRow row;
    row.eps = eps;
    row.half_length = grid.half_length();
    row.n_points = grid.n_points;
    row.newton_iters = rep.iterations;
    row.residual = rep.state.residual_norm;
    row.hs_error = hs_norm(rep.state.values - ans.values, opt.s, grid);
    row.ansatz_norm = hs_norm(ans.values, opt.s, grid);
    row.hs_error_rel = row.hs_error / row.ansatz_norm;
    row.quadratic_constant = rep.quadratic_constant;
    for (double d : rep.pt_defects) row.max_pt_defect = std::max(row.max_pt_defect, d);
    return row;
  });

  std::vector<double> e, abs_err, rel_err;
  for (const auto& r : res.rows) {
    e.push_back(r.eps);
    abs_err.push_back(r.hs_error);
    rel_err.push_back(r.hs_error_rel);
  }
  res.fit = fit_loglog(e, abs_err);
  res.fit_rel = fit_loglog(e, rel_err);
  return res;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json fit_json(const std::optional<LogLogFit>& f) {
  if (!f) return {{"slope", nullptr}, {"slope_stderr", nullptr}};
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"slope_stderr", f->slope_stderr}};
}

}  // namespace

void write_converge_csv(std::ostream& os, const StudyResult& result) {
  os << "eps,L,n_points,newton_iters,residual,hs_error,hs_error_rel\n";
  for (const auto& r : result.rows) {
    os << g17(r.eps) << ',' << g17(r.half_length) << ',' << r.n_points << ',' << r.newton_iters
       << ',' << g17(r.residual) << ',' << g17(r.hs_error) << ',' << g17(r.hs_error_rel) << '\n';
  }
}

nlohmann::json study_summary(const StudyResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"eps", r.eps},
                    {"quadratic_constant", r.quadratic_constant},
                    {"max_pt_defect", r.max_pt_defect},
                    {"ansatz_norm", r.ansatz_norm}});
  }
  return {{"model", to_json(result.setup.model)},
          {"envelope",
           {{"amplitude", result.envelope.amplitude}, {"width", result.envelope.width}}},
          {"fit", fit_json(result.fit)},
          {"fit_relative", fit_json(result.fit_rel)},
          {"rows", rows}};
}

}  // namespace ptbands
