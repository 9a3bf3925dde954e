// ptbands: command-line front end.
//   ptbands bands|effective|ansatz|converge|dirac --config <file.json> --out <dir>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptbands/bands.hpp"
#include "ptbands/config.hpp"
#include "ptbands/dirac.hpp"
#include "ptbands/effective.hpp"
#include "ptbands/error.hpp"
#include "ptbands/gpsolve.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ptbands;

namespace {

bool verbose = false;

void log(const std::string& msg) {
  if (verbose) std::cerr << "ptbands: " << msg << '\n';
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write " + (dir / name).string());
  return os;
}

void write_json(const fs::path& dir, const std::string& name, const json& j) {
  open_out(dir, name) << j.dump(2) << '\n';
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const BandEdgeReport& r) {
  json edges = json::array();
  for (const auto& e : r.edges)
    edges.push_back({{"which", std::string(1, e.which)},
                     {"k0", e.k0},
                     {"omega_star", e.omega_star},
                     {"curvature", e.curvature},
                     {"slope", e.slope}});
  return {{"band", r.m},
          {"passes", r.passes()},
          {"is_real", r.is_real},
          {"max_imag", r.max_imag},
          {"witness_k", r.witness_k},
          {"isolation_gap", finite_or_null(r.isolation_gap)},
          {"simplicity_margin", finite_or_null(r.simplicity_margin)},
          {"edges", edges},
          {"failures", r.failures}};
}

int cmd_bands(const RunConfig& c, const fs::path& out) {
  const auto& n = c.numerics;
  log("computing " + std::to_string(n.n_bands) + " bands on " + std::to_string(n.N_k) + " k-points");
  const BandStructure bs = compute_bands(c.require_potential(), n.J, n.N_k, n.n_bands);
  {
    auto os = open_out(out, "bands.csv");
    write_bands_csv(os, bs);
  }
  json reports = json::array();
  bool any_pass = false;
  for (int m = 1; m <= n.n_bands; ++m) {
    const auto r = check_assumption(bs, m, n.tol_real);
    any_pass = any_pass || r.passes();
    reports.push_back(report_json(r));
  }
  bool ok = any_pass;
  if (c.band) ok = reports[c.require_band() - 1]["passes"].get<bool>();
  write_json(out, "bands_summary.json",
             {{"J", n.J}, {"N_k", n.N_k}, {"n_bands", n.n_bands}, {"bands", reports},
              {"requested_band", c.band ? json(*c.band) : json(nullptr)}, {"assumption_ok", ok}});
  return ok ? 0 : 2;
}

int cmd_effective(const RunConfig& c, const fs::path& out) {
  EdgeOptions opt = c.edge_options();
  opt.require_assumption = false;
  const EdgeSetup s =
      prepare_edge(c.require_potential(), c.require_sigma(), c.require_band(), c.edge, opt);
  json j = to_json(s.model);
  j["assumption_ok"] = s.report.passes();
  j["assumption_failures"] = s.report.failures;
  j["band"] = *c.band;
  j["edge"] = std::string(1, c.edge);
  const std::string why = existence_violation(s.model);
  j["violation"] = why.empty() ? json(nullptr) : json(why);
  if (s.model.exists) {
    const SechEnvelope env = sech_envelope(s.model);
    j["amplitude"] = env.amplitude;
    j["width"] = env.width;
  }
  write_json(out, "effective.json", j);
  return s.report.passes() ? 0 : 2;
}

int cmd_ansatz(const RunConfig& c, const fs::path& out) {
  const EdgeSetup s =
      prepare_edge(c.require_potential(), c.require_sigma(), c.require_band(), c.edge,
                   c.edge_options());
  const SechEnvelope env = sech_envelope(s.model);
  const RealLineGrid grid = make_grid(cells_for(env.width, c.eps, c.numerics.tail_factor),
                                      c.numerics.points_per_cell);
  const BoundState u = build_ansatz(env, s.mode, c.eps, grid);
  {
    auto os = open_out(out, "ansatz.csv");
    os << "x,re_u,im_u\n";
    char buf[96];
    for (int i = 0; i < grid.n_points; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.x(i), u.values[i].real(),
                    u.values[i].imag());
      os << buf;
    }
  }
  write_json(out, "ansatz.json",
             {{"eps", c.eps},
              {"omega", u.omega},
              {"half_length", grid.half_length()},
              {"n_points", grid.n_points},
              {"amplitude", env.amplitude},
              {"width", env.width},
              {"hs_norm", hs_norm(u.values, c.numerics.hs_s, grid)},
              {"model", to_json(s.model)}});
  return 0;
}

int cmd_converge(const RunConfig& c, const fs::path& out) {
  log("convergence study over " + std::to_string(c.eps_list.size()) + " eps values");
  const StudyResult r = convergence_study(c.require_potential(), c.require_sigma(),
                                          c.require_band(), c.edge, c.eps_list,
                                          c.study_options());
  {
    auto os = open_out(out, "converge.csv");
    write_converge_csv(os, r);
  }
  json j = study_summary(r);
  j["slope"] = r.fit ? json(r.fit->slope) : json(nullptr);
  j["slope_relative"] = r.fit_rel ? json(r.fit_rel->slope) : json(nullptr);
  j["s"] = c.numerics.hs_s;
  write_json(out, "converge_summary.json", j);
  return 0;
}

int cmd_dirac(const RunConfig& c, const fs::path& out) {
  if (!c.potential && !c.prop3) throw ConfigError("dirac: need 'potential' and/or 'prop3'");
  std::vector<DiracRow> rows;
  json summary;
  if (c.potential) {
    if (!c.parts) throw ConfigError("dirac: the potential must be given as cosine/sine parts");
    const DiracConfig d = c.dirac.value_or(DiracConfig{});
    const PeriodicPotential U = even_part(*c.parts);
    const PeriodicPotential W = odd_part(*c.parts);
    const auto& n = c.numerics;
    const BandStructure bs0 = compute_bands(U, n.J, n.N_k, n.n_bands);
    std::vector<std::string> skipped;
    const auto points = find_dirac_points(bs0, d.tol, &skipped);
    log(std::to_string(points.size()) + " Dirac points");
    std::vector<double> gammas = d.gamma_list;
    if (gammas.empty()) gammas.push_back(c.parts->gamma);
    json pts = json::array();
    for (const auto& dp : points) {
      json pj = to_json(dp);
      const Eigen::Matrix2cd M = mw_matrix(dp, W);
      pj["mw_offdiag"] = std::abs(M(1, 0));
      pj["mw_diag_max"] = std::max(std::abs(M(0, 0)), std::abs(M(1, 1)));
      json preds = json::array();
      for (double g : gammas) {
        SplittingPrediction p = predict_splitting(dp, W, g);
        attach_measurement(p, measure_splitting(perturbed(U, W, g), dp.k0, dp.mu, n.J));
        rows.push_back(to_row(p));
        preds.push_back({{"gamma", g}, {"inconclusive", p.inconclusive}});
      }
      pj["predictions"] = preds;
      if (d.slope) {
        if (std::abs(M(1, 0)) > 1e-12) {
          const SlopeEstimate s = gamma_slope(dp, U, W, d.slope_gamma0);
          pj["slope"] = {{"gammas", s.gammas},
                         {"im_over_gamma", s.im_over_gamma},
                         {"richardson", s.slope},
                         {"predicted", s.predicted},
                         {"relative_gap", s.relative_gap()}};
        } else {
          pj["slope"] = nullptr;
        }
      }
      pts.push_back(pj);
    }
    summary["points"] = pts;
    summary["skipped"] = skipped;
  }
  if (c.prop3) {
    const Prop3Config& p = *c.prop3;
    std::vector<double> a, b;
    for (int j = 1; j <= p.n_harmonics; ++j) {
      a.push_back(std::pow(j, -p.a_power));
      b.push_back(std::pow(j, -p.b_power));
    }
    const auto scan = prop3_scan(a, b, p.gamma, p.m_first, p.m_last, p.J, c.numerics.tol_real);
    json sj = json::array();
    for (const auto& r : scan) {
      rows.push_back(to_row(r.prediction));
      const cplx top = (*r.prediction.measured)[0];
      sj.push_back({{"m", r.m},
                    {"mu", r.prediction.mu},
                    {"predicted_offset_im", r.prediction.predicted_im()},
                    {"predicted_offset_re", std::abs(r.prediction.leading[0].real())},
                    {"literal_offset_re", std::abs(r.literal_offset.real())},
                    {"literal_offset_im", std::abs(r.literal_offset.imag())},
                    {"gamma_b_m", r.gamma_b_m},
                    {"measured_re", top.real()},
                    {"measured_im", top.imag()},
                    {"measured_complex", r.measured_complex},
                    {"ratio_to_gamma_b_m", finite_or_null(r.ratio_to_gamma_b_m)},
                    {"relative_gap", finite_or_null(r.prediction.relative_gap)}});
    }
    summary["prop3"] = sj;
  }
  {
    auto os = open_out(out, "dirac.csv");
    write_dirac_csv(os, rows);
  }
  write_json(out, "dirac_summary.json", summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloch bands, effective models and bound states for PT-symmetric periodic potentials"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  app.add_flag("-v,--verbose", verbose, "progress messages on stderr");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, const fs::path&);
  };
  const Command commands[] = {
      {"bands", "band structure and spectral assumption check", cmd_bands},
      {"effective", "effective NLS coefficients at a band edge", cmd_effective},
      {"ansatz", "sample the envelope ansatz on the real-line grid", cmd_ansatz},
      {"converge", "Newton bound states and the error-scaling study", cmd_converge},
      {"dirac", "Dirac points and splitting predictions", cmd_dirac},
  };
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    fs::create_directories(out_dir);
    for (const auto& cmd : commands)
      if (app.got_subcommand(cmd.name)) return cmd.run(cfg, out_dir);
  } catch (const Error& e) {
    std::cerr << "ptbands: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "ptbands: config: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ptbands: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
