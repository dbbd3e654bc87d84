#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/config.hpp"
#include "plab/profiles.hpp"
#include "plab/report.hpp"
#include "plab/solver.hpp"
#include "plab/tolerances.hpp"
#include "plab/verifier.hpp"

namespace plab {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::string format = "json";  // or "csv"
  int levels = 1;
  int jobs = 1;
};

namespace detail {

inline SpaceTimeGrid grid_at_level(const RunConfig& c, int level) {
  std::array<int, 2> nx = c.nx;
  for (int a = 0; a < 2; ++a) nx[a] = ((nx[a] - 1) << level) + 1;
  SpaceTimeGrid probe = build_grid(c.box_lo, c.box_hi, nx, c.params.horizon_T, 2, c.params.dim);
  int nt = cfl_nt(c.params, probe);
  if (c.nt > 0) nt = std::max(nt, ((c.nt - 1) << (2 * level)) + 1);
  return build_grid(c.box_lo, c.box_hi, nx, c.params.horizon_T, nt, c.params.dim);
}

inline CutoffFunction make_cutoff(const RunConfig& c, const SpaceTimeGrid& g) {
  const double T = c.params.horizon_T;
  const double tc = c.cutoff.time_center > 0.0 ? c.cutoff.time_center : 0.5 * T;
  const double tr = c.cutoff.time_radius > 0.0 ? c.cutoff.time_radius : 0.4 * T;
  return CutoffFunction(g, Vec2{c.cutoff.center[0], c.cutoff.center[1]},
                        c.cutoff.space_radius, tc, tr);
}

inline ProblemData make_data(const RunConfig& c, const Profile& profile) {
  ProblemData data;
  data.initial = profile.initial;
  data.lateral = profile.lateral;
  data.params = c.params;
  return data;
}

inline double sup_error_vs(const SpaceTimeField& u, const ReferenceSolution& ref) {
  const SpaceTimeGrid& g = *u.grid;
  double err = 0.0;
  for (int k = 0; k < g.nt; ++k)
    for (int j = 0; j < g.nx[1]; ++j)
      for (int i = 0; i < g.nx[0]; ++i)
        err = std::max(err, std::abs(u.at(k, i, j) -
                                     ref.evaluator(Vec2{g.x(i), g.y(j)}, g.t(k))));
  return err;
}

inline void write_manifest(const RunConfig& c, const RunOptions& opt,
                           const nlohmann::json& extra, double elapsed_ms) {
  nlohmann::json m;
  m["version"] = kVersionString;
  m["config"] = to_string(c);
  m["levels"] = opt.levels;
  m["elapsed_ms"] = elapsed_ms;
  m["detail"] = extra;
  detail::write_text(opt.out_dir / "manifest.json", m.dump(2) + "\n");
}

inline void emit(const std::vector<EstimateReport>& reports, const RunOptions& opt,
                 const std::string& stem) {
  if (opt.format == "csv")
    write_reports_csv(reports, opt.out_dir / (stem + ".csv"));
  else
    write_reports_json(reports, opt.out_dir / (stem + ".json"));
}

}  // namespace detail

/// `solve`: run the forward solver at each refinement level; when the profile
/// has an exact solution for these parameters, emit the sup-norm error table.
inline int run_solve(const RunConfig& config, const RunOptions& opt) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  Profile profile = make_profile(config.profile, config.params);
  std::vector<SeriesRow> rows;
  nlohmann::json info = nlohmann::json::array();
  for (int lvl = 0; lvl < opt.levels; ++lvl) {
    const SpaceTimeGrid g = detail::grid_at_level(config, lvl);
    const SpaceTimeField u = solve(detail::make_data(config, profile), g);
    nlohmann::json entry = {{"level", lvl}, {"nx", g.nx[0]}, {"nt", g.nt},
                            {"h", g.h[0]},  {"dt", g.dt}};
    if (profile.exact) {
      const double err = detail::sup_error_vs(u, *profile.exact);
      entry["sup_error"] = err;
      rows.push_back(SeriesRow{"solve_error", lvl, g.h[0], err});
      std::cout << "level " << lvl << "  nx=" << g.nx[0] << "  h=" << g.h[0]
                << "  sup_error=" << err << "\n";
    } else {
      std::cout << "level " << lvl << "  nx=" << g.nx[0] << "  solved (no exact reference)\n";
    }
    info.push_back(entry);
  }
  if (!rows.empty()) write_series_csv(rows, opt.out_dir / "solve_error_series.csv");
  const auto t1 = std::chrono::steady_clock::now();
  detail::write_manifest(config, opt, info,
                         std::chrono::duration<double, std::milli>(t1 - t0).count());
  return 0;
}

/// `mms`: manufactured-solution convergence study.
inline int run_mms(const RunConfig& config, const RunOptions& opt) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  const ManufacturedSolution m = make_manufactured(config.manufactured, config.params.dim);
  std::vector<SeriesRow> rows;
  nlohmann::json info = nlohmann::json::array();
  for (int lvl = 0; lvl < opt.levels; ++lvl) {
    const SpaceTimeGrid g = detail::grid_at_level(config, lvl);
    ProblemData data;
    data.params = config.params;
    data.initial = [&m](Vec2 x) { return m.value(x, 0.0); };
    data.lateral = [&m](Vec2 x, double t) { return m.value(x, t); };
    data.forcing = mms_forcing(m, config.params);
    const SpaceTimeField u = solve(data, g);
    double err = 0.0;
    for (int k = 0; k < g.nt; ++k)
      for (int j = 0; j < g.nx[1]; ++j)
        for (int i = 0; i < g.nx[0]; ++i)
          err = std::max(err, std::abs(u.at(k, i, j) - m.value(Vec2{g.x(i), g.y(j)}, g.t(k))));
    rows.push_back(SeriesRow{"mms_error", lvl, g.h[0], err});
    info.push_back({{"level", lvl}, {"nx", g.nx[0]}, {"h", g.h[0]}, {"sup_error", err}});
    std::cout << "level " << lvl << "  nx=" << g.nx[0] << "  h=" << g.h[0]
              << "  mms_error=" << err << "\n";
  }
  write_series_csv(rows, opt.out_dir / "mms_error_series.csv");
  const auto t1 = std::chrono::steady_clock::now();
  detail::write_manifest(config, opt, info,
                         std::chrono::duration<double, std::milli>(t1 - t0).count());
  return 0;
}

/// `verify`: solve, then run every selected verifier at each level; sweep
/// checks (ε-convergence, second-derivative bound) consume eps_list.
inline int run_verify(const RunConfig& config, const RunOptions& opt) {
  validate_config(config);
  if (config.checks.empty()) throw ConfigError("checks: none selected for verify");
  const auto t0 = std::chrono::steady_clock::now();
  Profile profile = make_profile(config.profile, config.params);
  std::vector<EstimateReport> reports;
  std::vector<SeriesRow> rows;
  nlohmann::json info = nlohmann::json::array();

  auto selected = [&](const std::string& name) {
    return std::find(config.checks.begin(), config.checks.end(), name) != config.checks.end();
  };
  const bool wants_sweep =
      selected("epsilon-convergence") || selected("second-derivative-bound");
  if (wants_sweep && config.eps_list.size() < 2)
    throw ConfigError("eps_list: sweep checks need at least 2 epsilon values");

  std::vector<double> rel_residual_identity;
  std::vector<double> mt_residuals;
  std::vector<double> weak_residuals;
  std::vector<double> mp_excess;

  for (int lvl = 0; lvl < opt.levels; ++lvl) {
    const SpaceTimeGrid g = detail::grid_at_level(config, lvl);
    const double h = g.h[0];
    const CutoffFunction cutoff = detail::make_cutoff(config, g);
    info.push_back({{"level", lvl}, {"nx", g.nx[0]}, {"nt", g.nt}, {"h", h}, {"dt", g.dt}});

    SpaceTimeField u;
    const bool needs_solve = selected("max-principle") || selected("veps-evolution") ||
                             selected("gradient-interior-bound") ||
                             selected("fundamental-identity") ||
                             selected("time-derivative-bound") ||
                             selected("weak-time-derivative") ||
                             selected("elementary-inequality");
    if (needs_solve) u = solve(detail::make_data(config, profile), g);

    if (selected("max-principle")) {
      auto r = check_max_principle(u, config.params.epsilon, tol::max_principle_C * h);
      r.context.p = config.params.p;
      mp_excess.push_back(std::max(r.lhs - r.rhs, 0.0));
      rows.push_back(SeriesRow{"max_principle_excess", lvl, h, mp_excess.back()});
      reports.push_back(r);
    }
    if (selected("veps-evolution")) {
      auto r = check_veps_evolution(u, config.params.p, config.params.epsilon,
                                    tol::veps_evolution_C * h);
      rows.push_back(SeriesRow{"veps_evolution_residual", lvl, h, r.lhs});
      reports.push_back(r);
    }
    if (selected("gradient-interior-bound")) {
      const double D = std::min(config.params.horizon_T,
                                (config.box_hi[0] - config.box_lo[0]));
      reports.push_back(check_gradient_interior_bound(u, {D / 4.0, D / 8.0}));
    }
    if (selected("miranda-talenti")) {
      // The identity is f-independent; a harmonic polynomial keeps both sides nontrivial.
      const SpatialFn f_saddle = [](Vec2 x) { return x.x * x.x - x.y * x.y; };
      auto r = check_miranda_talenti(g, f_saddle, cutoff, tol::miranda_talenti_C * h);
      mt_residuals.push_back(r.lhs);
      rows.push_back(SeriesRow{"miranda_talenti_rel_residual", lvl, h, r.lhs});
      reports.push_back(r);
    }
    if (selected("fundamental-identity")) {
      const IdentityLedger led =
          fundamental_identity(u, cutoff, config.params.p, config.params.epsilon);
      const double rel = std::abs(led.residual()) / std::max(std::abs(led.term_I), 1e-300);
      rel_residual_identity.push_back(rel);
      rows.push_back(SeriesRow{"fundamental_identity_rel_residual", lvl, h, rel});
      detail::write_text(opt.out_dir / ("fundamental_identity_level" + std::to_string(lvl) +
                                        ".json"),
                         to_json(led).dump(2) + "\n");
    }
    if (selected("time-derivative-bound")) {
      reports.push_back(check_time_derivative_bound(u, cutoff, config.params.p,
                                                    config.params.epsilon,
                                                    tol::time_derivative_C * h));
    }
    if (selected("weak-time-derivative")) {
      auto r = check_weak_time_derivative(u, cutoff, config.params.p, config.params.epsilon,
                                          tol::weak_pairing_C * h);
      weak_residuals.push_back(r.lhs);
      rows.push_back(SeriesRow{"weak_time_derivative_residual", lvl, h, r.lhs});
      reports.push_back(r);
    }
    if (selected("elementary-inequality")) {
      reports.push_back(check_elementary_inequality(u, config.params.epsilon,
                                                    GradVMode::chain_rule,
                                                    tol::elementary_rel_slack));
    }
  }

  // Sweep checks run once, on the base grid.
  if (wants_sweep) {
    const SpaceTimeGrid g = detail::grid_at_level(config, 0);
    const CutoffFunction cutoff = detail::make_cutoff(config, g);
    std::vector<SpaceTimeField> sweep;
    const int jobs = std::max(1, opt.jobs);
    std::vector<std::future<SpaceTimeField>> futs;
    for (std::size_t s = 0; s < config.eps_list.size(); ++s) {
      auto job = [&, s] {
        RunConfig cc = config;
        cc.params.epsilon = config.eps_list[s];
        Profile prof = make_profile(cc.profile, cc.params);
        return solve(detail::make_data(cc, prof), g);
      };
      if (jobs > 1)
        futs.push_back(std::async(std::launch::async, job));
      else
        sweep.push_back(job());
    }
    for (auto& f : futs) sweep.push_back(f.get());
    if (selected("second-derivative-bound")) {
      const BoundMode mode =
          config.mode == "assertion" ? BoundMode::assertion : BoundMode::exploration;
      SweepReport sr = check_second_derivative_bound(sweep, config.eps_list, cutoff,
                                                     config.params.p, mode);
      for (std::size_t s = 0; s < sr.entries.size(); ++s)
        rows.push_back(SeriesRow{"second_derivative_ratio", static_cast<int>(s),
                                 sr.entries[s].epsilon, sr.entries[s].ratio});
      reports.push_back(sr.report);
    }
    if (selected("epsilon-convergence")) {
      const Region compact = Region::interior(g, std::max(2, g.nx[0] / 8),
                                              std::max(1, g.nt / 5), g.nt - 1);
      std::vector<double> diffs;
      auto r = epsilon_convergence(sweep, config.eps_list, compact, &diffs);
      for (std::size_t s = 0; s < diffs.size(); ++s)
        rows.push_back(SeriesRow{"epsilon_convergence_diff", static_cast<int>(s),
                                 config.eps_list[s], diffs[s]});
      reports.push_back(r);
    }
  }

  // Refinement verdicts: residual-type checks pass on decay across levels.
  if (opt.levels >= 2) {
    auto refinement_report = [&](const std::string& name, const std::vector<double>& resid) {
      if (resid.size() < 2) return;
      bool monotone = true;
      for (std::size_t s = 0; s + 1 < resid.size(); ++s)
        if (!(resid[s + 1] < resid[s] || resid[s] == 0.0)) monotone = false;
      ReportContext ctx;
      ctx.p = config.params.p;
      ctx.epsilon = config.params.epsilon;
      auto rep = EstimateReport::inequality(name + "_refinement", resid.back(), resid.front(),
                                            0.0, ctx);
      rep.pass = monotone;
      reports.push_back(rep);
    };
    refinement_report("fundamental_identity", rel_residual_identity);
    refinement_report("miranda_talenti", mt_residuals);
    refinement_report("weak_time_derivative", weak_residuals);
  }

  detail::emit(reports, opt, "reports");
  if (!rows.empty()) write_series_csv(rows, opt.out_dir / "series.csv");
  const auto t1 = std::chrono::steady_clock::now();
  detail::write_manifest(config, opt, info,
                         std::chrono::duration<double, std::milli>(t1 - t0).count());
  bool all_pass = true;
  for (const auto& r : reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  lhs=" << r.lhs
              << "  rhs=" << r.rhs << "  tol=" << r.tolerance << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 2;
}

/// `sweep`: ε-sweep shorthand (defaults the check list).
inline int run_sweep(RunConfig config, const RunOptions& opt) {
  if (config.checks.empty())
    config.checks = {"epsilon-convergence", "second-derivative-bound"};
  return run_verify(config, opt);
}

}  // namespace plab
