#pragma once

#include "curveflow/io.hpp"

namespace curveflow {

struct ScenarioDef {
  std::string name;
  std::string summary;
  ReferenceCurveSpec curve;
  std::string preset;  // flow_preset name
  Real lambda = 1;     // used by the elastic preset
  SolverConfig solver;
};

inline const std::vector<ScenarioDef>& scenario_catalog() {
  static const std::vector<ScenarioDef> catalog = [] {
    std::vector<ScenarioDef> list;

    {
      ScenarioDef d;
      d.name = "circle_csf";
      d.summary = "unit circle shrinking to a point; exact radius and rate oracle";
      d.curve.kind = ReferenceCurveSpec::Kind::Circle;
      d.curve.radius = 1.0;
      d.curve.nodes = 512;
      d.preset = "csf";
      d.solver.t_end = 1.0;
      d.solver.dt_max = 1e-4;
      d.solver.cfl = 0.05;
      d.solver.kappa_max = 100;
      d.solver.snapshot_stride = 25;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "grim_reaper_csf";
      d.summary = "translating soliton; the shape rides upward at unit speed";
      d.curve.kind = ReferenceCurveSpec::Kind::GrimReaper;
      d.curve.scale = 1.0;
      d.curve.S = 6;
      d.curve.h = 0.01;
      d.preset = "csf";
      d.solver.t_end = 0.5;
      d.solver.dt_max = 1e-3;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "power_end_csf";
      d.summary = "graph with slowly flattening power-law ends straightening out";
      d.curve.kind = ReferenceCurveSpec::Kind::GraphPowerEnd;
      d.curve.alpha = 0.3;
      d.curve.S = 60;
      d.curve.h = 0.05;
      d.preset = "csf";
      d.solver.t_end = 50;
      d.solver.dt_max = 0.02;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "figure_eight_csf_blowup";
      d.summary = "loop with horizontal ends collapsing in finite time";
      d.curve.kind = ReferenceCurveSpec::Kind::Loop;
      d.curve.scale = 0.75;
      d.curve.S = 12;
      d.curve.h = 0.01;
      d.preset = "csf";
      d.solver.t_end = 5;
      d.solver.dt_max = 2.5e-4;
      d.solver.cfl = 0.05;
      d.solver.kappa_max = 100;
      d.solver.snapshot_stride = 25;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "gaussian_ef_threshold";
      d.summary = "small hump below the energy threshold flattening to a line";
      d.curve.kind = ReferenceCurveSpec::Kind::GraphGaussian;
      d.curve.amplitude = 0.3;
      d.curve.width = 1.0;
      d.curve.S = 20;
      d.curve.h = 0.02;
      d.preset = "elastic";
      d.lambda = 1.0;
      d.solver.t_end = 50;
      d.solver.dt_max = 0.01;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "gaussian_ef_dissipation";
      d.summary = "hump relaxing under the elastic flow; exact dissipation audit";
      d.curve.kind = ReferenceCurveSpec::Kind::GraphGaussian;
      d.curve.amplitude = 0.5;
      d.curve.width = 1.0;
      d.curve.S = 15;
      d.curve.h = 0.02;
      d.preset = "elastic";
      d.lambda = 1.0;
      d.solver.t_end = 2;
      d.solver.dt_max = 1e-4;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "two_loop_ef";
      d.summary = "two symmetric loops drifting apart under the elastic flow";
      d.curve.kind = ReferenceCurveSpec::Kind::TwoLoop;
      d.curve.separation = 2.5;
      d.curve.S = 15;
      d.curve.h = 0.01;
      d.preset = "elastic";
      d.lambda = 1.0;
      d.solver.t_end = 2;
      d.solver.dt_max = 1e-3;
      d.solver.snapshot_stride = 25;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "borderline_stationary";
      d.summary = "the 2 sech arch held fixed by the elastic flow";
      d.curve.kind = ReferenceCurveSpec::Kind::BorderlineElastica;
      d.curve.S = 20;
      d.curve.h = 0.01;
      d.preset = "elastic";
      d.lambda = 1.0;
      d.solver.t_end = 1;
      d.solver.dt_max = 1e-3;
      d.solver.resample_every = 0;  // keep nodes comparable across time
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "sdf_decay";
      d.summary = "fourth-order flow with monotone direction energy";
      d.curve.kind = ReferenceCurveSpec::Kind::GraphGaussian;
      d.curve.amplitude = 0.5;
      d.curve.width = 1.0;
      d.curve.S = 15;
      d.curve.h = 0.02;
      d.preset = "sdf";
      d.solver.t_end = 0.5;
      d.solver.dt_max = 1e-3;
      list.push_back(d);
    }
    {
      ScenarioDef d;
      d.name = "chen_decay";
      d.summary = "tangentially augmented fourth-order flow; direction energy still decays";
      d.curve.kind = ReferenceCurveSpec::Kind::GraphGaussian;
      d.curve.amplitude = 0.5;
      d.curve.width = 1.0;
      d.curve.S = 15;
      d.curve.h = 0.02;
      d.preset = "chen";
      d.solver.t_end = 0.5;
      d.solver.dt_max = 1e-3;
      list.push_back(d);
    }
    return list;
  }();
  return catalog;
}

inline const ScenarioDef& find_scenario(const std::string& name) {
  for (const auto& d : scenario_catalog())
    if (d.name == name) return d;
  throw InvalidInput("unknown scenario: " + name);
}

struct ScenarioResult {
  const ScenarioDef* def = nullptr;
  Trajectory trajectory;
  io::json verdict;
};

namespace detail {

inline Real mean_radius(const DiscreteCurve& g) {
  Real acc = 0;
  std::size_t n = 0;
  for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i, ++n) {
    Real r = 0;
    for (int c = 0; c < g.dim; ++c) r += sqr(g.pts[i * g.dim + c]);
    acc += std::sqrt(r);
  }
  return acc / static_cast<Real>(n);
}

inline Real point_to_polyline(const DiscreteCurve& poly, Real px, Real py) {
  Real best = std::numeric_limits<Real>::max();
  const std::size_t b = poly.interior_begin(), e = poly.interior_end();
  for (std::size_t i = b; i + 1 < e; ++i) {
    Real ax = poly.pts[i * 2], ay = poly.pts[i * 2 + 1];
    Real bx = poly.pts[(i + 1) * 2], by = poly.pts[(i + 1) * 2 + 1];
    Real vx = bx - ax, vy = by - ay;
    Real len_sq = vx * vx + vy * vy;
    Real t = len_sq > 0 ? ((px - ax) * vx + (py - ay) * vy) / len_sq : 0;
    t = std::clamp(t, Real(0), Real(1));
    best = std::min(best, std::hypot(px - (ax + t * vx), py - (ay + t * vy)));
  }
  return best;
}

inline Real sup_tangent_deviation(const DiscreteCurve& g, const CurveFields& f) {
  Real dev = 0;
  for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i) {
    Real d = sqr(f.t[i * g.dim] - 1);
    for (int c = 1; c < g.dim; ++c) d += sqr(f.t[i * g.dim + c]);
    dev = std::max(dev, std::sqrt(d));
  }
  return dev;
}

inline io::json blowup_verdict(const Trajectory& traj) {
  io::json v;
  v["terminated_in_blowup"] = traj.termination == Termination::Blowup;
  if (traj.termination != Termination::Blowup) return v;
  auto fit = fit_blowup_rate(traj);
  v["t_hat"] = fit.t_hat;
  v["beta"] = fit.beta;
  v["fit_samples"] = fit.samples;
  v["fit_window"] = io::json::array({fit.window_lo, fit.window_hi});
  v["fit_residual_rms"] = fit.residual_rms;
  return v;
}

inline io::json scenario_verdict(const ScenarioDef& def, const Trajectory& traj) {
  io::json v;
  if (def.name == "circle_csf") {
    v = blowup_verdict(traj);
    // radius against the shrinking-circle law up to t = 0.4
    Real worst = 0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      Real t = traj.stats[k].t;
      if (t > 0.4) break;
      Real exact = std::sqrt(1 - 2 * t);
      worst = std::max(worst, std::abs(mean_radius(traj.snapshots[k]) - exact) / exact);
    }
    v["radius_max_rel_error"] = worst;
    // rate product over the fit window: sqrt(T_hat - t) * integral(kappa^2)
    if (traj.termination == Termination::Blowup) {
      auto fit = fit_blowup_rate(traj);
      Real lo = std::numeric_limits<Real>::max(), hi = 0;
      for (std::size_t i = fit.first; i < fit.last; ++i) {
        Real prod = std::sqrt(fit.t_hat - traj.times[i]) * 2 * traj.bending_series[i];
        lo = std::min(lo, prod);
        hi = std::max(hi, prod);
      }
      v["rate_product_min"] = lo;
      v["rate_product_max"] = hi;
    }
  } else if (def.name == "grim_reaper_csf") {
    // distance from evolved interior nodes (|s| <= 4) to the initial shape
    // translated by t * e2
    const auto& g0 = traj.snapshots.front();
    const auto& gt = traj.snapshots.back();
    Real t = traj.stats.back().t;
    DiscreteCurve shifted = g0;
    for (std::size_t i = 0; i < shifted.total_nodes(); ++i)
      shifted.pts[i * 2 + 1] += t / def.curve.scale;
    Real worst = 0;
    for (std::size_t i = gt.interior_begin(); i < gt.interior_end(); ++i) {
      if (std::abs(gt.param(i)) > 4) continue;
      worst = std::max(worst,
                       point_to_polyline(shifted, gt.pts[i * 2], gt.pts[i * 2 + 1]));
    }
    v["translation_error"] = worst;
    v["t_final"] = t;
  } else if (def.name == "power_end_csf") {
    Real b0 = traj.stats.front().bending;
    Real b_end = traj.stats.back().bending;
    bool monotone = true;
    Real max_uptick = 0;
    for (std::size_t k = 1; k < traj.stats.size(); ++k) {
      Real up = traj.stats[k].bending - traj.stats[k - 1].bending;
      max_uptick = std::max(max_uptick, up);
      if (up > 1e-9 * std::max(b0, Real(1))) monotone = false;
    }
    auto f = compute_fields(traj.snapshots.back());
    v["bending_initial"] = b0;
    v["bending_final"] = b_end;
    v["bending_ratio"] = b_end / b0;
    v["bending_monotone"] = monotone;
    v["bending_max_uptick"] = max_uptick;
    v["final_tangent_deviation"] = sup_tangent_deviation(traj.snapshots.back(), f);
  } else if (def.name == "figure_eight_csf_blowup") {
    v = blowup_verdict(traj);
    auto track = loop_tracker(traj);
    v["rotation"] = track.rotation;
    v["rotation_preserved"] = track.rotation_preserved;
  } else if (def.name == "gaussian_ef_threshold") {
    v["initial_energy"] = traj.initial_energy;
    v["below_threshold"] = traj.initial_energy < 8.0;
    const auto& gt = traj.snapshots.back();
    auto f = compute_fields(gt);
    auto cls = classify_limit(gt, f);
    v["final_bending"] = traj.stats.back().bending;
    v["final_tangent_deviation"] = cls.tangent_dev;
    v["verdict"] = cls.verdict == LimitVerdict::Line ? "line"
                   : cls.verdict == LimitVerdict::BorderlineElastica
                       ? "borderline_elastica"
                       : "unknown";
  } else if (def.name == "gaussian_ef_dissipation") {
    auto audit = energy_decay_audit(traj);
    v["dissipated"] = audit.dissipated;
    v["cumulative_defect"] = audit.cumulative_defect;
    v["defect_over_dissipated"] =
        audit.dissipated > 0 ? audit.cumulative_defect / audit.dissipated : 0.0;
    v["energy_monotone"] = audit.energy_monotone;
  } else if (def.name == "two_loop_ef") {
    auto track = loop_tracker(traj);
    v["rotation"] = track.rotation;
    v["rotation_preserved"] = track.rotation_preserved;
    v["separations"] = track.separations;
    std::size_t run = track.separations.empty() ? 0 : 1;
    std::size_t best = run;
    for (std::size_t k = 1; k < track.separations.size(); ++k) {
      run = track.separations[k] > track.separations[k - 1] ? run + 1 : 1;
      best = std::max(best, run);
    }
    v["longest_increasing_run"] = best;
  } else if (def.name == "borderline_stationary") {
    const auto& g0 = traj.snapshots.front();
    const auto& gt = traj.snapshots.back();
    Real drift = 0;
    if (g0.pts.size() == gt.pts.size()) {
      for (std::size_t i = g0.interior_begin(); i < g0.interior_end(); ++i) {
        Real d = 0;
        for (int c = 0; c < 2; ++c) d += sqr(gt.pts[i * 2 + c] - g0.pts[i * 2 + c]);
        drift = std::max(drift, std::sqrt(d));
      }
      v["max_node_drift"] = drift;
    } else {
      v["max_node_drift"] = nullptr;
    }
    v["drift_bound"] = 10 * sqr(def.curve.h);
  } else if (def.name == "sdf_decay" || def.name == "chen_decay") {
    auto audit = energy_decay_audit(traj);
    v["direction_monotone"] = audit.direction_monotone;
    v["direction_dissipated"] = audit.direction_dissipated;
    v["direction_defect"] = audit.direction_cumulative_defect;
    v["defect_over_dissipated"] = audit.direction_dissipated > 0
                                      ? audit.direction_cumulative_defect /
                                            audit.direction_dissipated
                                      : 0.0;
  }
  return v;
}

}  // namespace detail

inline ScenarioResult run_scenario(const ScenarioDef& def) {
  ScenarioResult result;
  result.def = &def;
  auto g0 = build_reference(def.curve);
  auto params = flow_preset(def.preset, def.lambda);
  result.trajectory = simulate(g0, params, def.solver);
  result.verdict = detail::scenario_verdict(def, result.trajectory);
  return result;
}

inline std::filesystem::path persist_scenario(const ScenarioResult& result,
                                              const std::filesystem::path& out_root) {
  io::json extra;
  extra["scenario"] = result.def->summary;
  extra["verdict"] = result.verdict;
  return io::write_run_directory(out_root, result.def->name, result.trajectory, extra);
}

}  // namespace curveflow
