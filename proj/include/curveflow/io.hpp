#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "curveflow/diagnostics.hpp"
#include "curveflow/energy.hpp"
#include "curveflow/flow.hpp"
#include "curveflow/interp.hpp"

namespace curveflow::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Curve CSV: header `s,x1,...,xn,k1,...,kn`, one row per interior node,
// full round-trip precision. Reading yields an open curve without ghost
// layers (end stencils fall back to one-sided differences).
// ---------------------------------------------------------------------------

inline void write_curve_csv(const std::filesystem::path& path, const DiscreteCurve& g,
                            const CurveFields& f) {
  std::ofstream out(path);
  require(out.good(), "cannot open curve file for writing: " + path.string());
  out << std::setprecision(17);
  out << "s";
  for (int c = 1; c <= g.dim; ++c) out << ",x" << c;
  for (int c = 1; c <= g.dim; ++c) out << ",k" << c;
  out << "\n";
  for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i) {
    out << g.param(i);
    for (int c = 0; c < g.dim; ++c) out << "," << g.pts[i * g.dim + c];
    for (int c = 0; c < g.dim; ++c) out << "," << f.kappa[i * g.dim + c];
    out << "\n";
  }
  require(out.good(), "failed while writing curve file: " + path.string());
}

inline DiscreteCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open curve file: " + path.string());
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), "curve file is empty");
  // header: s,x1..xn,k1..kn  ->  dim = (columns - 1) / 2
  std::size_t cols = 1 + static_cast<std::size_t>(
                             std::count(header.begin(), header.end(), ','));
  require(cols >= 3 && cols % 2 == 1,
          "curve file header must be s,x1,...,xn,k1,...,kn");
  int dim = static_cast<int>((cols - 1) / 2);
  require(header.rfind("s,x1", 0) == 0, "curve file must start with columns s,x1");

  DiscreteCurve g;
  g.dim = dim;
  g.ends = EndCondition::Clamped;
  g.ghost = 0;
  std::vector<Real> svals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<Real> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    require(vals.size() == cols, "curve file row has the wrong column count");
    svals.push_back(vals[0]);
    for (int c = 0; c < dim; ++c) g.pts.push_back(vals[1 + static_cast<std::size_t>(c)]);
  }
  require(svals.size() >= 5, "curve file needs at least five nodes");
  g.s0 = svals.front();
  g.h = (svals.back() - svals.front()) / static_cast<Real>(svals.size() - 1);
  require(g.h > 0, "curve file parameter column must increase");
  for (std::size_t i = 0; i < svals.size(); ++i)
    require(std::abs(svals[i] - (g.s0 + static_cast<Real>(i) * g.h)) <= 1e-8 * std::max(Real(1), std::abs(svals.back())),
            "curve file parameter column must be uniformly spaced");
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Run directory: <out>/<name>/{meta.json, series.jsonl, snap_<k>.csv}
// ---------------------------------------------------------------------------

inline json flow_params_json(const FlowParams& p) {
  return json{{"sigma", p.sigma},
              {"lambda", p.lambda},
              {"mu", p.mu},
              {"vartheta", p.vartheta},
              {"order", p.order()}};
}

inline std::string termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedEnd: return "reached_end";
    case Termination::Blowup: return "blowup";
    case Termination::StepFailure: return "step_failure";
  }
  return "unknown";
}

inline json trajectory_meta(const Trajectory& traj) {
  json meta;
  meta["params"] = flow_params_json(traj.params);
  meta["termination"] = termination_name(traj.termination);
  meta["t_final"] = traj.t_final;
  meta["initial_energy"] = traj.initial_energy;
  meta["accepted_steps"] = traj.accepted_steps;
  meta["rejected_steps"] = traj.rejected_steps;
  meta["snapshot_count"] = traj.snapshots.size();
  if (traj.termination == Termination::Blowup)
    meta["blowup_estimate"] = traj.blowup_estimate;
  return meta;
}

// Writes the standard layout and returns the run directory. `extra_meta`
// is merged into meta.json (scenario verdicts, diagnostics, seeds).
inline std::filesystem::path write_run_directory(const std::filesystem::path& out_root,
                                                 const std::string& name,
                                                 const Trajectory& traj,
                                                 const json& extra_meta = json::object()) {
  namespace fs = std::filesystem;
  fs::path dir = out_root / name;
  fs::create_directories(dir);

  json meta = trajectory_meta(traj);
  meta["name"] = name;
  for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it)
    meta[it.key()] = it.value();
  {
    std::ofstream m(dir / "meta.json");
    require(m.good(), "cannot write meta.json in " + dir.string());
    m << meta.dump(2) << "\n";
  }

  {
    std::ofstream s(dir / "series.jsonl");
    require(s.good(), "cannot write series.jsonl in " + dir.string());
    for (std::size_t k = 0; k < traj.stats.size(); ++k) {
      const auto& st = traj.stats[k];
      json line{{"snap", k},          {"t", st.t},
                {"energy", st.energy}, {"bending", st.bending},
                {"direction", st.direction}, {"kappa_sup", st.kappa_sup},
                {"length", st.length}};
      s << line.dump() << "\n";
    }
  }

  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& g = traj.snapshots[k];
    auto f = compute_fields(g);
    write_curve_csv(dir / ("snap_" + std::to_string(k) + ".csv"), g, f);
  }
  return dir;
}

// Appends diagnostic records (one JSON object per line) to a run's series.
inline void append_series_records(const std::filesystem::path& run_dir,
                                  const std::vector<json>& records) {
  std::ofstream s(run_dir / "series.jsonl", std::ios::app);
  require(s.good(), "cannot append to series.jsonl in " + run_dir.string());
  for (const auto& r : records) s << r.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Energy report
// ---------------------------------------------------------------------------

inline json energy_report(const DiscreteCurve& g, const CurveFields& f, Real sigma,
                          Real lambda) {
  std::vector<Real> ones(g.total_nodes(), 1.0);
  json rep;
  rep["length"] = integrate(g, ones, f.w);
  rep["direction"] = direction_energy(g, f);
  rep["bending"] = bending_energy(g, f);
  rep["sigma"] = sigma;
  rep["lambda"] = lambda;
  rep["adapted"] = adapted_energy(g, f, sigma, lambda);
  if (g.ends == EndCondition::Clamped) {
    auto ends = graphical_end_report(g, f);
    rep["graphical_ends"] = json{{"graphical", ends.graphical},
                                 {"min_tangent_x", ends.min_tx},
                                 {"direction_value", ends.direction_value},
                                 {"slope_l2_half", ends.slope_l2_half},
                                 {"bound_holds", ends.bound_holds}};
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Interpolation batch report
// ---------------------------------------------------------------------------

inline void write_interp_csv(const std::filesystem::path& path,
                             const std::vector<InterpBatchRow>& rows) {
  std::ofstream out(path);
  require(out.good(), "cannot open batch report for writing: " + path.string());
  out << std::setprecision(17);
  out << "trial,lemma,p,eps,ell,a,b,c,k,lhs,rhs,ratio\n";
  for (const auto& r : rows) {
    out << r.trial << "," << r.lemma << "," << r.p << "," << r.eps << "," << r.ell
        << "," << r.a << "," << r.b << "," << r.c << "," << r.k << "," << r.lhs << ","
        << r.rhs << "," << r.ratio << "\n";
  }
  require(out.good(), "failed while writing batch report: " + path.string());
}

inline json interp_summary_json(const std::vector<InterpBatchRow>& rows) {
  json out;
  out["checks"] = rows.size();
  json families = json::object();
  for (const auto& [lemma, st] : summarize_interp_batch(rows)) {
    families[lemma] = json{{"count", st.count},
                           {"max_ratio", st.max_ratio},
                           {"median_ratio", st.median_ratio}};
  }
  out["families"] = families;
  return out;
}

}  // namespace curveflow::io
