#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "curveflow/scenarios.hpp"
#include "oracles.hpp"

using namespace curveflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("curveflow_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DiscreteCurve small_gaussian() {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::GraphGaussian;
  spec.amplitude = 0.5;
  spec.width = 1.0;
  spec.S = 6;
  spec.h = 0.05;
  return build_reference(spec);
}

Trajectory small_run() {
  auto g = small_gaussian();
  auto params = flow_preset("elastic", 1.0);
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.dt_max = 1e-3;
  cfg.snapshot_stride = 10;
  return simulate(g, params, cfg);
}

}  // namespace

TEST_CASE("curve csv round trip") {
  auto dir = fresh_dir("csv");
  auto g = small_gaussian();
  auto f = compute_fields(g);
  auto path = dir / "curve.csv";
  io::write_curve_csv(path, g, f);

  auto back = io::read_curve_csv(path);
  REQUIRE(back.dim == g.dim);
  REQUIRE(back.ends == EndCondition::Clamped);
  REQUIRE(back.total_nodes() - 2 * back.ghost ==
          g.interior_end() - g.interior_begin());
  REQUIRE(back.h == Catch::Approx(g.h).epsilon(1e-12));
  REQUIRE(back.param(back.interior_begin()) ==
          Catch::Approx(g.param(g.interior_begin())).margin(1e-12));

  // values survive the text round trip at full precision
  Real worst = 0;
  std::size_t nb = back.interior_begin();
  for (std::size_t i = g.interior_begin(); i < g.interior_end(); ++i, ++nb) {
    for (int c = 0; c < g.dim; ++c)
      worst = std::max(worst, std::abs(back.pts[nb * back.dim + c] -
                                       g.pts[i * g.dim + c]));
  }
  REQUIRE(worst <= 1e-15);
}

TEST_CASE("curve csv rejects malformed input") {
  auto dir = fresh_dir("csv_bad");

  {
    std::ofstream out(dir / "bad_header.csv");
    out << "a,b,c\n0,0,0\n";
  }
  REQUIRE_THROWS_AS(io::read_curve_csv(dir / "bad_header.csv"), InvalidInput);

  {
    std::ofstream out(dir / "too_few.csv");
    out << "s,x1,x2,k1,k2\n";
    for (int i = 0; i < 3; ++i)
      out << 0.1 * i << ",0,0,0,0\n";
  }
  REQUIRE_THROWS_AS(io::read_curve_csv(dir / "too_few.csv"), InvalidInput);

  {
    std::ofstream out(dir / "uneven.csv");
    out << "s,x1,x2,k1,k2\n";
    double s[6] = {0, 0.1, 0.2, 0.35, 0.4, 0.5};
    for (double si : s) out << si << "," << si << ",0,0,0\n";
  }
  REQUIRE_THROWS_AS(io::read_curve_csv(dir / "uneven.csv"), InvalidInput);

  REQUIRE_THROWS_AS(io::read_curve_csv(dir / "missing.csv"), InvalidInput);
}

TEST_CASE("run directory layout") {
  auto dir = fresh_dir("rundir");
  auto traj = small_run();
  io::json extra;
  extra["note"] = "layout-test";
  auto run_dir = io::write_run_directory(dir, "demo", traj, extra);

  REQUIRE(run_dir == dir / "demo");
  REQUIRE(fs::exists(run_dir / "meta.json"));
  REQUIRE(fs::exists(run_dir / "series.jsonl"));

  auto meta = io::json::parse(slurp(run_dir / "meta.json"));
  REQUIRE(meta["name"] == "demo");
  REQUIRE(meta["note"] == "layout-test");
  REQUIRE(meta["termination"] == "reached_end");
  REQUIRE(meta["snapshot_count"].get<std::size_t>() == traj.snapshots.size());
  REQUIRE(meta["params"]["order"].get<int>() == 4);

  // one JSON line per snapshot, parseable, times increasing
  std::istringstream series(slurp(run_dir / "series.jsonl"));
  std::string line;
  std::size_t count = 0;
  Real prev_t = -1;
  while (std::getline(series, line)) {
    auto rec = io::json::parse(line);
    REQUIRE(rec["snap"].get<std::size_t>() == count);
    Real t = rec["t"].get<Real>();
    REQUIRE(t > prev_t);
    prev_t = t;
    ++count;
  }
  REQUIRE(count == traj.snapshots.size());

  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    auto snap_path = run_dir / ("snap_" + std::to_string(k) + ".csv");
    REQUIRE(fs::exists(snap_path));
  }
  auto snap0 = io::read_curve_csv(run_dir / "snap_0.csv");
  REQUIRE(snap0.total_nodes() - 2 * snap0.ghost ==
          traj.snapshots.front().interior_end() -
              traj.snapshots.front().interior_begin());

  // appended diagnostic records land at the end of the series file
  io::append_series_records(run_dir, {io::json{{"event", "done"}}});
  std::istringstream again(slurp(run_dir / "series.jsonl"));
  std::size_t total = 0;
  while (std::getline(again, line)) ++total;
  REQUIRE(total == count + 1);
}

TEST_CASE("series output is deterministic") {
  auto dir_a = fresh_dir("det_a");
  auto dir_b = fresh_dir("det_b");
  auto run_a = io::write_run_directory(dir_a, "demo", small_run());
  auto run_b = io::write_run_directory(dir_b, "demo", small_run());
  REQUIRE(slurp(run_a / "series.jsonl") == slurp(run_b / "series.jsonl"));
  REQUIRE(slurp(run_a / "meta.json") == slurp(run_b / "meta.json"));
  REQUIRE(slurp(run_a / "snap_0.csv") == slurp(run_b / "snap_0.csv"));
}

TEST_CASE("energy report on the unit circle and a graph") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::Circle;
  spec.radius = 1.0;
  spec.nodes = 512;
  auto g = build_reference(spec);
  auto f = compute_fields(g);
  auto rep = io::energy_report(g, f, 1.0, 1.0);
  const Real pi = oracle::pi;
  REQUIRE(rep["length"].get<Real>() == Catch::Approx(2 * pi).epsilon(1e-4));
  REQUIRE(rep["direction"].get<Real>() == Catch::Approx(2 * pi).epsilon(1e-4));
  REQUIRE(rep["bending"].get<Real>() == Catch::Approx(pi).epsilon(1e-4));
  REQUIRE(rep["adapted"].get<Real>() == Catch::Approx(3 * pi).epsilon(1e-4));
  REQUIRE_FALSE(rep.contains("graphical_ends"));

  auto gg = small_gaussian();
  auto fg = compute_fields(gg);
  auto repg = io::energy_report(gg, fg, 1.0, 0.5);
  REQUIRE(repg.contains("graphical_ends"));
  REQUIRE(repg["graphical_ends"]["graphical"].get<bool>());
  REQUIRE(repg["graphical_ends"]["bound_holds"].get<bool>());
  REQUIRE(repg["lambda"].get<Real>() == 0.5);
}

TEST_CASE("interpolation batch csv and summary") {
  auto dir = fresh_dir("interp");
  auto rows = run_interp_batch(7, 6);
  REQUIRE(rows.size() == 6 * 8);

  auto path = dir / "interp.csv";
  io::write_interp_csv(path, rows);
  std::istringstream in(slurp(path));
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "trial,lemma,p,eps,ell,a,b,c,k,lhs,rhs,ratio");
  std::string line;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) ++data_rows;
  REQUIRE(data_rows == rows.size());

  auto summary = io::interp_summary_json(rows);
  REQUIRE(summary["checks"].get<std::size_t>() == rows.size());
  auto fam = summary["families"];
  REQUIRE(fam.size() == 3);
  REQUIRE(fam["first_derivative"]["count"].get<std::size_t>() == 6);
  REQUIRE(fam["sobolev_gn"]["count"].get<std::size_t>() == 24);
  REQUIRE(fam["curvature_monomial"]["count"].get<std::size_t>() == 18);
  for (auto& [k, s] : fam.items()) {
    REQUIRE(s["max_ratio"].get<Real>() > 0);
    REQUIRE(s["median_ratio"].get<Real>() <= s["max_ratio"].get<Real>());
  }
}

TEST_CASE("scenario catalog") {
  const auto& catalog = scenario_catalog();
  REQUIRE(catalog.size() >= 9);
  const char* required[] = {
      "circle_csf",       "grim_reaper_csf",        "power_end_csf",
      "figure_eight_csf_blowup", "gaussian_ef_threshold", "two_loop_ef",
      "borderline_stationary",   "sdf_decay",             "chen_decay"};
  for (const char* name : required) {
    const auto& def = find_scenario(name);
    REQUIRE(def.name == name);
    REQUIRE_FALSE(def.summary.empty());
  }
  REQUIRE(find_scenario("circle_csf").preset == "csf");
  REQUIRE(find_scenario("two_loop_ef").preset == "elastic");
  REQUIRE_THROWS_AS(find_scenario("no_such_scenario"), InvalidInput);
}

TEST_CASE("scenario run produces a verdict and a run directory") {
  auto dir = fresh_dir("scenario");
  ScenarioDef def = find_scenario("chen_decay");
  def.solver.t_end = 0.1;  // shortened for the smoke test
  auto result = run_scenario(def);
  REQUIRE(result.trajectory.termination == Termination::ReachedEnd);
  REQUIRE(result.verdict["direction_monotone"].get<bool>());
  REQUIRE(result.verdict["defect_over_dissipated"].get<Real>() < 0.1);

  auto run_dir = persist_scenario(result, dir);
  auto meta = io::json::parse(slurp(run_dir / "meta.json"));
  REQUIRE(meta["name"] == "chen_decay");
  REQUIRE(meta.contains("verdict"));
  REQUIRE(meta["verdict"]["direction_monotone"].get<bool>());
}
