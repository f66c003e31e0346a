// Command-line front end: simulate flows, report energies, verify the
// interpolation inequalities, classify limit curves, and run the scenario
// catalog.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>

#include "curveflow/scenarios.hpp"

namespace cf = curveflow;
using cf::io::json;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) throw cf::InvalidInput("this command needs --config <path>");
  std::ifstream in(path);
  if (!in.good()) throw cf::InvalidInput("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw cf::InvalidInput("config is not valid JSON: " + std::string(err.what()));
  }
}

cf::ReferenceCurveSpec curve_spec_from_json(const json& j) {
  cf::ReferenceCurveSpec spec;
  const std::string kind = j.value("kind", "");
  using Kind = cf::ReferenceCurveSpec::Kind;
  if (kind == "line")
    spec.kind = Kind::Line;
  else if (kind == "circle")
    spec.kind = Kind::Circle;
  else if (kind == "borderline_elastica")
    spec.kind = Kind::BorderlineElastica;
  else if (kind == "grim_reaper")
    spec.kind = Kind::GrimReaper;
  else if (kind == "loop")
    spec.kind = Kind::Loop;
  else if (kind == "two_loop")
    spec.kind = Kind::TwoLoop;
  else if (kind == "graph_power_end")
    spec.kind = Kind::GraphPowerEnd;
  else if (kind == "graph_power_sinlog")
    spec.kind = Kind::GraphPowerSinLog;
  else if (kind == "graph_gaussian")
    spec.kind = Kind::GraphGaussian;
  else
    throw cf::InvalidInput("unknown curve kind: \"" + kind + "\"");
  spec.dim = j.value("dim", spec.dim);
  spec.S = j.value("S", spec.S);
  spec.h = j.value("h", spec.h);
  spec.radius = j.value("radius", spec.radius);
  spec.nodes = j.value("nodes", spec.nodes);
  spec.s_offset = j.value("s_offset", spec.s_offset);
  spec.scale = j.value("scale", spec.scale);
  spec.separation = j.value("separation", spec.separation);
  spec.alpha = j.value("alpha", spec.alpha);
  spec.amplitude = j.value("amplitude", spec.amplitude);
  spec.width = j.value("width", spec.width);
  if (j.contains("direction")) spec.direction = j["direction"].get<std::vector<cf::Real>>();
  return spec;
}

cf::DiscreteCurve curve_from_config(const json& config) {
  if (config.contains("csv")) return cf::io::read_curve_csv(config["csv"].get<std::string>());
  if (config.contains("curve")) return cf::build_reference(curve_spec_from_json(config["curve"]));
  throw cf::InvalidInput("config needs a \"curve\" spec or a \"csv\" path");
}

cf::FlowParams flow_from_json(const json& j) {
  if (j.contains("preset"))
    return cf::flow_preset(j["preset"].get<std::string>(), j.value("lambda", cf::Real(1)));
  cf::FlowParams p;
  p.sigma = j.value("sigma", p.sigma);
  p.lambda = j.value("lambda", p.lambda);
  p.mu = j.value("mu", p.mu);
  p.vartheta = j.value("vartheta", p.vartheta);
  return p;
}

cf::SolverConfig solver_from_json(const json& j) {
  cf::SolverConfig cfg;
  cfg.t_end = j.value("t_end", cfg.t_end);
  cfg.dt_max = j.value("dt_max", cfg.dt_max);
  cfg.dt_min = j.value("dt_min", cfg.dt_min);
  cfg.dt_init = j.value("dt_init", cfg.dt_init);
  cfg.cfl = j.value("cfl", cfg.cfl);
  cfg.kappa_max = j.value("kappa_max", cfg.kappa_max);
  cfg.rho_min = j.value("rho_min", cfg.rho_min);
  cfg.snapshot_stride = j.value("snapshot_stride", cfg.snapshot_stride);
  cfg.resample_every = j.value("resample_every", cfg.resample_every);
  cfg.grow_every = j.value("grow_every", cfg.grow_every);
  cfg.grow_factor = j.value("grow_factor", cfg.grow_factor);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  return cfg;
}

struct Options {
  std::string config;
  std::string out = "run";
  std::uint64_t seed = 20240817ULL;
  int threads = 1;
};

int cmd_simulate(const Options& opt) {
  json config = load_config(opt.config);
  auto g = curve_from_config(config);
  auto params = flow_from_json(config.value("flow", json::object()));
  auto solver = solver_from_json(config.value("solver", json::object()));
  std::string name = config.value("name", std::string("simulate"));

  auto traj = cf::simulate(g, params, solver);
  auto dir = cf::io::write_run_directory(opt.out, name, traj);
  std::cout << "run " << name << ": " << cf::io::termination_name(traj.termination)
            << " at t=" << traj.t_final << " after " << traj.accepted_steps
            << " steps; output in " << dir.string() << "\n";
  return traj.termination == cf::Termination::StepFailure ? 3 : 0;
}

int cmd_energy(const Options& opt) {
  json config = load_config(opt.config);
  auto g = curve_from_config(config);
  auto f = cf::compute_fields(g);
  cf::Real sigma = config.value("sigma", cf::Real(1));
  cf::Real lambda = config.value("lambda", cf::Real(1));
  std::cout << cf::io::energy_report(g, f, sigma, lambda).dump(2) << "\n";
  return 0;
}

int cmd_classify(const Options& opt) {
  json config = load_config(opt.config);
  auto g = curve_from_config(config);
  auto f = cf::compute_fields(g);
  auto cls = cf::classify_limit(g, f);
  json out;
  out["verdict"] = cls.verdict == cf::LimitVerdict::Line ? "line"
                   : cls.verdict == cf::LimitVerdict::BorderlineElastica
                       ? "borderline_elastica"
                       : "unknown";
  out["bending"] = cls.bending;
  out["tangent_deviation"] = cls.tangent_dev;
  if (cls.verdict == cf::LimitVerdict::BorderlineElastica) {
    out["kappa_peak"] = cls.kappa_peak;
    out["s0"] = cls.s0;
    out["profile_residual"] = cls.profile_residual;
    out["omega"] = cls.omega;
  }
  if (g.dim == 2) {
    try {
      out["rotation_number"] = cf::rotation_number(g, f);
    } catch (const cf::InvalidInput&) {
      out["rotation_number"] = nullptr;  // ends not horizontal enough
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify_interp(const Options& opt) {
  json config = opt.config.empty() ? json::object() : load_config(opt.config);
  int trials = config.value("trials", 1000);
  int refine = config.value("refine", 0);
  if (trials < 1) throw cf::InvalidInput("verify-interp: trials must be positive");
  auto rows = cf::run_interp_batch(opt.seed, static_cast<std::size_t>(trials), refine);
  std::filesystem::create_directories(opt.out);
  cf::io::write_interp_csv(std::filesystem::path(opt.out) / "interp.csv", rows);
  auto summary = cf::io::interp_summary_json(rows);
  summary["seed"] = opt.seed;
  {
    std::ofstream s(std::filesystem::path(opt.out) / "interp_summary.json");
    s << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_scenarios_list() {
  for (const auto& def : cf::scenario_catalog())
    std::cout << def.name << "  -  " << def.summary << "\n";
  return 0;
}

int cmd_scenarios_run(const Options& opt, const std::string& name) {
  const auto& def = cf::find_scenario(name);
  auto result = cf::run_scenario(def);
  auto dir = cf::persist_scenario(result, opt.out);
  json out;
  out["name"] = name;
  out["termination"] = cf::io::termination_name(result.trajectory.termination);
  out["t_final"] = result.trajectory.t_final;
  out["verdict"] = result.verdict;
  out["run_dir"] = dir.string();
  std::cout << out.dump(2) << "\n";
  return result.trajectory.termination == cf::Termination::StepFailure ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curveflow: second- and fourth-order gradient flows of discrete curves"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config, "JSON configuration file");
  app.add_option("--out", opt.out, "output directory (default: run)");
  app.add_option("--seed", opt.seed, "random seed for randomized verification");
  app.add_option("--threads", opt.threads, "worker threads (reserved; the solver is serial)")
      ->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "evolve a curve and write a run directory");
  sim->fallthrough();
  auto* energy = app.add_subcommand("energy", "report the energies of a curve");
  energy->fallthrough();
  auto* verify = app.add_subcommand("verify-interp",
                                    "randomized checks of the interpolation inequalities");
  verify->fallthrough();
  auto* classify = app.add_subcommand("classify", "classify a curve as a limit shape");
  classify->fallthrough();
  auto* scen = app.add_subcommand("scenarios", "list or run the built-in scenarios");
  scen->fallthrough();
  scen->require_subcommand(1);
  auto* scen_list = scen->add_subcommand("list", "print the catalog");
  scen_list->fallthrough();
  std::string scenario_name;
  auto* scen_run = scen->add_subcommand("run", "run one scenario by name");
  scen_run->fallthrough();
  scen_run->add_option("name", scenario_name, "scenario name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(opt);
    if (energy->parsed()) return cmd_energy(opt);
    if (verify->parsed()) return cmd_verify_interp(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (scen->parsed()) {
      if (scen_list->parsed()) return cmd_scenarios_list();
      if (scen_run->parsed()) return cmd_scenarios_run(opt, scenario_name);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
