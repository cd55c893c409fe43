#include "rdlab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "rdlab/classify.hpp"
#include "rdlab/evolve.hpp"
#include "rdlab/numerics.hpp"
#include "rdlab/stationary.hpp"
#include "rdlab/svg.hpp"
#include "rdlab/threshold.hpp"

namespace rdlab::cli {

namespace {

namespace fs = std::filesystem;

Nonlinearity nonlin_from_config(const Config& cfg) {
  const std::string family = cfg.require<std::string>("nonlin.family");
  if (family == "cubic_bistable") {
    return make_cubic_bistable(cfg.get<double>("nonlin.theta0", 0.25));
  }
  if (family == "degenerate_bistable") {
    return make_degenerate_bistable(cfg.get<double>("nonlin.theta0", 0.25),
                                    cfg.require<double>("nonlin.p"));
  }
  if (family == "ignition") {
    return make_ignition(cfg.get<double>("nonlin.theta0", 0.25),
                         cfg.get<double>("nonlin.amp", 2.0));
  }
  if (family == "fisher") return make_fisher(cfg.require<double>("nonlin.p"));
  if (family == "arrhenius") return make_arrhenius(cfg.require<double>("nonlin.a"));
  throw ConfigError("config key 'nonlin.family': unknown family '" + family + "'");
}

Grid grid_from_config(const Config& cfg) {
  return Grid::from_length(cfg.get<double>("grid.dx", 0.05), cfg.get<double>("grid.L", 40.0));
}

SolverConfig solver_from_config(const Config& cfg) {
  SolverConfig sc;
  sc.dt = cfg.get<double>("solver.dt", 1e-3);
  sc.scheme = scheme_from_string(cfg.get<std::string>("solver.scheme", "cn"));
  sc.t_max = cfg.get<double>("solver.t_max", 100.0);
  sc.record_every = cfg.get<int>("solver.record_every", 50);
  sc.expand_trigger = cfg.get<double>("solver.expand_trigger", 0.8);
  sc.expand_factor = cfg.get<double>("solver.expand_factor", 2.0);
  sc.edge_delta = cfg.get<double>("solver.edge_delta", 0.05);
  sc.far_tol = cfg.get<double>("solver.far_tol", 1e-5);
  return sc;
}

EnergyProbe probe_from_config(const Config& cfg) {
  EnergyProbe probe;
  probe.wants_E = cfg.get<bool>("probes.E", true);
  probe.c_list = cfg.get<std::vector<double>>("probes.c_list", {});
  return probe;
}

ClassifyOptions classify_from_config(const Config& cfg) {
  ClassifyOptions opts;
  opts.eps_u = cfg.get<double>("classify.eps_u", opts.eps_u);
  opts.eps_ext = cfg.get<double>("classify.eps_ext", opts.eps_ext);
  opts.tol_bump = cfg.get<double>("classify.tol_bump", opts.tol_bump);
  opts.tol_E = cfg.get<double>("classify.tol_E", opts.tol_E);
  opts.tol_theta = cfg.get<double>("classify.tol_theta", opts.tol_theta);
  opts.dwell = cfg.get<int>("classify.dwell", opts.dwell);
  opts.polish_energy = cfg.get<bool>("classify.polish_energy", opts.polish_energy);
  return opts;
}

std::shared_ptr<const BumpProfile> maybe_bump_ref(const Config& cfg, const Nonlinearity& n,
                                                  const Grid& grid) {
  if (n.kind != NonlinKind::Bistable) return nullptr;
  if (!cfg.get<bool>("classify.use_bump", true)) return nullptr;
  const Grid bump_grid = Grid::from_length(grid.dx, std::min(grid.length(), 40.0));
  return std::make_shared<BumpProfile>(bump(n, bump_grid));
}

Family family_from_config(const Config& cfg, const Nonlinearity& n,
                          std::shared_ptr<const BumpProfile> bump_ref) {
  const FamilyKind kind = family_kind_from_string(cfg.require<std::string>("family.kind"));
  const double param = cfg.get<double>("family.param", 1.0);
  const double lambda_max = cfg.get<double>("family.lambda_max", 100.0);
  return make_family(kind, param, lambda_max, n, std::move(bump_ref));
}

Field initial_data(const Config& cfg, const Nonlinearity& n, const Grid& grid,
                   std::shared_ptr<const BumpProfile> bump_ref) {
  const std::string kind = cfg.get<std::string>("init.kind", "family");
  if (kind == "zero") return Field(grid, Eigen::ArrayXd::Zero(grid.n));
  if (kind == "csv") return read_field_csv(cfg.require<std::string>("init.csv"));
  if (kind == "family") {
    Family family = family_from_config(cfg, n, std::move(bump_ref));
    return family.materialize(cfg.require<double>("init.lambda"), grid);
  }
  throw ConfigError("config key 'init.kind': unknown kind '" + kind + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void emit_trajectory_plots(const Trajectory& traj, const std::string& out_dir,
                           Manifest& manifest) {
  if (!traj.energy_series.empty()) {
    PlotSpec spec;
    spec.title = "Energy along the run";
    spec.xlabel = "t";
    spec.ylabel = "E";
    spec.series.push_back({"E", traj.times, traj.energy_series, false});
    const std::string path = join(out_dir, "energy.svg");
    write_svg_plot(path, spec);
    manifest.artifacts.push_back("energy.svg");
  }
  {
    PlotSpec spec;
    spec.title = "Leading edge";
    spec.xlabel = "t";
    spec.ylabel = "R_delta";
    spec.series.push_back({"R_delta", traj.times, traj.r_delta_series, false});
    const std::string path = join(out_dir, "edge.svg");
    write_svg_plot(path, spec);
    manifest.artifacts.push_back("edge.svg");
  }
}

int run_and_emit(const Config& cfg, const GlobalArgs& args, bool full_artifacts) {
  ensure_directory(args.out_dir);
  const Nonlinearity n = nonlin_from_config(cfg);
  const Grid grid = grid_from_config(cfg);
  const SolverConfig sc = solver_from_config(cfg);
  const EnergyProbe probe = probe_from_config(cfg);
  const ClassifyOptions copts = classify_from_config(cfg);
  auto bump_ref = maybe_bump_ref(cfg, n, grid);
  const Field phi = initial_data(cfg, n, grid, bump_ref);

  ClassifierRefs refs;
  if (bump_ref) refs.bump = bump_ref.get();
  ClassifiedRun run = run_classified(phi, n, sc, probe, copts, refs);

  Manifest manifest;
  manifest.command = full_artifacts ? "simulate" : "classify";
  manifest.config_hash = cfg.hash();

  write_text_file(join(args.out_dir, "verdict.json"), run.verdict.to_json().dump(2) + "\n");
  manifest.artifacts.push_back("verdict.json");

  if (full_artifacts) {
    write_trajectory_csv(join(args.out_dir, "trajectory.csv"), run.traj);
    manifest.artifacts.push_back("trajectory.csv");
    const EnergyReport report = make_energy_report(run.traj, n);
    write_energy_csv(join(args.out_dir, "energy.csv"), report);
    manifest.artifacts.push_back("energy.csv");

    const int snap_every = cfg.get<int>("snapshots.every", 0);
    if (snap_every > 0) {
      for (std::size_t i = 0; i < run.traj.snapshots.size(); i += std::size_t(snap_every)) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%05zu.csv", i);
        write_field_csv(join(args.out_dir, name), run.traj.snapshots[i]);
        manifest.artifacts.push_back(name);
      }
    }
    if (cfg.get<bool>("plots.emit", false)) emit_trajectory_plots(run.traj, args.out_dir, manifest);
  }

  manifest.extra = {{"verdict", to_string(run.verdict.label)},
                    {"stop_time", run.verdict.time},
                    {"energy_at_stop", run.verdict.energy_at_stop}};
  manifest.write(join(args.out_dir, "manifest.json"));
  std::cout << "verdict: " << to_string(run.verdict.label) << " (trigger " << run.verdict.trigger
            << " at t=" << run.verdict.time << ")\n";
  return 0;
}

} // namespace

int cmd_simulate(const Config& cfg, const GlobalArgs& args) {
  return run_and_emit(cfg, args, true);
}

int cmd_classify(const Config& cfg, const GlobalArgs& args) {
  return run_and_emit(cfg, args, false);
}

int cmd_bump(const Config& cfg, const GlobalArgs& args) {
  ensure_directory(args.out_dir);
  const Nonlinearity n = nonlin_from_config(cfg);
  const Grid grid = Grid::from_length(cfg.get<double>("bump.dx", 1e-3),
                                      cfg.get<double>("bump.L", 30.0));
  const BumpProfile profile = bump(n, grid);
  write_bump_csv(join(args.out_dir, "bump.csv"), profile);
  Manifest manifest;
  manifest.command = "bump";
  manifest.config_hash = cfg.hash();
  manifest.artifacts = {"bump.csv"};
  manifest.extra = {{"theta_star", profile.theta_star},
                    {"E0", profile.E0},
                    {"decay", profile.decay.exponential ? "exponential" : "algebraic"},
                    {"decay_rate",
                     profile.decay.exponential ? profile.decay.rate : profile.decay.exponent}};
  manifest.write(join(args.out_dir, "manifest.json"));
  std::cout << "bump: theta_star=" << numerics::fmt_g17(profile.theta_star)
            << " E0=" << numerics::fmt_g17(profile.E0) << "\n";
  return 0;
}

int cmd_front(const Config& cfg, const GlobalArgs& args) {
  ensure_directory(args.out_dir);
  const Nonlinearity n = nonlin_from_config(cfg);
  const double c_lo = cfg.get<double>("front.c_lo", 1e-3);
  const double c_hi = cfg.get<double>("front.c_hi", 3.0);
  const FrontProfile profile = front(n, {c_lo, c_hi});
  write_front_csv(join(args.out_dir, "front.csv"), profile);
  Manifest manifest;
  manifest.command = "front";
  manifest.config_hash = cfg.hash();
  manifest.artifacts = {"front.csv"};
  manifest.extra = {{"c_dagger", profile.c_dagger}};
  manifest.write(join(args.out_dir, "manifest.json"));
  std::cout << "front: c_dagger=" << numerics::fmt_g17(profile.c_dagger) << "\n";
  return 0;
}

int cmd_spectral(const Config& cfg, const GlobalArgs& args) {
  ensure_directory(args.out_dir);
  const Nonlinearity n = nonlin_from_config(cfg);
  const double L = cfg.get<double>("spectral.L", 20.0);
  const Grid grid = Grid::from_length(cfg.get<double>("spectral.dx", 0.01),
                                      cfg.get<double>("spectral.profile_L", std::max(30.0, L)));
  const BumpProfile profile = bump(n, grid);
  const SpectralReport report = spectral_check(profile, n, L);

  CsvWriter csv(join(args.out_dir, "eigenfunction.csv"), {"x", "phi"});
  for (Eigen::Index i = 0; i < report.eigenfunction.n(); ++i) {
    csv.row({report.eigenfunction.x(i), report.eigenfunction.values[i]});
  }
  csv.close();

  Manifest manifest;
  manifest.command = "spectral";
  manifest.config_hash = cfg.hash();
  manifest.artifacts = {"eigenfunction.csv"};
  manifest.extra = {{"nu0_L", report.nu0_L},
                    {"rayleigh_at_vprime", report.rayleigh_at_vprime},
                    {"L", L}};
  manifest.write(join(args.out_dir, "manifest.json"));
  std::cout << "spectral: nu0_L=" << numerics::fmt_g17(report.nu0_L)
            << " rayleigh(v')=" << numerics::fmt_g17(report.rayleigh_at_vprime) << "\n";
  return 0;
}

int cmd_threshold(const Config& cfg, const GlobalArgs& args) {
  ensure_directory(args.out_dir);
  const Nonlinearity n = nonlin_from_config(cfg);
  const Grid grid = grid_from_config(cfg);
  const SolverConfig sc = solver_from_config(cfg);
  const ClassifyOptions copts = classify_from_config(cfg);
  auto bump_ref = maybe_bump_ref(cfg, n, grid);
  const Family family = family_from_config(cfg, n, bump_ref);

  ThresholdConfig tcfg;
  tcfg.tol_lambda = cfg.get<double>("threshold.tol_lambda", 1e-3);
  tcfg.lambda_max = cfg.get<double>("threshold.lambda_max", family.lambda_max);
  tcfg.lambda_init = cfg.get<double>("threshold.lambda_init", 1.0);
  tcfg.t_cap_factor = cfg.get<double>("threshold.t_cap_factor", 16.0);
  tcfg.lambda_small_cap = cfg.get<double>("threshold.lambda_small_cap", 1e-4);
  tcfg.workers = args.workers;

  ThresholdResult result = find_threshold(family, n, grid, sc, copts, tcfg);

  Manifest manifest;
  manifest.command = "threshold";
  manifest.config_hash = cfg.hash();
  manifest.extra = result.to_json();

  if (result.trichotomy == TrichotomyLabel::SharpThreshold &&
      cfg.get<bool>("threshold.behavior", true)) {
    const ThresholdEvidence evidence = threshold_behavior(
        result, family, n, grid, sc, copts, bump_ref ? bump_ref.get() : nullptr,
        cfg.get<double>("threshold.horizon_factor", 8.0));
    manifest.extra["behavior"] = evidence.to_json();
  }

  write_sweep_csv(join(args.out_dir, "sweep.csv"), result.runs);
  manifest.artifacts.push_back("sweep.csv");

  {
    PlotSpec spec;
    spec.title = "Bisection trace";
    spec.xlabel = "lambda";
    spec.ylabel = "verdict (0=extinct, 1=propagate)";
    PlotSeries pts;
    pts.label = "runs";
    pts.markers_only = true;
    for (const auto& rec : result.runs) {
      pts.x.push_back(rec.lambda);
      double code = 0.5;
      if (rec.label == BehaviorLabel::Extinction) code = 0.0;
      if (rec.label == BehaviorLabel::Propagation) code = 1.0;
      pts.y.push_back(code);
    }
    spec.series.push_back(pts);
    write_svg_plot(join(args.out_dir, "sweep.svg"), spec);
    manifest.artifacts.push_back("sweep.svg");
  }

  manifest.write(join(args.out_dir, "result.json"));
  std::cout << "threshold: " << to_string(result.trichotomy) << " bracket=["
            << numerics::fmt_g17(result.lambda_lo) << ", "
            << numerics::fmt_g17(result.lambda_hi) << "]"
            << (result.undecided_flag ? " (flagged)" : "") << "\n";
  return 0;
}

namespace {

// sweep.csv carries a string verdict column; map it back to codes.
bool plot_sweep_csv(const std::string& input, const std::string& out_path) {
  std::ifstream in(input);
  std::string line;
  if (!std::getline(in, line) || line.rfind("lambda,verdict", 0) != 0) return false;
  PlotSeries pts;
  pts.label = "runs";
  pts.markers_only = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string lambda, verdict;
    std::getline(row, lambda, ',');
    std::getline(row, verdict, ',');
    pts.x.push_back(std::stod(lambda));
    double code = 0.5;
    if (verdict == "extinction") code = 0.0;
    if (verdict == "propagation") code = 1.0;
    pts.y.push_back(code);
  }
  if (pts.x.empty()) throw ConfigError("plot: sweep CSV '" + input + "' has no rows");
  PlotSpec spec;
  spec.title = "Bisection trace";
  spec.xlabel = "lambda";
  spec.ylabel = "verdict (0=extinct, 1=propagate)";
  spec.series.push_back(pts);
  write_svg_plot(out_path, spec);
  return true;
}

} // namespace

int cmd_plot(const std::vector<std::string>& inputs, const GlobalArgs& args) {
  if (inputs.empty()) throw ConfigError("plot: no input CSVs given");
  ensure_directory(args.out_dir);
  for (const auto& input : inputs) {
    const std::string stem = fs::path(input).stem().string();
    const std::string out_base = join(args.out_dir, stem);
    if (plot_sweep_csv(input, out_base + ".svg")) continue;

    const CsvTable table = read_csv(input);
    if (table.rows.empty()) throw ConfigError("plot: CSV '" + input + "' has no data rows");

    if (table.column_index("x") >= 0 &&
        (table.column_index("u") >= 0 || table.column_index("v") >= 0 ||
         table.column_index("phi") >= 0)) {
      const std::string ycol = table.column_index("u") >= 0
                                   ? "u"
                                   : (table.column_index("v") >= 0 ? "v" : "phi");
      PlotSpec spec;
      spec.title = stem;
      spec.xlabel = "x";
      spec.ylabel = ycol;
      spec.series.push_back({ycol, table.column("x"), table.column(ycol), false});
      write_svg_plot(out_base + ".svg", spec);
      continue;
    }
    if (table.column_index("t") >= 0) {
      bool plotted = false;
      if (table.column_index("E") >= 0) {
        PlotSpec spec;
        spec.title = stem + ": energy";
        spec.xlabel = "t";
        spec.ylabel = "E";
        spec.series.push_back({"E", table.column("t"), table.column("E"), false});
        write_svg_plot(out_base + "_energy.svg", spec);
        plotted = true;
      }
      if (table.column_index("R_delta") >= 0) {
        PlotSpec spec;
        spec.title = stem + ": leading edge";
        spec.xlabel = "t";
        spec.ylabel = "R_delta";
        spec.series.push_back({"R_delta", table.column("t"), table.column("R_delta"), false});
        write_svg_plot(out_base + "_edge.svg", spec);
        plotted = true;
      }
      if (table.column_index("u0") >= 0) {
        PlotSpec spec;
        spec.title = stem + ": origin value";
        spec.xlabel = "t";
        spec.ylabel = "u(0,t)";
        spec.series.push_back({"u0", table.column("t"), table.column("u0"), false});
        write_svg_plot(out_base + "_u0.svg", spec);
        plotted = true;
      }
      if (plotted) continue;
    }
    throw ConfigError("plot: unrecognized CSV schema in '" + input + "'");
  }
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"reaction-diffusion threshold laboratory"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "configuration file (dotted keys)");
  app.add_option("--out", args.out_dir, "output directory");
  app.add_option("--workers", args.workers, "parallel workers for sweeps");
  app.add_option("--seed", args.seed, "reserved");

  auto* simulate = app.add_subcommand("simulate", "integrate and classify a run");
  auto* classify = app.add_subcommand("classify", "classify a run (verdict only)");
  auto* bump_cmd = app.add_subcommand("bump", "stationary bump profile");
  auto* front_cmd = app.add_subcommand("front", "traveling front by shooting");
  auto* spectral = app.add_subcommand("spectral", "Schrodinger check around the bump");
  auto* threshold_cmd = app.add_subcommand("threshold", "sharp-threshold bisection");
  auto* plot = app.add_subcommand("plot", "render CSV artifacts as SVG");
  std::vector<std::string> plot_inputs;
  plot->add_option("inputs", plot_inputs, "CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2; // usage errors map to exit 2
  }

  try {
    if (plot->parsed()) return cmd_plot(plot_inputs, args);
    if (args.config_path.empty()) throw ConfigError("--config is required for this command");
    const Config cfg = Config::load(args.config_path);
    if (simulate->parsed()) return cmd_simulate(cfg, args);
    if (classify->parsed()) return cmd_classify(cfg, args);
    if (bump_cmd->parsed()) return cmd_bump(cfg, args);
    if (front_cmd->parsed()) return cmd_front(cfg, args);
    if (spectral->parsed()) return cmd_spectral(cfg, args);
    if (threshold_cmd->parsed()) return cmd_threshold(cfg, args);
    throw ConfigError("no command given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace rdlab::cli
