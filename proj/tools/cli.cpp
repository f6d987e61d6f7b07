#include "cli.hpp"

#include "mkv/csv.hpp"
#include "mkv/errors.hpp"
#include "mkv/kernels.hpp"
#include "mkv/scenarios.hpp"
#include "mkv/solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace mkv::cli {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string scenario = "lq";
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<int> ensemble_size;
  std::optional<std::string> backend;
  std::optional<double> inflation;
  std::optional<double> eps_dm;
  std::optional<std::string> eps_forward;
  std::optional<std::string> eps_reverse;
  std::optional<int> record_every;
  std::optional<std::size_t> paths;
  std::optional<double> rho;
  bool zero_control = false;
  std::optional<std::string> control;
  std::string stepping = "implicit";
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

// "E" or "E0:K:E1" (E0 for the first K steps, then E1).
NoiseSchedule parse_schedule(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 1) return NoiseSchedule::constant(std::stod(parts[0]));
    if (parts.size() == 3) {
      const long k = std::stol(parts[1]);
      if (k < 0) throw std::invalid_argument("negative step count");
      return {std::stod(parts[0]), static_cast<std::size_t>(k), std::stod(parts[2])};
    }
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("noise schedule '" + s + "' is not of the form E or E0:K:E1");
}

std::string format_schedule(const NoiseSchedule& s) {
  if (s.initial_steps == 0 || s.initial == s.after) return num(s.after);
  return num(s.initial) + ":" + std::to_string(s.initial_steps) + ":" + num(s.after);
}

SolverConfig resolve(const RunConfig& rc, const Scenario& sc) {
  SolverConfig cfg = sc.defaults;
  if (rc.seed) cfg.seed = *rc.seed;
  if (rc.dt) cfg.dt = *rc.dt;
  if (rc.ensemble_size) cfg.ensemble_size = *rc.ensemble_size;
  if (rc.backend) cfg.backend = *rc.backend == "dmap" ? Backend::dmap_enkf : Backend::enkf;
  if (rc.inflation) cfg.inflation = *rc.inflation;
  if (rc.eps_dm) cfg.eps_dm = *rc.eps_dm;
  if (rc.eps_forward) cfg.eps_forward = parse_schedule(*rc.eps_forward);
  if (rc.eps_reverse) cfg.eps_reverse = parse_schedule(*rc.eps_reverse);
  if (rc.record_every) cfg.record_every = *rc.record_every;
  return cfg;
}

void write_manifest(const RunConfig& rc, const SolverConfig& cfg, const std::string& command) {
  std::ostringstream m;
  m << "# mkv " << command << " run; rerun with: mkv --config <this file> " << command << "\n";
  m << "scenario=" << rc.scenario << "\n";
  m << "seed=" << cfg.seed << "\n";
  m << "dt=" << num(cfg.dt) << "\n";
  m << "ensemble_size=" << cfg.ensemble_size << "\n";
  m << "backend=" << (cfg.backend == Backend::dmap_enkf ? "dmap" : "enkf") << "\n";
  m << "inflation=" << num(cfg.inflation) << "\n";
  if (cfg.eps_dm) m << "eps_dm=" << num(*cfg.eps_dm) << "\n";
  m << "eps_forward=" << format_schedule(cfg.eps_forward) << "\n";
  m << "eps_reverse=" << format_schedule(cfg.eps_reverse) << "\n";
  m << "record_every=" << cfg.record_every << "\n";
  if (rc.paths) m << "paths=" << *rc.paths << "\n";
  if (rc.rho) m << "rho=" << num(*rc.rho) << "\n";
  m << "zero_control=" << (rc.zero_control ? "true" : "false") << "\n";
  if (rc.control) m << "control=" << *rc.control << "\n";
  m << "stepping=" << rc.stepping << "\n";
  csv::write_file((fs::path(rc.out) / "manifest.ini").string(), m.str());
}

std::string path_in(const RunConfig& rc, const char* name) { return (fs::path(rc.out) / name).string(); }

AffineControlSchedule do_solve(const RunConfig& rc, const ControlProblem& p, const SolverConfig& cfg) {
  const Solution s = solve(p, cfg);
  const SweepRecord& r = s.record;
  std::ostringstream fwd, rev, ctl;
  csv::write_moments(fwd, r.times, r.bar_mean, r.bar_cov, cfg.record_every);
  csv::write_moments(rev, r.times, r.tilde_mean, r.tilde_cov, cfg.record_every);
  csv::write_control(ctl, s.schedule);
  csv::write_file(path_in(rc, "forward.csv"), fwd.str());
  csv::write_file(path_in(rc, "reverse.csv"), rev.str());
  csv::write_file(path_in(rc, "control.csv"), ctl.str());
  std::cout << "solve: " << r.times.size() - 1 << " steps, wrote forward.csv, reverse.csv, control.csv to " << rc.out
            << "\n";
  if (cfg.backend == Backend::dmap_enkf) {
    std::cout << "dmap: kernels=" << r.dmap.kernels_built << " max_row_err=" << r.dmap.max_row_error
              << " max_col_err=" << r.dmap.max_col_error << " hull_violations=" << r.dmap.hull_violations << "\n";
  }
  return s.schedule;
}

AffineControlSchedule load_or_solve(const RunConfig& rc, const ControlProblem& p, const SolverConfig& cfg) {
  const std::string file = rc.control ? *rc.control : path_in(rc, "control.csv");
  if (rc.control || fs::exists(file)) {
    std::istringstream is(csv::read_file(file));
    return csv::read_control(is);
  }
  return do_solve(rc, p, cfg);
}

SimulationOptions sim_options(const RunConfig& rc, const SolverConfig& cfg, std::size_t default_paths) {
  SimulationOptions o;
  o.n_paths = rc.paths.value_or(default_paths);
  o.seed = cfg.seed;
  o.noise_scale = rc.rho;
  o.stepping = rc.stepping == "explicit" ? ControlStepping::explicit_euler : ControlStepping::linearly_implicit;
  return o;
}

int run_command(const std::string& command, const RunConfig& rc) {
  if (command == "scenarios") {
    for (const auto& s : scenario_registry()) std::cout << s.name << "\t" << s.description << "\n";
    return ok;
  }
  const Scenario& sc = find_scenario(rc.scenario);
  const ControlProblem p(sc.spec());
  const SolverConfig cfg = resolve(rc, sc);
  const TimeGrid grid = validate(p, cfg);
  fs::create_directories(rc.out);
  write_manifest(rc, cfg, command);

  if (command == "solve") {
    do_solve(rc, p, cfg);
  } else if (command == "simulate") {
    const AffineControlSchedule sched =
        rc.zero_control ? AffineControlSchedule::zero(p.horizon(), grid.steps, p.dim_x()) : load_or_solve(rc, p, cfg);
    const Trajectories tr = simulate_controlled(p, sched, sim_options(rc, cfg, 1));
    std::ostringstream os;
    csv::write_trajectory(os, tr.times, tr.states.front(), tr.controls.front());
    csv::write_file(path_in(rc, "trajectory.csv"), os.str());
    const Vec xt = tr.states.front().col(tr.states.front().cols() - 1);
    std::cout << "simulate: final state";
    for (Eigen::Index i = 0; i < xt.size(); ++i) std::cout << " " << xt[i];
    std::cout << ", cost " << tr.costs.front() << "\n";
  } else if (command == "cost") {
    const AffineControlSchedule sched =
        rc.zero_control ? AffineControlSchedule::zero(p.horizon(), grid.steps, p.dim_x()) : load_or_solve(rc, p, cfg);
    const CostEstimate est = estimate_cost(p, sched, sim_options(rc, cfg, 200));
    std::ostringstream os;
    os << "J = " << num(est.mean) << " +/- " << num(est.std_error) << "\n";
    os << "paths = " << est.n_paths << "\n";
    csv::write_file(path_in(rc, "cost.txt"), os.str());
    std::cout << os.str();
  }
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  configure_threads_from_env();
  RunConfig rc;
  CLI::App app{"Particle solver for stochastic optimal control with forward and reverse McKean-Vlasov dynamics",
               "mkv"};
  app.set_config("--config", "", "INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  app.add_option("--scenario", rc.scenario, "Registered scenario (see `mkv scenarios`)")->capture_default_str();
  app.add_option("--out", rc.out, "Output directory")->capture_default_str();
  app.add_option("--seed", rc.seed, "64-bit RNG seed");
  app.add_option("--dt", rc.dt, "Time step");
  app.add_option("--ensemble-size,--ensemble_size", rc.ensemble_size, "Number of particles M");
  app.add_option("--backend", rc.backend, "Reverse-sweep backend")->check(CLI::IsMember({"enkf", "dmap"}));
  app.add_option("--inflation", rc.inflation, "Additive covariance inflation delta");
  app.add_option("--eps-dm,--eps_dm", rc.eps_dm, "Diffusion-map bandwidth (defaults to dt)");
  app.add_option("--eps-forward,--eps_forward", rc.eps_forward, "Forward noise level: E or E0:K:E1");
  app.add_option("--eps-reverse,--eps_reverse", rc.eps_reverse, "Reverse noise level: E or E0:K:E1");
  app.add_option("--record-every,--record_every", rc.record_every, "Row stride of forward.csv and reverse.csv");
  app.add_option("--paths", rc.paths, "Number of simulated paths");
  app.add_option("--rho", rc.rho, "Noise scale for simulate/cost (0 = deterministic)");
  app.add_flag("--zero-control,--zero_control", rc.zero_control, "Use the zero feedback instead of a solved one");
  app.add_option("--control", rc.control, "control.csv to simulate with instead of <out>/control.csv");
  app.add_option("--stepping", rc.stepping, "Controlled-simulation integrator")
      ->check(CLI::IsMember({"implicit", "explicit"}))
      ->capture_default_str();

  std::string command;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"solve", "Forward sweep, terminal update and reverse sweep; writes forward/reverse/control CSVs"},
           {"simulate", "Simulate the controlled SDE; writes trajectory.csv (solves first without control.csv)"},
           {"cost", "Monte-Carlo estimate of the achieved cost; writes cost.txt"},
           {"scenarios", "List registered scenarios"}}) {
    app.add_subcommand(name, help)->fallthrough()->callback([&command, n = name] { command = n; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    return run_command(command, rc);
  } catch (const NumericalBlowup& e) {
    std::cerr << "mkv: numerical failure: " << e.what() << "\n";
    return numerical_error;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "mkv: numerical failure: " << e.what() << "\n";
    return numerical_error;
  } catch (const FullRankViolation& e) {
    std::cerr << "mkv: numerical failure: " << e.what() << "\n";
    return numerical_error;
  } catch (const std::domain_error& e) {
    std::cerr << "mkv: numerical failure: " << e.what() << "\n";
    return numerical_error;
  } catch (const std::exception& e) {
    std::cerr << "mkv: error: " << e.what() << "\n";
    return config_error;
  }
}

}  // namespace mkv::cli
