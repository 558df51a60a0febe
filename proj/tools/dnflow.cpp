#include "dnflow/config.hpp"
#include "dnflow/errors.hpp"
#include "dnflow/invariants.hpp"
#include "dnflow/oracle.hpp"
#include "dnflow/snapshot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace dnflow;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, config_error = 1, no_convergence = 2, invariant_violation = 3, io_error = 4 };

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Setup {
  RunConfig cfg;
  Domain domain;
  BoundaryRegime regime;
  EnergyParams params;
  SolverConfig solver;
  EnergyOperator op;

  explicit Setup(RunConfig c)
      : cfg(std::move(c)),
        domain(build_domain(cfg)),
        regime(build_regime(cfg)),
        params(build_params(cfg)),
        solver(build_solver(cfg)),
        op(domain, regime, cfg.p) {}
};

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

Field initial_datum(const Setup& s) {
  const auto& c = s.cfg;
  if (c.init_kind == "extremal") return minimize_rayleigh(s.op, s.params, s.solver, c.seed).extremal;
  if (c.init_kind == "random") return random_field(s.domain, c.seed);
  if (c.init_kind == "file") {
    auto snap = read_snapshot_file(c.init_path);
    if (snap.values.size() != s.domain.size())
      throw ShapeError("init file has " + std::to_string(snap.values.size()) + " values, domain has " +
                       std::to_string(s.domain.size()));
    return snap.values;
  }
  return Field::Ones(s.domain.size());
}

double resolve_tau(const Setup& s, const Field& g) {
  if (s.cfg.tau) return *s.cfg.tau;
  EvolveOptions boot;
  boot.dual = false;
  const LimitOptions defaults;
  const auto warm = evolve(s.op, g, defaults.bootstrap_tau, defaults.bootstrap_steps, s.params, s.solver, boot);
  const auto rate = lambda_decay_estimate(warm, warm.steps());
  if (!rate || !(*rate > 0.0)) throw DegenerateInput("cannot pick tau automatically: the initial datum decays to zero");
  return 1.0 / (2.0 * *rate);
}

int cmd_evolve(const Setup& s) {
  const Field g = initial_datum(s);
  const double tau = resolve_tau(s, g);
  const auto traj = evolve(s.op, g, tau, s.cfg.steps, s.params, s.solver);
  const auto dir = out_dir(s.cfg);
  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw IoError("cannot write " + (dir / "diagnostics.csv").string());
  write_diagnostics_csv(csv, traj.diagnostics);
  for (long k : s.cfg.snapshots) {
    if (k > traj.steps()) throw RangeError("snapshot step " + std::to_string(k) + " beyond the last step");
    const auto path = dir / ("snapshot_" + std::to_string(k) + ".txt");
    write_snapshot_file(path.string(), s.domain, s.regime, s.cfg.p, k, tau, traj.states[k]);
  }
  std::cout << "steps " << traj.steps() << " tau " << num(tau) << " csv " << (dir / "diagnostics.csv").string()
            << '\n';
  return ok;
}

LimitResult eigen_run(const Setup& s) {
  return run_to_limit(s.op, initial_datum(s), s.params, s.solver, build_limit_options(s.cfg));
}

int cmd_eigen(const Setup& s) {
  const auto lim = eigen_run(s);
  if (lim.degenerate) {
    std::cout << "degenerate limit: the flow reached the zero state after " << lim.steps << " steps\n";
    return ok;
  }
  std::cout << num(lim.lambda) << ' ' << num(lim.mu) << ' ' << num(lim.profile_gap) << '\n';
  const auto dir = out_dir(s.cfg);
  write_snapshot_file((dir / "profile.txt").string(), s.domain, s.regime, s.cfg.p, lim.steps, lim.tau, lim.profile);
  if (!lim.converged) {
    std::cerr << "decay rate did not settle within " << lim.steps << " steps\n";
    return no_convergence;
  }
  return ok;
}

int cmd_oracle(const Setup& s) {
  const auto eig = minimize_rayleigh(s.op, s.params, s.solver, s.cfg.seed);
  std::cout << eigen_summary(eig) << '\n';
  const auto dir = out_dir(s.cfg);
  write_snapshot_file((dir / "extremal.txt").string(), s.domain, s.regime, s.cfg.p, 0, 0.0, eig.extremal);
  return ok;
}

int cmd_verify(const Setup& s) {
  const auto eig = minimize_rayleigh(s.op, s.params, s.solver, s.cfg.seed);
  SuiteOptions opts;
  opts.steps = s.cfg.verify_steps;
  opts.samples = s.cfg.verify_samples;
  opts.seed = s.cfg.seed;
  const auto results = run_invariant_suite(s.op, s.params, s.solver, eig, opts);
  bool all = true;
  std::printf("%-30s %-6s %12s %12s  %s\n", "invariant", "result", "worst", "limit", "detail");
  for (const auto& r : results) {
    all = all && r.passed;
    std::printf("%-30s %-6s %12.4g %12.4g  %s\n", r.name.c_str(), r.passed ? "pass" : "FAIL", r.worst, r.limit,
                r.detail.c_str());
  }
  return all ? ok : invariant_violation;
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ParseError(0, "--values", "empty value in list");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw ParseError(0, "--values", "no values given");
  return out;
}

int cmd_sweep(const RunConfig& base, const std::string& param, const std::string& values_text, unsigned jobs) {
  if (param.empty()) throw ParseError(0, "--param", "sweep needs --param");
  const auto values = split_values(values_text);
  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    RunConfig c = base;
    set_config_value(c, param, v);
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<std::string> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::string row = param + ',' + values[i] + ',';
      try {
        const Setup s(configs[i]);
        const auto lim = eigen_run(s);
        const char* status = lim.degenerate ? "degenerate" : lim.converged ? "ok" : "not_converged";
        row += num(lim.lambda) + ',' + num(lim.mu) + ',' + num(lim.profile_gap) + ',' + std::to_string(lim.steps) +
               ',' + num(lim.tau) + ',' + status;
      } catch (const NonConvergence&) {
        row += "nan,nan,nan,0,nan,solver_failure";
      } catch (const Error& e) {
        row += "nan,nan,nan,0,nan,error";
      }
      rows[i] = std::move(row);
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const auto dir = out_dir(base);
  const auto path = dir / "sweep.csv";
  std::ofstream csv(path);
  if (!csv) throw IoError("cannot write " + path.string());
  csv << "param,value,lambda,mu,profile_gap,steps,tau,status\n";
  for (const auto& r : rows) csv << r << '\n';
  std::cout << "sweep " << rows.size() << " runs, csv " << path.string() << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly nonlinear flow solver: large-time limits and optimal Poincare constants"};
  app.require_subcommand(1);
  std::string config_path, out, param, values;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (key = value lines)")->required();
    sub->add_option("--out", out, "output directory (overrides out.dir)");
  };
  auto* evolve_cmd = app.add_subcommand("evolve", "run the implicit scheme and write diagnostics");
  auto* eigen_cmd = app.add_subcommand("eigen", "flow to the stopping rule and print lambda mu profile_gap");
  auto* oracle_cmd = app.add_subcommand("oracle", "minimize the Rayleigh quotient directly");
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite for the configured regime");
  auto* sweep_cmd = app.add_subcommand("sweep", "run eigen for several values of one key");
  for (auto* sub : {evolve_cmd, eigen_cmd, oracle_cmd, verify_cmd, sweep_cmd}) add_common(sub);
  sweep_cmd->add_option("--param", param, "config key to vary")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    RunConfig cfg = parse_config_file(config_path);
    if (!out.empty()) cfg.out_dir = out;
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, param, values, jobs);
    const Setup setup(cfg);
    if (evolve_cmd->parsed()) return cmd_evolve(setup);
    if (eigen_cmd->parsed()) return cmd_eigen(setup);
    if (oracle_cmd->parsed()) return cmd_oracle(setup);
    return cmd_verify(setup);
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return no_convergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return io_error;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  }
}
