// Command-line front end: solve the safety value table, run experiments,
// verify the coverage certificates on recorded traces, and export plot data.
//
// Exit codes: 0 success, 2 config error, 3 nonconvergence,
//             4 theorem-check failure, 5 IO error.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "acofi/config.hpp"
#include "acofi/errors.hpp"
#include "acofi/trace_io.hpp"

namespace fs = std::filesystem;
using namespace acofi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitTheorem = 4;
constexpr int kExitIo = 5;

void check_header(const QTable& qtable, const ExperimentConfig& cfg) {
  auto mismatch = [](const std::string& what) {
    throw HeaderMismatch("qtable header does not match config: " + what);
  };
  if (qtable.grid.nx != cfg.grid.nx || qtable.grid.ny != cfg.grid.ny ||
      qtable.grid.ntheta != cfg.grid.ntheta)
    mismatch("grid dimensions");
  if (qtable.grid.bounds.min_x != cfg.grid.bounds.min_x ||
      qtable.grid.bounds.min_y != cfg.grid.bounds.min_y ||
      qtable.grid.bounds.max_x != cfg.grid.bounds.max_x ||
      qtable.grid.bounds.max_y != cfg.grid.bounds.max_y)
    mismatch("grid bounds");
  if (qtable.gamma != cfg.gamma) mismatch("gamma");
  if (qtable.dyn.v != cfg.dyn.v || qtable.dyn.omega != cfg.dyn.omega)
    mismatch("dynamics constants");
}

std::string trace_filename(PolicyKind p, ScenarioKind s, std::uint64_t seed) {
  return "trace_" + policy_name(p) + "_" + scenario_name(s) + "_seed" +
         std::to_string(seed) + ".csv";
}

int cmd_solve(const std::string& config_path, const std::string& out_path) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  int iters = 0;
  double residual = 0.0;
  QTable qt = solve_safety_bellman(cfg.world, cfg.grid, cfg.dyn, cfg.gamma,
                                   cfg.solver_tol, cfg.solver_max_iters,
                                   &iters, &residual);
  save_qtable(qt, out_path);
  std::cout << "residual = " << format_double(residual)
            << "\niterations = " << iters << "\nqtable = " << out_path
            << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& qtable_path,
                 const std::string& policy_str, const std::string& scenario_str,
                 std::uint64_t seed, const std::string& out_dir,
                 bool reset_aci) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (reset_aci) cfg.reset_aci_on_respawn = true;
  PolicyKind policy;
  if (!parse_policy(policy_str, &policy))
    throw ConfigError("unknown policy '" + policy_str + "'");
  ScenarioKind scenario;
  if (!parse_scenario(scenario_str, &scenario))
    throw ConfigError("unknown scenario '" + scenario_str + "'");
  QTable qt = load_qtable(qtable_path);
  check_header(qt, cfg);

  fs::create_directories(out_dir);
  EpisodeResult res = run_episode(policy, scenario, cfg, qt, seed);
  std::string trace_path =
      (fs::path(out_dir) / trace_filename(policy, scenario, seed)).string();
  write_trace_csv(res.trace, trace_path);

  const RunMetrics& m = res.metrics;
  std::vector<std::pair<std::string, std::string>> report{
      {"policy", policy_name(policy)},
      {"scenario", scenario_name(scenario)},
      {"seed", std::to_string(seed)},
      {"goal_reaches", std::to_string(m.goal_reaches)},
      {"success", m.success ? "1" : "0"},
      {"min_v", format_double(m.min_v)},
      {"unsafe_steps", std::to_string(m.unsafe_steps)},
      {"violation_steps", std::to_string(m.violation_steps)},
      {"safe_policy_steps", std::to_string(m.safe_policy_steps)},
      {"total_steps", std::to_string(m.total_steps)},
  };
  write_verification_report(report,
                            (fs::path(out_dir) / "metrics.txt").string());
  std::cout << "trace = " << trace_path << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& qtable_path,
                const std::string& out_dir, int jobs, bool reset_aci) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (reset_aci) cfg.reset_aci_on_respawn = true;
  QTable qt = load_qtable(qtable_path);
  check_header(qt, cfg);

  struct Job {
    PolicyKind policy;
    ScenarioKind scenario;
    std::uint64_t seed;
    EpisodeResult result;
  };
  std::vector<Job> matrix;
  for (PolicyKind p : cfg.policies)
    for (ScenarioKind s : cfg.scenarios)
      for (int i = 0; i < cfg.n_runs; ++i)
        matrix.push_back({p, s, cfg.base_seed + static_cast<std::uint64_t>(i),
                          {}});

  if (jobs < 1) jobs = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= matrix.size()) break;
      Job& job = matrix[i];
      job.result = run_episode(job.policy, job.scenario, cfg, qt, job.seed);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // All output writing happens serially after the runs complete.
  fs::create_directories(out_dir);
  atomic_write((fs::path(out_dir) / "config_effective.txt").string(),
               render_experiment_config(cfg));

  std::vector<SummaryRow> summary;
  std::vector<std::pair<std::string, std::string>> report;
  bool all_ok = true;
  for (PolicyKind p : cfg.policies) {
    for (ScenarioKind s : cfg.scenarios) {
      std::vector<RunMetrics> metrics;
      for (const Job& job : matrix) {
        if (job.policy != p || job.scenario != s) continue;
        metrics.push_back(job.result.metrics);
        write_trace_csv(
            job.result.trace,
            (fs::path(out_dir) / trace_filename(p, s, job.seed)).string());
        if (p == PolicyKind::Acofi) {
          TheoremReport tr = verify_theorems(job.result.trace, cfg.filter);
          bool ok = tr.thm1_ok && tr.thm2_ok && tr.pointwise_ok;
          all_ok = all_ok && ok;
          std::string key = policy_name(p) + "_" + scenario_name(s) +
                            "_seed" + std::to_string(job.seed);
          report.emplace_back(key + ".thm1_ok", tr.thm1_ok ? "1" : "0");
          report.emplace_back(key + ".thm2_ok", tr.thm2_ok ? "1" : "0");
          report.emplace_back(key + ".pointwise_ok",
                              tr.pointwise_ok ? "1" : "0");
          report.emplace_back(key + ".worst_slack",
                              format_double(tr.worst_slack));
        }
      }
      summary.push_back(aggregate(p, s, metrics));
    }
  }
  report.emplace_back("all_checks_ok", all_ok ? "1" : "0");
  write_summary_csv(summary, (fs::path(out_dir) / "summary.csv").string());
  write_verification_report(report,
                            (fs::path(out_dir) / "verification.txt").string());

  std::cout << "summary = " << (fs::path(out_dir) / "summary.csv").string()
            << "\nall_checks_ok = " << (all_ok ? 1 : 0) << "\n";
  return all_ok ? kExitOk : kExitTheorem;
}

int cmd_verify(const std::string& trace_path, const std::string& config_path) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  std::vector<StepRecord> trace = read_trace_csv(trace_path);
  TheoremReport tr = verify_theorems(trace, cfg.filter);
  std::cout << "steps = " << tr.steps << "\nthm1_ok = " << tr.thm1_ok
            << "\nthm2_ok = " << tr.thm2_ok
            << "\npointwise_ok = " << tr.pointwise_ok
            << "\nworst_slack = " << format_double(tr.worst_slack) << "\n";
  return (tr.thm1_ok && tr.thm2_ok && tr.pointwise_ok) ? kExitOk
                                                       : kExitTheorem;
}

int cmd_export_plot(const std::string& trace_path, const std::string& out_path,
                    double epsilon) {
  std::vector<StepRecord> trace = read_trace_csv(trace_path);
  export_plot_data(trace, epsilon, out_path);
  std::cout << "plot_data = " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive conformal safety filtering for a Dubins car"};
  app.require_subcommand(1);

  std::string config_path, out_path, qtable_path, trace_path, out_dir;
  std::string policy_str, scenario_str;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool reset_aci = false;
  double epsilon = 0.1;

  auto* solve = app.add_subcommand("solve", "Solve and persist the Q table");
  solve->add_option("--config", config_path)->required();
  solve->add_option("--out", out_path)->required();

  auto* simulate = app.add_subcommand("simulate", "Run a single episode");
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--qtable", qtable_path)->required();
  simulate->add_option("--policy", policy_str)->required();
  simulate->add_option("--scenario", scenario_str)->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--out", out_dir)->required();
  simulate->add_flag("--reset-aci-on-respawn", reset_aci);

  auto* compare = app.add_subcommand(
      "compare", "Run the full policy x scenario x seed matrix");
  compare->add_option("--config", config_path)->required();
  compare->add_option("--qtable", qtable_path)->required();
  compare->add_option("--out", out_dir)->required();
  compare->add_option("--jobs", jobs);
  compare->add_flag("--reset-aci-on-respawn", reset_aci);

  auto* verify =
      app.add_subcommand("verify-theorem", "Check certificates on a trace");
  verify->add_option("--trace", trace_path)->required();
  verify->add_option("--config", config_path)->required();

  auto* plot = app.add_subcommand("export-plot", "Export plot columns");
  plot->add_option("--trace", trace_path)->required();
  plot->add_option("--out", out_path)->required();
  plot->add_option("--epsilon", epsilon);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, out_path);
    if (simulate->parsed())
      return cmd_simulate(config_path, qtable_path, policy_str, scenario_str,
                          seed, out_dir, reset_aci);
    if (compare->parsed())
      return cmd_compare(config_path, qtable_path, out_dir, jobs, reset_aci);
    if (verify->parsed()) return cmd_verify(trace_path, config_path);
    if (plot->parsed()) return cmd_export_plot(trace_path, out_path, epsilon);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HeaderMismatch& e) {
    std::cerr << "error: header-mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergence& e) {
    std::cerr << "error: nonconvergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const MalformedTrace& e) {
    std::cerr << "error: malformed-trace: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
