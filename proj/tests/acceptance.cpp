// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Heavier end-to-end checks live here rather than in the
// unit suites so their runtime budgets can be enforced in one place.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "acofi/config.hpp"
#include "acofi/harness.hpp"
#include "acofi/trace_io.hpp"

using namespace acofi;
namespace fs = std::filesystem;

#ifndef ACOFI_CLI_PATH
#error "ACOFI_CLI_PATH must be defined"
#endif
#ifndef ACOFI_DEFAULT_CONFIG
#error "ACOFI_DEFAULT_CONFIG must be defined"
#endif

namespace {

const double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void report(int criterion, const char* what, bool ok, double seconds) {
  std::printf("criterion %d (%s): %s  [%.2fs]\n", criterion, what,
              ok ? "PASS" : "FAIL", seconds);
  if (!ok) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

// ---- criterion 1: Theorem 1 on adversarial synthetic streams ----

bool theorem1_holds(const std::vector<double>& stream, double alpha,
                    double lambda, double alpha_init) {
  AciState aci(alpha, lambda, alpha_init);
  double err_sum = 0.0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    err_sum += record_and_update(aci, stream[t], 0.0);
    auto T = static_cast<double>(t + 1);
    double bound =
        coverage_bound(alpha_init, lambda, static_cast<std::int64_t>(t + 1));
    if (std::abs(err_sum / T - alpha) > bound + 1e-12) return false;
  }
  return true;
}

bool criterion1() {
  const std::size_t T = 10000;
  std::vector<std::vector<double>> streams;
  streams.emplace_back(T, 0.0);                       // all-zero
  streams.emplace_back(T, 1e9);                       // all-huge
  std::vector<double> alt(T);
  for (std::size_t t = 0; t < T; ++t) alt[t] = t % 2 ? 1e6 : 0.0;
  streams.push_back(alt);
  std::vector<double> blocks(T);                      // long alternating blocks
  for (std::size_t t = 0; t < T; ++t) blocks[t] = (t / 250) % 2 ? 1e3 : 0.0;
  streams.push_back(blocks);
  for (std::uint64_t seed : {1, 2, 3}) {              // random-walk drifts
    DrawStream rng(seed);
    std::vector<double> drift(T);
    double level = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
      level = std::max(0.0, level + rng.uniform01(t, 0) - 0.5);
      drift[t] = level;
    }
    streams.push_back(drift);
  }
  for (std::uint64_t seed : {10, 11}) {               // iid uniform
    DrawStream rng(seed);
    std::vector<double> s(T);
    for (std::size_t t = 0; t < T; ++t) s[t] = rng.uniform01(t, 0);
    streams.push_back(s);
  }
  std::vector<double> spike(T, 0.0);                  // a single late burst
  for (std::size_t t = 9000; t < T; ++t) spike[t] = 1e9;
  streams.push_back(spike);

  bool ok = streams.size() >= 10;
  for (const auto& s : streams) {
    ok = ok && theorem1_holds(s, 0.2, 0.05, 0.2);
    ok = ok && theorem1_holds(s, 0.1, 0.01, 0.9);
  }
  return ok;
}

// ---- criterion 4 helper: independent micro-grid oracle ----

struct MicroOracle {
  GridSpec g;
  WorldConfig w;
  DynamicsConfig dyn;
  double gamma;
  std::vector<double> q;

  double l_at(int i, int j) const {
    return failure_margin({g.x_at(i), g.y_at(j), 0.0}, w);
  }

  double interp_q(double x, double y, double theta, int slot) const {
    double fx = (std::clamp(x, g.bounds.min_x, g.bounds.max_x) -
                 g.bounds.min_x) /
                (g.bounds.max_x - g.bounds.min_x) * (g.nx - 1);
    double fy = (std::clamp(y, g.bounds.min_y, g.bounds.max_y) -
                 g.bounds.min_y) /
                (g.bounds.max_y - g.bounds.min_y) * (g.ny - 1);
    double ft = wrap_angle(theta) / kTwoPi * g.ntheta;
    int i0 = std::min(static_cast<int>(fx), g.nx - 2);
    int j0 = std::min(static_cast<int>(fy), g.ny - 2);
    int k0 = static_cast<int>(ft) % g.ntheta;
    int k1 = (k0 + 1) % g.ntheta;
    double wx = fx - i0, wy = fy - j0, wt = ft - std::floor(ft);
    auto at = [&](int i, int j, int k) {
      return q[((static_cast<std::size_t>(i) * g.ny + j) * g.ntheta + k) * 3 +
               slot];
    };
    double out = 0.0;
    for (int di = 0; di < 2; ++di)
      for (int dj = 0; dj < 2; ++dj) {
        double wxy = (di ? wx : 1.0 - wx) * (dj ? wy : 1.0 - wy);
        out += wxy * ((1.0 - wt) * at(i0 + di, j0 + dj, k0) +
                      wt * at(i0 + di, j0 + dj, k1));
      }
    return out;
  }

  double interp_v(double x, double y, double theta) const {
    double v = interp_q(x, y, theta, 0);
    v = std::max(v, interp_q(x, y, theta, 1));
    return std::max(v, interp_q(x, y, theta, 2));
  }

  bool solve(double tol, int max_iters) {
    q.assign(g.node_count() * 3, 0.0);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.ntheta; ++k)
          for (int s = 0; s < 3; ++s)
            q[g.node_index(i, j, k) * 3 + s] = l_at(i, j);
    std::vector<double> next(q.size());
    for (int iter = 0; iter < max_iters; ++iter) {
      double residual = 0.0;
      for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
          for (int k = 0; k < g.ntheta; ++k) {
            double th = g.theta_at(k);
            double l = l_at(i, j);
            for (int s = 0; s < 3; ++s) {
              double v_succ = interp_v(g.x_at(i) + dyn.v * std::cos(th),
                                       g.y_at(j) + dyn.v * std::sin(th),
                                       th + (s - 1) * dyn.omega);
              double t = (1.0 - gamma) * l + gamma * std::min(l, v_succ);
              std::size_t idx = g.node_index(i, j, k) * 3 + s;
              next[idx] = t;
              residual = std::max(residual, std::abs(t - q[idx]));
            }
          }
      q.swap(next);
      if (residual <= tol) return true;
    }
    return false;
  }
};

double table_distance(const std::vector<double>& a,
                      const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

QTable random_table(const GridSpec& g, const DynamicsConfig& dyn, double gamma,
                    std::uint64_t seed) {
  QTable qt;
  qt.grid = g;
  qt.dyn = dyn;
  qt.gamma = gamma;
  qt.values.resize(g.node_count() * 3);
  DrawStream rng(seed);
  for (std::size_t n = 0; n < qt.values.size(); ++n)
    qt.values[n] = rng.uniform01(n, 0) * 2.0 - 1.0;
  return qt;
}

// ---- criterion 5 helper ----

double quantile_oracle(std::vector<double> scores, double p) {
  if (p <= 0.0) return 0.0;
  std::sort(scores.begin(), scores.end());
  double n = static_cast<double>(scores.size());
  if (p > n / (n + 1.0)) return kInf;
  std::size_t rank = 0;
  while (static_cast<double>(rank) < p * (n + 1.0)) ++rank;
  return scores[rank - 1];
}

bool criterion5() {
  DrawStream rng(8080);
  bool hit_zero = false;
  bool hit_inf = false;
  bool ok = true;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    std::size_t size = static_cast<std::size_t>(rng.uniform01(rep, 0) * 50);
    std::vector<double> s;
    for (std::size_t i = 0; i < size; ++i)
      s.push_back(std::floor(rng.uniform01(rep, 2 + i) * 16.0) / 16.0);
    std::sort(s.begin(), s.end());
    for (int j = 0; j < 100; ++j) {
      double p = rng.uniform01(rep, 1000 + j) * 1.6 - 0.3;
      double got = quantile(s, p);
      if (got != quantile_oracle(s, p)) ok = false;
      if (got == 0.0 && p <= 0.0) hit_zero = true;
      if (std::isinf(got)) hit_inf = true;
    }
  }
  return ok && hit_zero && hit_inf;
}

// ---- CLI helpers for criterion 6 ----

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "<missing:" + path.string() + ">";
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(ACOFI_CLI_PATH) + " " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

bool criterion6(const fs::path& work) {
  fs::path qfile = work / "c6_qtable.bin";
  std::string cfg = ACOFI_DEFAULT_CONFIG;
  if (run_cli("solve --config " + cfg + " --out " + qfile.string()) != 0)
    return false;
  fs::path out_a = work / "c6_a";
  fs::path out_b = work / "c6_b";
  if (run_cli("compare --config " + cfg + " --qtable " + qfile.string() +
              " --out " + out_a.string() + " --jobs 2") != 0)
    return false;
  if (run_cli("compare --config " + cfg + " --qtable " + qfile.string() +
              " --out " + out_b.string() + " --jobs 1") != 0)
    return false;

  if (slurp(out_a / "summary.csv") != slurp(out_b / "summary.csv"))
    return false;
  std::size_t traces = 0;
  for (const auto& entry : fs::directory_iterator(out_a)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("trace_", 0) != 0) continue;
    ++traces;
    if (slurp(entry.path()) != slurp(out_b / name)) return false;
  }
  return traces > 0;
}

// ---- criterion 7: draw-for-draw fairness ----

bool criterion7(const ExperimentConfig& cfg, const QTable& qtable) {
  using Entry = DrawStream::DrawLogEntry;
  for (ScenarioKind s : cfg.scenarios) {
    for (std::uint64_t seed = cfg.base_seed; seed < cfg.base_seed + 4;
         ++seed) {
      std::vector<std::vector<Entry>> logs(3);
      std::vector<std::int64_t> steps(3);
      int p = 0;
      for (PolicyKind kind : cfg.policies) {
        EpisodeResult r = run_episode(kind, s, cfg, qtable, seed, &logs[p]);
        steps[p] = r.metrics.total_steps;
        ++p;
      }
      // Per-step dynamics draws (idx 0 and 1) must agree across policies for
      // every step index all of them executed. Respawn draws (idx >= 2) are
      // policy-dependent events and are excluded.
      std::vector<std::vector<Entry>> dyn(3);
      for (int i = 0; i < 3; ++i)
        for (const Entry& e : logs[i])
          if (e.idx <= 1) dyn[i].push_back(e);
      std::int64_t common = *std::min_element(steps.begin(), steps.end());
      for (int i = 0; i < 3; ++i) {
        if (static_cast<std::int64_t>(dyn[i].size()) != 2 * steps[i])
          return false;
        // Exactly two draws per executed step, in (speed, steer) order.
        for (std::int64_t t = 0; t < steps[i]; ++t) {
          if (dyn[i][2 * t].step != static_cast<std::uint64_t>(t) ||
              dyn[i][2 * t].idx != 0 ||
              dyn[i][2 * t + 1].idx != 1)
            return false;
        }
      }
      for (std::int64_t t = 0; t < 2 * common; ++t) {
        if (dyn[0][t].value != dyn[1][t].value ||
            dyn[1][t].value != dyn[2][t].value)
          return false;
      }
    }
  }
  return true;
}

}  // namespace

int main() {
  fs::path work = fs::temp_directory_path() / "acofi_acceptance";
  fs::create_directories(work);

  ExperimentConfig cfg = load_experiment_config(ACOFI_DEFAULT_CONFIG);

  {
    Timer t;
    bool ok = criterion1();
    double s = t.elapsed();
    report(1, "theorem 1 bound on adversarial streams", ok && s < 5.0, s);
  }

  // Shared default-grid solve, timed for criterion 4's solver budget.
  Timer solve_timer;
  int iters = 0;
  double residual = kInf;
  QTable qtable =
      solve_safety_bellman(cfg.world, cfg.grid, cfg.dyn, cfg.gamma,
                           cfg.solver_tol, cfg.solver_max_iters, &iters,
                           &residual);
  double solve_seconds = solve_timer.elapsed();

  // Full default matrix, shared by criteria 2 and 3.
  Timer matrix_timer;
  struct Cell {
    SummaryRow row;
    bool theorems_ok = true;
  };
  std::vector<Cell> cells;
  bool matrix_theorems_ok = true;
  for (PolicyKind p : cfg.policies) {
    for (ScenarioKind s : cfg.scenarios) {
      Cell cell;
      std::vector<RunMetrics> metrics;
      for (int i = 0; i < cfg.n_runs; ++i) {
        EpisodeResult r = run_episode(
            p, s, cfg, qtable, cfg.base_seed + static_cast<std::uint64_t>(i));
        metrics.push_back(r.metrics);
        if (p == PolicyKind::Acofi) {
          TheoremReport rep = verify_theorems(r.trace, cfg.filter);
          bool ok = rep.thm1_ok && rep.thm2_ok && rep.pointwise_ok;
          cell.theorems_ok = cell.theorems_ok && ok;
          matrix_theorems_ok = matrix_theorems_ok && ok;
        }
      }
      cell.row = aggregate(p, s, metrics);
      cells.push_back(cell);
    }
  }
  double matrix_seconds = matrix_timer.elapsed();

  report(2, "theorem 2 certificates on all acofi traces",
         matrix_theorems_ok && matrix_seconds < 60.0, matrix_seconds);

  {
    auto row = [&](PolicyKind p, ScenarioKind s) -> const SummaryRow& {
      for (const Cell& c : cells)
        if (c.row.policy == p && c.row.scenario == s) return c.row;
      std::abort();
    };
    bool ok = true;
    for (ScenarioKind s : cfg.scenarios) {
      const SummaryRow& task = row(PolicyKind::Task, s);
      const SummaryRow& fixed = row(PolicyKind::Fixed, s);
      const SummaryRow& acofi = row(PolicyKind::Acofi, s);
      ok = ok && acofi.mean_min_v >= fixed.mean_min_v;
      ok = ok && fixed.mean_min_v >= task.mean_min_v;
      ok = ok && acofi.mean_unsafe_steps <= fixed.mean_unsafe_steps;
      ok = ok && fixed.mean_unsafe_steps <= task.mean_unsafe_steps;
      ok = ok && task.mean_unsafe_steps > acofi.mean_unsafe_steps;
      ok = ok && task.mean_unsafe_steps > fixed.mean_unsafe_steps;
      ok = ok && task.mean_min_v < fixed.mean_min_v;
      ok = ok && task.mean_min_v < acofi.mean_min_v;
    }
    report(3, "seed-averaged safety orderings in all scenarios",
           ok && matrix_seconds < 600.0, matrix_seconds);
  }

  {
    Timer t;
    bool ok = residual <= 1e-6;

    GridSpec micro;
    micro.nx = 5;
    micro.ny = 5;
    micro.ntheta = 4;
    WorldConfig micro_world;
    micro_world.obstacles = {{0.5, 0.5, 0.2}};
    micro_world.spawn_region = {0.05, 0.05, 0.1, 0.1};
    DynamicsConfig micro_dyn{0.1, 0.5};
    const double micro_gamma = 0.9;
    const double micro_tol = 1e-7;

    for (std::uint64_t pair = 0; pair < 20; ++pair) {
      QTable q1 = random_table(micro, micro_dyn, micro_gamma, 100 + pair);
      QTable q2 = random_table(micro, micro_dyn, micro_gamma, 500 + pair);
      double before = table_distance(q1.values, q2.values);
      double after = table_distance(backup_sweep(q1, micro_world),
                                    backup_sweep(q2, micro_world));
      ok = ok && after <= micro_gamma * before + 1e-12;
    }

    const GridSpec& g = qtable.grid;
    for (int i = 0; i < g.nx && ok; ++i)
      for (int j = 0; j < g.ny && ok; ++j) {
        double l = failure_margin({g.x_at(i), g.y_at(j), 0.0}, cfg.world);
        double cap = l + cfg.solver_tol / (1.0 - cfg.gamma);
        for (int k = 0; k < g.ntheta; ++k) {
          double v = std::max({qtable.at(i, j, k, 0), qtable.at(i, j, k, 1),
                               qtable.at(i, j, k, 2)});
          if (v > cap) ok = false;
        }
      }

    QTable micro_solved = solve_safety_bellman(
        micro_world, micro, micro_dyn, micro_gamma, micro_tol, 100000);
    MicroOracle oracle{micro, micro_world, micro_dyn, micro_gamma, {}};
    ok = ok && oracle.solve(micro_tol, 100000);
    ok = ok && table_distance(micro_solved.values, oracle.q) <=
                   10.0 * micro_tol;
    double s = t.elapsed();
    report(4, "value iteration correctness",
           ok && solve_seconds < 300.0 && s < 10.0, solve_seconds + s);
  }

  {
    Timer t;
    bool ok = criterion5();
    double s = t.elapsed();
    report(5, "quantile oracle equivalence", ok && s < 5.0, s);
  }

  {
    Timer t;
    bool ok = criterion6(work);
    report(6, "byte-identical compare outputs", ok, t.elapsed());
  }

  {
    Timer t;
    bool ok = criterion7(cfg, qtable);
    report(7, "draw-for-draw fairness across policies", ok, t.elapsed());
  }

  std::error_code ec;
  fs::remove_all(work, ec);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
