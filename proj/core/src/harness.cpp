#include "acofi/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "acofi/errors.hpp"

namespace acofi {

void validate(const ExperimentConfig& cfg) {
  validate(cfg.world);
  validate(cfg.dyn);
  validate(cfg.grid);
  validate(cfg.filter);
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw ConfigError("gamma must be in (0,1)");
  if (cfg.gamma != cfg.filter.gamma)
    throw ConfigError("solver and filter gamma must agree");
  if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver tol must be > 0");
  if (cfg.solver_max_iters < 1)
    throw ConfigError("solver max_iters must be >= 1");
  if (cfg.step_cap < 1) throw ConfigError("step_cap must be >= 1");
  if (cfg.n_runs < 1) throw ConfigError("n_runs must be >= 1");
  if (cfg.goals_per_run < 1) throw ConfigError("goals_per_run must be >= 1");
  if (cfg.scenarios.empty()) throw ConfigError("no scenarios configured");
  if (cfg.policies.empty()) throw ConfigError("no policies configured");
}

EpisodeResult run_episode(PolicyKind policy, ScenarioKind scenario_kind,
                          const ExperimentConfig& cfg, const QTable& qtable,
                          std::uint64_t seed,
                          std::vector<DrawStream::DrawLogEntry>* draw_log) {
  Scenario scenario{scenario_kind};
  DrawStream rng(seed);
  if (draw_log) rng.attach_log(draw_log);

  EpisodeResult result;
  result.metrics.min_v = std::numeric_limits<double>::infinity();

  std::uint64_t n = 0;  // steps consumed; keys every draw
  DubinsState y1 = respawn(rng, n, cfg.world);
  EpisodeBundle bundle = init_bundle(policy, y1, qtable, cfg.world, cfg.filter,
                                     cfg.pid_gains, cfg.pid_deadband);

  RunMetrics& m = result.metrics;
  while (m.total_steps < cfg.step_cap) {
    double v_curr = v_value(qtable, bundle.y);
    m.min_v = std::min(m.min_v, v_curr);
    if (v_curr <= cfg.filter.epsilon) ++m.unsafe_steps;
    if (bundle.l < 0.0) ++m.violation_steps;
    if (bundle.used == PolicyTag::Safe) ++m.safe_policy_steps;

    result.trace.push_back(episode_step(policy, bundle, qtable, cfg.world,
                                        cfg.dyn, scenario, rng, n,
                                        cfg.filter));
    ++n;
    ++m.total_steps;

    TerminationKind term = terminating(bundle.y, cfg.world);
    if (term == TerminationKind::None) continue;
    if (term == TerminationKind::GoalReached) {
      ++m.goal_reaches;
      if (m.goal_reaches >= cfg.goals_per_run) {
        m.success = true;
        break;
      }
    }
    // Goal reach or wall hit: place the agent back in the spawn region.
    bundle.y = respawn(rng, n, cfg.world);
    bundle.l = failure_margin(bundle.y, cfg.world);
    bundle.pid.reset();
    if (cfg.reset_aci_on_respawn) {
      bundle.aci = AciState(cfg.filter.alpha_target, cfg.filter.lambda,
                            cfg.filter.alpha_init);
      if (policy == PolicyKind::Acofi) {
        bundle.u = safest_action(qtable, bundle.y);
        bundle.used = PolicyTag::Safe;
        continue;
      }
    }
    select_action(policy, bundle, qtable, cfg.world, cfg.dyn, cfg.filter);
  }
  return result;
}

SummaryRow aggregate(PolicyKind policy, ScenarioKind scenario,
                     const std::vector<RunMetrics>& metrics) {
  if (metrics.empty()) throw EmptyInput("aggregate: no run metrics");
  SummaryRow row;
  row.policy = policy;
  row.scenario = scenario;
  row.n_runs = static_cast<int>(metrics.size());
  for (const RunMetrics& m : metrics) {
    row.success_rate += m.success ? 1.0 : 0.0;
    row.mean_goal_reaches += static_cast<double>(m.goal_reaches);
    row.mean_min_v += m.min_v;
    row.mean_unsafe_steps += static_cast<double>(m.unsafe_steps);
    row.mean_violation_steps += static_cast<double>(m.violation_steps);
    row.mean_safe_policy_steps += static_cast<double>(m.safe_policy_steps);
    row.mean_total_steps += static_cast<double>(m.total_steps);
  }
  double n = static_cast<double>(row.n_runs);
  row.success_rate /= n;
  row.mean_goal_reaches /= n;
  row.mean_min_v /= n;
  row.mean_unsafe_steps /= n;
  row.mean_violation_steps /= n;
  row.mean_safe_policy_steps /= n;
  row.mean_total_steps /= n;
  return row;
}

std::string ratio_cell(double mean_count, double mean_total) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f/%.1f", mean_count, mean_total);
  return buf;
}

TheoremReport verify_theorems(const std::vector<StepRecord>& trace,
                              const FilterConfig& cfg) {
  if (trace.empty()) throw MalformedTrace("verify_theorems: empty trace");

  // Internal consistency of each row (the recomputable invariants).
  for (const StepRecord& rec : trace) {
    double r = (1.0 - cfg.gamma) * rec.l_t +
               cfg.gamma * std::min(rec.l_t, rec.v_next);
    if (r != rec.r_t)
      throw MalformedTrace("step " + std::to_string(rec.t) +
                           ": R does not match its definition");
    double b = lower_bound(rec.q_theta, rec.quantile_t, rec.l_t, cfg.gamma);
    if (b != rec.b_t)
      throw MalformedTrace("step " + std::to_string(rec.t) +
                           ": B does not match its definition");
  }

  TheoremReport report;
  report.steps = static_cast<std::int64_t>(trace.size());
  report.thm1_ok = true;
  report.thm2_ok = true;
  report.pointwise_ok = true;
  report.worst_slack = std::numeric_limits<double>::infinity();

  constexpr double kFpSlack = 1e-12;
  double err_sum = 0.0;
  double cover_sum = 0.0;
  for (std::size_t idx = 0; idx < trace.size(); ++idx) {
    const StepRecord& rec = trace[idx];
    int covered = rec.v_next >= rec.b_t ? 1 : 0;
    if (covered < 1 - rec.err_t) report.pointwise_ok = false;
    err_sum += rec.err_t;
    cover_sum += covered;

    auto T = static_cast<std::int64_t>(idx + 1);
    double bound = coverage_bound(cfg.alpha_init, cfg.lambda, T);
    double slack1 = bound - std::abs(err_sum / T - cfg.alpha_target);
    if (slack1 < -kFpSlack) report.thm1_ok = false;
    double slack2 =
        cover_sum / T - (1.0 - cfg.alpha_target - bound);
    if (slack2 < -kFpSlack) report.thm2_ok = false;
    report.worst_slack = std::min({report.worst_slack, slack1, slack2});
  }
  return report;
}

}  // namespace acofi
