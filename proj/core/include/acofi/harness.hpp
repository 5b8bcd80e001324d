#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acofi/policies.hpp"

namespace acofi {

struct RunMetrics {
  int goal_reaches = 0;
  bool success = false;        // reached the goal quota before the cap
  double min_v = 0.0;          // min over visited states of V(y_t)
  std::int64_t unsafe_steps = 0;      // V(y_t) <= epsilon
  std::int64_t violation_steps = 0;   // ground truth l(y_t) < 0
  std::int64_t safe_policy_steps = 0;
  std::int64_t total_steps = 0;
};

struct ExperimentConfig {
  WorldConfig world;
  DynamicsConfig dyn;
  GridSpec grid;
  double gamma = 0.98;
  double solver_tol = 1e-6;
  int solver_max_iters = 100000;
  FilterConfig filter;
  PidGains pid_gains;
  double pid_deadband = 0.025;
  std::vector<ScenarioKind> scenarios{
      ScenarioKind::ID, ScenarioKind::VarSpeed, ScenarioKind::VarSteer,
      ScenarioKind::VarSpeedAndSteer};
  std::vector<PolicyKind> policies{PolicyKind::Task, PolicyKind::Fixed,
                                   PolicyKind::Acofi};
  int n_runs = 16;
  std::int64_t step_cap = 1000;
  int goals_per_run = 5;
  std::uint64_t base_seed = 2000;
  bool reset_aci_on_respawn = false;
};

void validate(const ExperimentConfig& cfg);

struct EpisodeResult {
  std::vector<StepRecord> trace;
  RunMetrics metrics;
};

// One seeded run: respawn, loop until the goal quota or the step cap,
// respawning after every goal reach and wall hit. All randomness is keyed by
// (seed, step counter), so the disturbance stream is identical across
// policies for a shared seed. If draw_log is non-null every draw is recorded.
EpisodeResult run_episode(PolicyKind policy, ScenarioKind scenario,
                          const ExperimentConfig& cfg, const QTable& qtable,
                          std::uint64_t seed,
                          std::vector<DrawStream::DrawLogEntry>* draw_log =
                              nullptr);

struct SummaryRow {
  PolicyKind policy;
  ScenarioKind scenario;
  int n_runs = 0;
  double success_rate = 0.0;
  double mean_goal_reaches = 0.0;
  double mean_min_v = 0.0;
  double mean_unsafe_steps = 0.0;
  double mean_violation_steps = 0.0;
  double mean_safe_policy_steps = 0.0;
  double mean_total_steps = 0.0;
};

// Arithmetic means over runs; throws on an empty list.
SummaryRow aggregate(PolicyKind policy, ScenarioKind scenario,
                     const std::vector<RunMetrics>& metrics);

// Table-style "mean count / mean total" rendering of a step-count column.
std::string ratio_cell(double mean_count, double mean_total);

struct TheoremReport {
  bool thm1_ok = false;
  bool thm2_ok = false;
  bool pointwise_ok = false;  // 1[v_next >= b_t] >= 1 - err_t at every step
  double worst_slack = 0.0;   // min over prefixes of the slack, both checks
  std::int64_t steps = 0;
};

// Deterministic certificate checks on a recorded trace: for every prefix T,
//   |avg err - alpha| <= coverage_bound(alpha_1, lambda, T)
//   avg 1[v_next >= b_t] >= 1 - alpha - coverage_bound(alpha_1, lambda, T)
// plus the pointwise inequality at every step. Throws MalformedTrace when
// the rows are internally inconsistent.
TheoremReport verify_theorems(const std::vector<StepRecord>& trace,
                              const FilterConfig& cfg);

}  // namespace acofi
