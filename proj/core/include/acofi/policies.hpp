#pragma once

#include "acofi/conformal.hpp"
#include "acofi/pid.hpp"
#include "acofi/qtable.hpp"
#include "acofi/world.hpp"

namespace acofi {

enum class PolicyKind { Task, Fixed, Acofi };

std::string policy_name(PolicyKind kind);
bool parse_policy(const std::string& name, PolicyKind* out);

struct FilterConfig {
  double epsilon = 0.1;    // safety value margin
  double alpha_target = 0.2;
  double lambda = 0.05;
  double alpha_init = 0.2;
  double gamma = 0.98;     // shared with the QTable
};

void validate(const FilterConfig& cfg);

struct PolicyDecision {
  Action action = Action::Straight;
  PolicyTag used = PolicyTag::Task;
};

// Fixed-threshold switch: keep the task action iff Q(y, task) >= epsilon
// (inclusive, per the indicator convention).
PolicyDecision fixed_threshold_policy(const DubinsState& state,
                                      const QTable& qtable, Action task_action,
                                      double epsilon);

// Adaptive-threshold switch: keep the task action iff
//   Q(y, task) >= q + gamma*epsilon + (1-gamma)*l(y).
// q = +inf makes the test false unconditionally.
PolicyDecision acofi_select(const DubinsState& state_next,
                            const QTable& qtable, double aci_quantile,
                            double l_next, const FilterConfig& cfg,
                            Action task_action);

// Rolling per-episode state shared by all three policies. The conformal
// bookkeeping runs for every policy; only the action selection differs.
struct EpisodeBundle {
  DubinsState y;           // y_t
  Action u = Action::Straight;
  PolicyTag used = PolicyTag::Task;
  double l = 0.0;          // l(y_t)
  AciState aci;            // q_t in force for u
  PidController pid;
  std::int64_t t = 1;
};

// Initialize the bundle at a fresh state per the algorithm's start rules:
// l_1 = l(y_1), empty score set, q_1 = 0, and the per-policy first action
// (safest available for the adaptive filter).
EpisodeBundle init_bundle(PolicyKind kind, const DubinsState& y1,
                          const QTable& qtable, const WorldConfig& world,
                          const FilterConfig& cfg, const PidGains& gains,
                          double deadband);

// One loop body: step the environment, compute the target R_t, judge err_t
// against the quantile in force, update the calibration state, and select
// u_{t+1} at y_{t+1} per the policy. Emits the completed StepRecord for step
// t and mutates the bundle in place to step t+1. Termination and respawning
// are the caller's concern.
StepRecord episode_step(PolicyKind kind, EpisodeBundle& bundle,
                        const QTable& qtable, const WorldConfig& world,
                        const DynamicsConfig& dyn, const Scenario& scenario,
                        const DrawStream& rng, std::uint64_t step_index,
                        const FilterConfig& cfg);

// The adaptive filter loop body (episode_step specialized to it).
StepRecord acofi_episode_step(EpisodeBundle& bundle, const QTable& qtable,
                              const WorldConfig& world,
                              const DynamicsConfig& dyn,
                              const Scenario& scenario, const DrawStream& rng,
                              std::uint64_t step_index,
                              const FilterConfig& cfg);

// Re-select the bundle's action at its current state (used after respawn).
void select_action(PolicyKind kind, EpisodeBundle& bundle,
                   const QTable& qtable, const WorldConfig& world,
                   const DynamicsConfig& dyn, const FilterConfig& cfg);

}  // namespace acofi
