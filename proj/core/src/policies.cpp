#include "acofi/policies.hpp"

#include <algorithm>
#include <cmath>

#include "acofi/errors.hpp"

namespace acofi {

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Task: return "task";
    case PolicyKind::Fixed: return "fixed";
    case PolicyKind::Acofi: return "acofi";
  }
  return "?";
}

bool parse_policy(const std::string& name, PolicyKind* out) {
  if (name == "task") *out = PolicyKind::Task;
  else if (name == "fixed") *out = PolicyKind::Fixed;
  else if (name == "acofi") *out = PolicyKind::Acofi;
  else return false;
  return true;
}

void validate(const FilterConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    throw ConfigError("epsilon must be a finite positive real");
  if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw ConfigError("gamma must be in (0,1)");
}

PolicyDecision fixed_threshold_policy(const DubinsState& state,
                                      const QTable& qtable, Action task_action,
                                      double epsilon) {
  if (q_value(qtable, state, task_action) >= epsilon)
    return {task_action, PolicyTag::Task};
  return {safest_action(qtable, state), PolicyTag::Safe};
}

PolicyDecision acofi_select(const DubinsState& state_next,
                            const QTable& qtable, double aci_quantile,
                            double l_next, const FilterConfig& cfg,
                            Action task_action) {
  double threshold = aci_quantile + cfg.gamma * cfg.epsilon +
                     (1.0 - cfg.gamma) * l_next;
  // threshold is +inf when the quantile is, so the test fails as required
  if (q_value(qtable, state_next, task_action) >= threshold)
    return {task_action, PolicyTag::Task};
  return {safest_action(qtable, state_next), PolicyTag::Safe};
}

void select_action(PolicyKind kind, EpisodeBundle& bundle,
                   const QTable& qtable, const WorldConfig& world,
                   const DynamicsConfig& dyn, const FilterConfig& cfg) {
  Action task_action = bundle.pid.select(bundle.y, world, dyn);
  switch (kind) {
    case PolicyKind::Task:
      bundle.u = task_action;
      bundle.used = PolicyTag::Task;
      break;
    case PolicyKind::Fixed: {
      PolicyDecision d =
          fixed_threshold_policy(bundle.y, qtable, task_action, cfg.epsilon);
      bundle.u = d.action;
      bundle.used = d.used;
      break;
    }
    case PolicyKind::Acofi: {
      PolicyDecision d = acofi_select(bundle.y, qtable, bundle.aci.q_t,
                                      bundle.l, cfg, task_action);
      bundle.u = d.action;
      bundle.used = d.used;
      break;
    }
  }
}

EpisodeBundle init_bundle(PolicyKind kind, const DubinsState& y1,
                          const QTable& qtable, const WorldConfig& world,
                          const FilterConfig& cfg, const PidGains& gains,
                          double deadband) {
  EpisodeBundle b;
  b.y = y1;
  b.l = failure_margin(y1, world);
  b.aci = AciState(cfg.alpha_target, cfg.lambda, cfg.alpha_init);
  b.pid = PidController(gains, deadband);
  b.t = 1;
  if (kind == PolicyKind::Acofi) {
    // No score history yet, so the first control is the safest available.
    b.u = safest_action(qtable, y1);
    b.used = PolicyTag::Safe;
  } else {
    select_action(kind, b, qtable, world, qtable.dyn, cfg);
  }
  return b;
}

StepRecord episode_step(PolicyKind kind, EpisodeBundle& bundle,
                        const QTable& qtable, const WorldConfig& world,
                        const DynamicsConfig& dyn, const Scenario& scenario,
                        const DrawStream& rng, std::uint64_t step_index,
                        const FilterConfig& cfg) {
  DubinsState y_next = dubins_step(bundle.y, bundle.u, dyn, scenario, rng,
                                   step_index);
  double v_next = v_value(qtable, y_next);
  double q_theta = q_value(qtable, bundle.y, bundle.u);
  double r_t = (1.0 - cfg.gamma) * bundle.l +
               cfg.gamma * std::min(bundle.l, v_next);

  double quantile_in_force = bundle.aci.q_t;
  int err = record_and_update(bundle.aci, q_theta, r_t);

  StepRecord rec;
  rec.t = bundle.t;
  rec.state = bundle.y;
  rec.action = bundle.u;
  rec.policy_used = bundle.used;
  rec.l_t = bundle.l;
  rec.q_theta = q_theta;
  rec.r_t = r_t;
  rec.err_t = err;
  rec.quantile_t = quantile_in_force;
  rec.b_t = lower_bound(q_theta, quantile_in_force, bundle.l, cfg.gamma);
  rec.v_next = v_next;

  bundle.y = y_next;
  bundle.l = failure_margin(y_next, world);
  bundle.t += 1;
  select_action(kind, bundle, qtable, world, dyn, cfg);
  return rec;
}

StepRecord acofi_episode_step(EpisodeBundle& bundle, const QTable& qtable,
                              const WorldConfig& world,
                              const DynamicsConfig& dyn,
                              const Scenario& scenario, const DrawStream& rng,
                              std::uint64_t step_index,
                              const FilterConfig& cfg) {
  return episode_step(PolicyKind::Acofi, bundle, qtable, world, dyn, scenario,
                      rng, step_index, cfg);
}

}  // namespace acofi
