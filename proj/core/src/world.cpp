#include "acofi/world.hpp"

#include <algorithm>
#include <cmath>

#include "acofi/errors.hpp"

namespace acofi {

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod can round up to 2*pi
  return w;
}

double wrap_to_pi(double theta) {
  double w = wrap_angle(theta);
  if (w >= kTwoPi / 2.0) w -= kTwoPi;
  return w;
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ID: return "id";
    case ScenarioKind::VarSpeed: return "varspeed";
    case ScenarioKind::VarSteer: return "varsteer";
    case ScenarioKind::VarSpeedAndSteer: return "varspeedsteer";
  }
  return "?";
}

bool parse_scenario(const std::string& name, ScenarioKind* out) {
  if (name == "id") *out = ScenarioKind::ID;
  else if (name == "varspeed") *out = ScenarioKind::VarSpeed;
  else if (name == "varsteer") *out = ScenarioKind::VarSteer;
  else if (name == "varspeedsteer") *out = ScenarioKind::VarSpeedAndSteer;
  else return false;
  return true;
}

DubinsState dubins_step(const DubinsState& state, Action action,
                        const DynamicsConfig& dyn, const Scenario& scenario,
                        const DrawStream& rng, std::uint64_t step) {
  // Both draws are consumed in every scenario (draw 0 speed, draw 1 steer).
  double u_speed = rng.symmetric(step, 0);
  double u_steer = rng.symmetric(step, 1);

  double v_eff = dyn.v;
  if (scenario.perturbs_speed()) v_eff += u_speed * dyn.v;

  double omega_eff = action_rate(action, dyn);
  if (scenario.perturbs_steer()) omega_eff += u_steer * dyn.omega;

  DubinsState next;
  next.px = state.px + v_eff * std::cos(state.theta);
  next.py = state.py + v_eff * std::sin(state.theta);
  next.theta = wrap_angle(state.theta + omega_eff);
  return next;
}

double failure_margin(const DubinsState& state, const WorldConfig& world) {
  double margin = world.margin_cap;
  for (const Disc& obs : world.obstacles) {
    double dx = state.px - obs.cx;
    double dy = state.py - obs.cy;
    double d = std::sqrt(dx * dx + dy * dy) - obs.radius;
    margin = std::min(margin, d);
  }
  return margin;
}

TerminationKind terminating(const DubinsState& state,
                            const WorldConfig& world) {
  double dx = state.px - world.goal.cx;
  double dy = state.py - world.goal.cy;
  if (std::sqrt(dx * dx + dy * dy) <= world.goal.radius)
    return TerminationKind::GoalReached;
  if (!world.bounds.contains(state.px, state.py))
    return TerminationKind::WallHit;
  return TerminationKind::None;
}

DubinsState respawn(const DrawStream& rng, std::uint64_t call_index,
                    const WorldConfig& world) {
  const Rect& r = world.spawn_region;
  DubinsState s;
  s.px = r.min_x + rng.uniform01(call_index, 2) * (r.max_x - r.min_x);
  s.py = r.min_y + rng.uniform01(call_index, 3) * (r.max_y - r.min_y);
  s.theta = wrap_angle(rng.uniform01(call_index, 4) * kTwoPi);
  return s;
}

void validate(const WorldConfig& world) {
  const Rect& b = world.bounds;
  if (!(b.min_x < b.max_x && b.min_y < b.max_y))
    throw ConfigError("world bounds are empty");
  if (!(world.margin_cap > 0.0)) throw ConfigError("margin_cap must be > 0");
  auto inside = [&](const Disc& d) {
    return b.contains(d.cx, d.cy);
  };
  if (!inside(world.goal)) throw ConfigError("goal center outside bounds");
  for (const Disc& obs : world.obstacles) {
    if (!inside(obs)) throw ConfigError("obstacle center outside bounds");
    if (!(obs.radius > 0.0)) throw ConfigError("obstacle radius must be > 0");
  }
  const Rect& sp = world.spawn_region;
  if (!(sp.min_x <= sp.max_x && sp.min_y <= sp.max_y))
    throw ConfigError("spawn region is empty");
  // Spawn region must be disjoint from every obstacle disc.
  for (const Disc& obs : world.obstacles) {
    double cx = std::clamp(obs.cx, sp.min_x, sp.max_x);
    double cy = std::clamp(obs.cy, sp.min_y, sp.max_y);
    double dx = cx - obs.cx;
    double dy = cy - obs.cy;
    if (dx * dx + dy * dy < obs.radius * obs.radius)
      throw ConfigError("spawn region intersects an obstacle");
  }
}

void validate(const DynamicsConfig& dyn) {
  if (!(dyn.v > 0.0)) throw ConfigError("speed must be > 0");
  if (!(dyn.omega > 0.0)) throw ConfigError("steering magnitude must be > 0");
}

}  // namespace acofi
