#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acofi/rng.hpp"

namespace acofi {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Wrap an angle into [0, 2*pi).
double wrap_angle(double theta);

// Wrap an angle difference into [-pi, pi).
double wrap_to_pi(double theta);

struct DubinsState {
  double px = 0.0;
  double py = 0.0;
  double theta = 0.0;  // always in [0, 2*pi)
};

// Steering command: one of the three admissible angular rates
// {-omega, 0, +omega}. Stored as the signed index so the action set is
// independent of the steering magnitude.
enum class Action : int { TurnRight = -1, Straight = 0, TurnLeft = 1 };

constexpr Action kAllActions[3] = {Action::TurnRight, Action::Straight,
                                   Action::TurnLeft};

inline int action_slot(Action a) { return static_cast<int>(a) + 1; }
inline Action action_from_slot(int slot) {
  return static_cast<Action>(slot - 1);
}

struct DynamicsConfig {
  double v = 0.01;      // speed, units/step
  double omega = 0.05;  // steering magnitude, rad/step
};

inline double action_rate(Action a, const DynamicsConfig& dyn) {
  return static_cast<int>(a) * dyn.omega;
}

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

struct WorldConfig {
  Rect bounds{0.0, 0.0, 1.0, 1.0};
  std::vector<Disc> obstacles{{0.45, 0.48, 0.10}, {0.52, 0.41, 0.10}};
  Disc goal{0.85, 0.85, 0.08};
  Rect spawn_region{0.05, 0.05, 0.25, 0.25};
  double margin_cap = 0.5;
};

enum class ScenarioKind { ID, VarSpeed, VarSteer, VarSpeedAndSteer };

struct Scenario {
  ScenarioKind kind = ScenarioKind::ID;

  bool perturbs_speed() const {
    return kind == ScenarioKind::VarSpeed ||
           kind == ScenarioKind::VarSpeedAndSteer;
  }
  bool perturbs_steer() const {
    return kind == ScenarioKind::VarSteer ||
           kind == ScenarioKind::VarSpeedAndSteer;
  }
};

std::string scenario_name(ScenarioKind kind);
bool parse_scenario(const std::string& name, ScenarioKind* out);

enum class TerminationKind { None, GoalReached, WallHit };

// One dynamics step. Position advances along the pre-step heading, then the
// heading turns. Both perturbation draws (speed, steering) are consumed at
// every step in every scenario, so runs sharing a seed see identical streams
// no matter which scenario is active.
DubinsState dubins_step(const DubinsState& state, Action action,
                        const DynamicsConfig& dyn, const Scenario& scenario,
                        const DrawStream& rng, std::uint64_t step);

// Signed distance to the nearest obstacle boundary, capped above at
// margin_cap. Negative inside an obstacle.
double failure_margin(const DubinsState& state, const WorldConfig& world);

// Goal takes precedence when both goal and wall conditions hold.
TerminationKind terminating(const DubinsState& state, const WorldConfig& world);

// Uniform position in the spawn region, uniform heading in [0, 2*pi).
// `call_index` keys the draws; the harness passes the current step counter.
DubinsState respawn(const DrawStream& rng, std::uint64_t call_index,
                    const WorldConfig& world);

// Validation of config invariants; throws ConfigError (see errors.hpp).
void validate(const WorldConfig& world);
void validate(const DynamicsConfig& dyn);

}  // namespace acofi
