#pragma once

#include "acofi/world.hpp"

namespace acofi {

struct PidGains {
  double kp = 2.0;
  double ki = 0.0;
  double kd = 0.0;
};

// Goal-seeking task controller. Computes a desired continuous angular rate
// from the heading error toward the goal center, then quantizes it onto the
// three-action steering set. Ignores obstacles entirely.
class PidController {
 public:
  PidController() = default;
  PidController(const PidGains& gains, double deadband)
      : gains_(gains), deadband_(deadband) {}

  // Called on respawn; clears integral and derivative history.
  void reset() {
    integral_ = 0.0;
    have_prev_ = false;
    prev_error_ = 0.0;
  }

  Action select(const DubinsState& state, const WorldConfig& world,
                const DynamicsConfig& dyn);

 private:
  PidGains gains_;
  double deadband_ = 0.025;  // default omega/2
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  bool have_prev_ = false;
};

// Stateless form for P-only gains (integral/derivative terms zero).
Action pid_task_action(const DubinsState& state, const WorldConfig& world,
                       const DynamicsConfig& dyn, const PidGains& gains,
                       double deadband);

}  // namespace acofi
