#include "acofi/pid.hpp"

#include <cmath>

namespace acofi {

namespace {

double heading_error(const DubinsState& state, const WorldConfig& world) {
  double bearing = std::atan2(world.goal.cy - state.py,
                              world.goal.cx - state.px);
  return wrap_to_pi(bearing - state.theta);
}

Action quantize(double desired, double deadband) {
  if (std::abs(desired) < deadband) return Action::Straight;
  return desired > 0.0 ? Action::TurnLeft : Action::TurnRight;
}

}  // namespace

Action PidController::select(const DubinsState& state,
                             const WorldConfig& world,
                             const DynamicsConfig& /*dyn*/) {
  double e = heading_error(state, world);
  integral_ += e;
  double deriv = have_prev_ ? e - prev_error_ : 0.0;
  prev_error_ = e;
  have_prev_ = true;
  double desired = gains_.kp * e + gains_.ki * integral_ + gains_.kd * deriv;
  return quantize(desired, deadband_);
}

Action pid_task_action(const DubinsState& state, const WorldConfig& world,
                       const DynamicsConfig& /*dyn*/, const PidGains& gains,
                       double deadband) {
  double e = heading_error(state, world);
  return quantize(gains.kp * e, deadband);
}

}  // namespace acofi
