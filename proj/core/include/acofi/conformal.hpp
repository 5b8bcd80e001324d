#pragma once

#include <cstdint>
#include <vector>

#include "acofi/world.hpp"

namespace acofi {

// One-sided conformal score: max{q_val - target, 0}. Only safety
// over-estimation counts.
double score(double q_val, double target);

// Order-statistic quantile over a sorted multiset with boundary semantics:
//   p < 0                      -> 0
//   p > |S| / (|S|+1)          -> +inf
//   otherwise                  -> ceil(p * (|S|+1))-th smallest element
// p exactly 0 with nonempty S returns 0 (the p<0 branch value); scores are
// nonnegative so this is their infimum.
double quantile(const std::vector<double>& sorted_scores, double p);

// Online calibration state. alpha_t is deliberately unclipped; the quantile
// boundary rules absorb out-of-range values.
struct AciState {
  double alpha_target = 0.2;  // user miscoverage rate
  double lambda = 0.05;       // learning rate
  double alpha_t = 0.2;       // effective miscoverage, unconstrained sign
  std::vector<double> scores; // sorted nondecreasing, all >= 0
  double q_t = 0.0;           // quantile in force (q_1 = 0)
  std::int64_t t = 0;         // completed updates

  AciState() = default;
  AciState(double alpha, double lam, double alpha_init)
      : alpha_target(alpha), lambda(lam), alpha_t(alpha_init) {}
};

// One ACI step: err is judged against the quantile in force (the pre-update
// q_t), then alpha is stepped, the score inserted, and the quantile refreshed
// for the next decision. Returns err. When the pre-update alpha_t exceeds 1
// the interval in force is empty and err is 1 no matter the score; this keeps
// alpha_t inside [-lambda, 1 + lambda] and makes the Theorem 1 bound hold for
// every score stream.
int record_and_update(AciState& aci, double q_val, double target);

// Certified lower bound on the next safety value:
//   B_t = (Q - q_t - (1-gamma) l_t) / gamma
// -inf when the quantile is +inf (forces a switch to the safe policy).
double lower_bound(double q_val, double quantile_val, double l_t, double gamma);

// Deterministic long-run coverage bound: (max{a1, 1-a1} + lambda) / (T*lambda).
double coverage_bound(double alpha_1, double lambda, std::int64_t T);

enum class PolicyTag { Task, Safe };

// Per-step trace row. quantile_t is the quantile in force when the step's
// action was chosen; err_t and b_t are judged against it.
struct StepRecord {
  std::int64_t t = 0;
  DubinsState state;        // y_t
  Action action = Action::Straight;
  PolicyTag policy_used = PolicyTag::Task;
  double l_t = 0.0;
  double q_theta = 0.0;     // Q(y_t, u_t)
  double r_t = 0.0;         // (1-gamma) l_t + gamma min{l_t, v_next}
  int err_t = 0;
  double quantile_t = 0.0;  // may be +inf
  double b_t = 0.0;         // may be -inf
  double v_next = 0.0;      // V(y_{t+1})
};

}  // namespace acofi
