#include "acofi/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acofi {

double score(double q_val, double target) {
  return std::max(q_val - target, 0.0);
}

double quantile(const std::vector<double>& sorted_scores, double p) {
  if (p <= 0.0) return 0.0;
  double n = static_cast<double>(sorted_scores.size());
  if (p > n / (n + 1.0)) return std::numeric_limits<double>::infinity();
  auto rank = static_cast<std::size_t>(std::ceil(p * (n + 1.0)));
  // rank is in [1, |S|] on this branch
  return sorted_scores[rank - 1];
}

int record_and_update(AciState& aci, double q_val, double target) {
  double s = score(q_val, target);
  // alpha_t > 1 means the conformal interval in force is empty, so the step
  // counts as an error regardless of the score. Without this a run of
  // exactly-zero scores would let alpha_t grow without bound and break the
  // Theorem 1 bound; the control-side quantile is 0 in that regime either
  // way, so filtering decisions are unaffected.
  int err = (aci.alpha_t > 1.0 || s > aci.q_t) ? 1 : 0;
  aci.alpha_t += aci.lambda * (aci.alpha_target - err);
  aci.scores.insert(
      std::upper_bound(aci.scores.begin(), aci.scores.end(), s), s);
  aci.q_t = quantile(aci.scores, 1.0 - aci.alpha_t);
  ++aci.t;
  return err;
}

double lower_bound(double q_val, double quantile_val, double l_t,
                   double gamma) {
  if (std::isinf(quantile_val))
    return -std::numeric_limits<double>::infinity();
  return (q_val - quantile_val - (1.0 - gamma) * l_t) / gamma;
}

double coverage_bound(double alpha_1, double lambda, std::int64_t T) {
  return (std::max(alpha_1, 1.0 - alpha_1) + lambda) /
         (static_cast<double>(T) * lambda);
}

}  // namespace acofi
