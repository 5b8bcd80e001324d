#pragma once

#include <cstdint>
#include <vector>

namespace acofi {

// Counter-based random stream. Every draw is a pure function of
// (seed, step, draw_index), so two runs with the same seed see identical
// draws at the same step regardless of how the episode unfolded in between.
//
// Stream definition (stable; replicated by external scripts and tests):
//   mix(z): splitmix64 finalizer
//     z += 0x9E3779B97F4A7C15
//     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     return z ^ (z >> 31)
//   key(seed, step, idx) = mix(mix(mix(seed) ^ step) ^ idx)
//   uniform01 = (key >> 11) * 2^-53        in [0, 1)
//
// Draw index conventions used by the environment:
//   0 = speed perturbation, 1 = steering perturbation (per dynamics step)
//   2 = spawn px, 3 = spawn py, 4 = spawn heading (per respawn)
class DrawStream {
 public:
  explicit DrawStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform01(std::uint64_t step, std::uint64_t idx) const {
    double u = to_unit(key(seed_, step, idx));
    if (log_) log_->push_back({step, idx, u});
    return u;
  }

  // U(-1, 1) realized as 2*U(0,1) - 1.
  double symmetric(std::uint64_t step, std::uint64_t idx) const {
    return 2.0 * uniform01(step, idx) - 1.0;
  }

  struct DrawLogEntry {
    std::uint64_t step;
    std::uint64_t idx;
    double value;
  };

  // Debug mode: when a log is attached every draw is appended to it.
  void attach_log(std::vector<DrawLogEntry>* log) { log_ = log; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t key(std::uint64_t seed, std::uint64_t step,
                           std::uint64_t idx) {
    return mix(mix(mix(seed) ^ step) ^ idx);
  }

  static double to_unit(std::uint64_t k) {
    return static_cast<double>(k >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  mutable std::vector<DrawLogEntry>* log_ = nullptr;
};

}  // namespace acofi
