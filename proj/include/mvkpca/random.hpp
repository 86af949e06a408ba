#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mvkpca {

/// Seeded generator whose output is fully specified: std::mt19937_64 (its
/// sequence is fixed by the standard) feeding hand-written uniform and
/// Box-Muller normal transforms, since the std distributions are
/// implementation-defined. Bump kName when the stream changes.
class DeterministicRng {
 public:
  static constexpr const char* kName = "mt19937_64-boxmuller-v1";

  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mvkpca
