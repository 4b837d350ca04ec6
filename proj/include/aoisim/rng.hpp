#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aoisim {

// Seeded random stream with hand-rolled transforms so that draws are
// bit-reproducible across standard libraries (std::uniform_real_distribution
// et al. are implementation-defined). All stochastic parts of the simulator
// pull from one of these; separate concerns (world, policy, trainer) own
// separate streams so their draw orders never interleave.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // uniform in [0, 1) with 53 random mantissa bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    // multiply-shift; bias is negligible for n << 2^64 and draw order stays fixed
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Box-Muller, one value per call (the pair's second half is cached)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // unit-mean exponential
  double exponential() {
    double u = uniform();
    while (u >= 1.0) u = uniform();
    return -std::log1p(-u);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace aoisim
