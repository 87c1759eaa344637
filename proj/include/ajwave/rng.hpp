#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

// Deterministic random streams. Every Monte Carlo trial owns an independent
// stream derived from (run seed, trial index), so results do not depend on
// how trials are scheduled across worker threads. The uniform and normal
// transforms are spelled out here instead of using std::*_distribution,
// whose output is implementation-defined and would break run-to-run
// reproducibility across standard libraries.

namespace ajwave {

// splitmix64 finalizer: bijective 64-bit mixer with good avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; two uniforms per variate, no cached
  // second value (keeps the draw count per variate fixed).
  double normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Unbiased integer in {0, ..., n-1} by masked rejection.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const auto un = static_cast<std::uint64_t>(n);
    std::uint64_t mask = un - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t r;
    do {
      r = next_u64() & mask;
    } while (r >= un);
    return static_cast<int>(r);
  }

 private:
  std::mt19937_64 gen_;
};

// Stream for one Monte Carlo trial: both inputs pass through the mixer so
// neighbouring trial indices (and neighbouring seeds) give decorrelated
// generator states.
inline RngStream trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return RngStream(mix64(mix64(seed) ^ mix64(trial + 0xD1B54A32D192ED03ull)));
}

}  // namespace ajwave
