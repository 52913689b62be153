#pragma once

#include <cstdint>
#include <random>

namespace ssbo {

// Deterministic random stream with a fixed draw-count contract:
// uniform01() consumes one engine word, normal() always consumes two
// (Box-Muller without the usual pair cache). This keeps replay exact
// across call sites that must stay in lockstep, independent of the
// standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal draw; consumes exactly two engine words.
  double normal();

  // Uniform integer in [0, n).
  int uniform_int(int n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ssbo
