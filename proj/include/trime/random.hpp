#pragma once

#include <cstdint>
#include <random>

namespace trime {

// Seeded 64-bit generator with a fixed uniform mapping, so sequences are the
// same on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trime
