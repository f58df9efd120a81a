#pragma once

#include <cstdint>

namespace mlcs {

// xoshiro256** seeded through splitmix64. Output is identical on every
// platform, unlike the std distributions, so all sampling goes through here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform integer on [0, bound), bound > 0. Lemire rejection.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via the Marsaglia polar method.
  double normal();
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Independent child seed for stream id under a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mlcs
