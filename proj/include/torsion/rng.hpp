#pragma once

#include <array>
#include <cstdint>

namespace torsion {

// xoshiro256++ seeded through splitmix64. Gaussian variates come from the
// Marsaglia polar transform of the uniform output (pairs, one cached), so a
// given seed always yields the same stream on a given platform.
class Rng {
 public:
  static constexpr const char* algorithm_tag = "xoshiro256++/polar-v1";

  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();  // [0, 1), 53-bit resolution
  double normal();   // standard normal

  // Independent stream seed for ensemble member / worker `index`.
  static std::uint64_t derive_stream(std::uint64_t master,
                                     std::uint64_t index);

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace torsion
