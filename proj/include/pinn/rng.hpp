#pragma once

#include <cstdint>
#include <random>

namespace pinn {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// The library's only source of randomness.
///
/// A stream is a std::mt19937_64 engine seeded with
/// splitmix64(seed) ^ splitmix64(stream + 0x9e3779b97f4a7c15). Doubles are the
/// top 53 bits of a draw scaled by 2^-53. Both mt19937_64 and this mapping are
/// fully specified, so draws are identical across platforms and releases.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent child stream; does not advance this generator.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace pinn
