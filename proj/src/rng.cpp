#include "pinn/rng.hpp"

namespace pinn {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      engine_(splitmix64(seed) ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ (stream_ * 0xd1b54a32d192ed03ULL)), stream);
}

}  // namespace pinn
