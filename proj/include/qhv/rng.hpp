#pragma once

#include <cstddef>
#include <cstdint>

namespace qhv {

// splitmix64 stream. Used instead of <random> distributions so that
// identical seeds give identical trials on every platform/toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  bool coin() { return (next() & 1ull) != 0; }

  // Uniform in (-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::uint64_t state_;
};

// Decorrelated per-stream seed derivation (query index, trial index, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  Rng r(base ^ (0xd1b54a32d192ed03ull * (stream + 1)));
  r.next();
  return r.next();
}

}  // namespace qhv
