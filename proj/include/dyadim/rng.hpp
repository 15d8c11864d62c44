#ifndef DYADIM_RNG_HPP
#define DYADIM_RNG_HPP

#include <cstdint>
#include <random>

namespace dyadim {

// SplitMix64 finalizer. Used both as a seed scrambler and to derive
// independent substream seeds from (master seed, stream index).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

// Deterministic uniform generator. mt19937_64 output is fully specified by
// the standard and the double conversion below avoids the
// implementation-defined std::uniform_real_distribution, so identical seeds
// give identical streams on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dyadim

#endif
