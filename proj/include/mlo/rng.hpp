// Seeded random number generation with a fixed, documented draw protocol.
//
// Every random quantity in the library is produced by an Rng instance owned
// exclusively by one logical thread of execution (one chain, one data
// generator).  Draw costs are fixed so that streams are reproducible:
//   uniform()   consumes 1 raw 64-bit word
//   normal()    consumes 2 raw words (Box-Muller, cosine branch only)
//   below(n)    consumes 1 raw word
// Seeds for independent streams are derived with derive_seed(), a splitmix64
// fold, so no two streams ever share state.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mlo {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds any number of integer tags into a base seed.  Used for replication
// and arm seeds: derive_seed(base, rep, arm) and friends.
template <class... Tags>
std::uint64_t derive_seed(std::uint64_t base, Tags... tags) {
  std::uint64_t s = splitmix64(base);
  ((s = splitmix64(s ^ (static_cast<std::uint64_t>(tags) + 0x9e3779b97f4a7c15ULL))), ...);
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on the open interval (0, 1); never returns 0 or 1, so log(u)
  // stays finite.
  double uniform() {
    return (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.  The sine twin is discarded to keep the
  // per-call word consumption constant.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Uniform integer in [0, n).  Lemire multiply-shift; the O(n / 2^64)
  // nonuniformity is far below anything observable here.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(raw()) * n) >> 64);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::mt19937_64 gen_;
};

}  // namespace mlo
