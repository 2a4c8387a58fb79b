#pragma once

// Pinned, platform-independent randomness. Every stochastic choice in the
// library flows through Xoshiro256ss seeded via splitmix64, so a seed fully
// determines a trajectory on any platform. Do not substitute std::mt19937 or
// std::uniform_*_distribution anywhere: the standard distributions are
// implementation-defined and would break cross-platform reproducibility.
//
// Stream-splitting rule: a run seed is expanded into independent substreams
// with xoshiro's jump() (2^128 steps apart). Substream indices are fixed:
//   0 = initial state draw, 1 = partition/selection draws,
//   2 = acceptance noise, 3 = tie-breaks.

#include <cstdint>
#include <string_view>
#include <vector>

namespace hopsat {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 step (Steele, Lea & Flood): state in, scrambled output out.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Folds extra words into a master seed, one splitmix round per word. Used to
// derive per-instance and per-run seeds; documented in the README.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

// FNV-1a, used to key benchmark runs by instance/solver name so that results
// do not depend on the order instances are listed in.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// xoshiro256** by Blackman & Vigna (public-domain reference algorithm).
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    for (int i = 0; i < 4; ++i) state_[i] = splitmix64(seed + std::uint64_t(i) * kGolden);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Advances 2^128 steps; partitions one seed into non-overlapping substreams.
  void jump() {
    static constexpr std::uint64_t kJump[4] = {0x180ec6d33cfd0abaull, 0xd5a61266f0c9392cull,
                                               0xa9582618e03fc9aaull, 0x39abdc4529b1661cull};
    std::uint64_t s[4] = {0, 0, 0, 0};
    for (std::uint64_t mask : kJump)
      for (int b = 0; b < 64; ++b) {
        if (mask & (std::uint64_t(1) << b))
          for (int i = 0; i < 4; ++i) s[i] ^= state_[i];
        next();
      }
    for (int i = 0; i < 4; ++i) state_[i] = s[i];
  }

  // Substream k of a run seed (see stream indices above).
  static Xoshiro256ss substream(std::uint64_t seed, int k) {
    Xoshiro256ss r(seed);
    for (int i = 0; i < k; ++i) r.jump();
    return r;
  }

  // Uniform double in [0, 1), 53 significant bits.
  double u01() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [-h, h).
  double uniform_pm(double h) { return h * (2.0 * u01() - 1.0); }

  bool coin(double p) { return u01() < p; }

  // Unbiased integer in [0, n), Lemire multiply-with-rejection.
  std::uint64_t bounded(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(i)]);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Named substream indices (keep stable: part of the determinism contract).
enum Stream : int { kStreamInit = 0, kStreamPartition = 1, kStreamNoise = 2, kStreamTieBreak = 3 };

}  // namespace hopsat
