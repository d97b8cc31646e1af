#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace treatval {

// Seeded random stream. Wraps std::mt19937_64 (whose output sequence is
// fixed by the standard) and supplies its own uniform/normal/shuffle so that
// results do not depend on implementation-defined std::*_distribution
// internals. Every randomized operation in the library is a pure function of
// (inputs, stream seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform real in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased via rejection. n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  // Fair coin.
  int bernoulli_half() { return static_cast<int>(next_u64() >> 63); }

  // Standard normal via the Marsaglia polar method (pairs cached).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Fisher-Yates with our own index draws.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives an independent child seed from a root seed and up to three tags
// (SplitMix64-style mixing). Bootstrap replicate b always gets
// derive_seed(seed, tag, b, attempt) regardless of which worker runs it,
// which is what makes results worker-count invariant.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag1,
                          std::uint64_t tag2 = 0, std::uint64_t tag3 = 0);

inline Rng derive_stream(std::uint64_t seed, std::uint64_t tag1,
                         std::uint64_t tag2 = 0, std::uint64_t tag3 = 0) {
  return Rng(derive_seed(seed, tag1, tag2, tag3));
}

// Stream tags, one per consumer so no two consumers ever share a stream.
namespace stream_tag {
inline constexpr std::uint64_t folds = 0xF01D;
inline constexpr std::uint64_t resample = 0x5A3B1E;
inline constexpr std::uint64_t observed = 0x0B5E;
inline constexpr std::uint64_t replicate = 0xB007;
inline constexpr std::uint64_t generate = 0xD6B;
inline constexpr std::uint64_t mc_chunk = 0x3C4C;
}  // namespace stream_tag

}  // namespace treatval
