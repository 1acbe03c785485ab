#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace tabtrawl {

// Deterministic PRNG used everywhere randomness is needed. Self-contained so
// that streams are identical across platforms and standard libraries
// (std::shuffle / std::uniform_int_distribution are implementation-defined).
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
  uint64_t next_below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// FNV-1a over bytes; used to fold strings (table keys, task names) into seeds.
inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t mix_seed(uint64_t seed, std::string_view salt) {
  SplitMix64 rng(seed ^ fnv1a64(salt));
  return rng.next();
}

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  SplitMix64 rng(seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
  return rng.next();
}

template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// First k entries of a seeded permutation of [0, n). Taking a prefix of the
// same permutation guarantees that draws for smaller k are subsets of draws
// for larger k under the same seed.
inline std::vector<size_t> sample_prefix(size_t n, size_t k, uint64_t seed) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  SplitMix64 rng(seed);
  shuffle(idx, rng);
  if (k < n) idx.resize(k);
  return idx;
}

}  // namespace tabtrawl
