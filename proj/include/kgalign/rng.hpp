#ifndef KGALIGN_RNG_HPP
#define KGALIGN_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace kgalign {

// 64-bit FNV-1a, used for stable sub-seeding and for NLI fixture premise keys.
inline uint64_t fnv1a64(const std::string& s, uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Seedable generator threaded explicitly through everything that samples.
// Floats are derived from raw mt19937_64 output so streams are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  Rng(uint64_t seed, const std::string& stream) : gen_(fnv1a64(stream, seed)) {}

  uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform in {0, ..., n-1}
  int uniform_int(int n) {
    if (n <= 0) return 0;
    return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = next_u64() % i;
      std::swap(v[i - 1], v[j]);
    }
  }

  Rng fork(const std::string& stream) { return Rng(next_u64(), stream); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kgalign

#endif
