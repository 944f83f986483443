#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "surq/special_functions.hpp"

namespace surq {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent, reproducible stream per (master seed, purpose tag).
inline std::uint64_t derive_stream(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ h);
}

// Deterministic draws independent of the standard library's distribution
// implementations: uniforms straight from the generator bits, normals by
// inverting the CDF.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // strictly inside (0, 1)
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return norm_quantile(uniform()); }
  std::uint64_t raw() { return gen_(); }

  int below(int n) {  // uniform on {0, ..., n-1}
    return static_cast<int>((static_cast<unsigned __int128>(gen_()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace surq
