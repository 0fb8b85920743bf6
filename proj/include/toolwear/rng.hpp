#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace toolwear {

// 64-bit FNV-1a over a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t h = 0xcbf29ce484222325ull);

// Key for a named substream.  Streams derived from distinct (seed, tag, a, b)
// tuples are statistically independent and do not depend on creation order,
// so adding a consumer never perturbs the draws of existing ones.
std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                         std::uint64_t a = 0, std::uint64_t b = 0);

// SplitMix64 generator.  Small state, full avalanche per step; quality is
// ample for MC noise and the state is trivially snapshottable.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : state_(key) {}

  static Rng stream(std::uint64_t seed, std::string_view tag,
                    std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(derive_key(seed, tag, a, b));
  }

  std::uint64_t next_u64();

  double uniform01();  // [0, 1)
  double normal();     // standard normal, Box-Muller
  double cauchy(double location, double scale);
  int uniform_int(int n);  // {0, ..., n-1}, n > 0

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace toolwear
