#include "toolwear/rng.hpp"

#include <cmath>
#include <numbers>

namespace toolwear {

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                         std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = fnv1a64(tag.data(), tag.size());
  h = mix64(h ^ seed);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  return mix64(state_);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(t);
  has_cached_ = true;
  return r * std::cos(t);
}

double Rng::cauchy(double location, double scale) {
  double u = uniform01();
  return location + scale * std::tan(std::numbers::pi * (u - 0.5));
}

int Rng::uniform_int(int n) {
  return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
}

}  // namespace toolwear
