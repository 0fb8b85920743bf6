#pragma once

#include <cmath>
#include <limits>

// Log densities and their derivatives with respect to the variate.  All are
// plain free functions templated on the scalar so they compose with Eigen
// expressions and finite-difference checks alike.  Densities outside the
// support return -infinity; derivative functions assume the variate is
// inside the support.

namespace toolwear {

inline constexpr double kLogPi = 1.1447298858494001741;
inline constexpr double kLogTwo = 0.6931471805599453094;
inline constexpr double kHalfLogTwoPi = 0.9189385332046727418;

template <typename S>
S std_normal_lpdf(S z) {
  return S(-0.5) * z * z - S(kHalfLogTwoPi);
}

template <typename S>
S std_normal_dlpdf(S z) {
  return -z;
}

template <typename S>
S normal_lpdf(S x, S mu, S sigma) {
  using std::log;
  S z = (x - mu) / sigma;
  return S(-0.5) * z * z - log(sigma) - S(kHalfLogTwoPi);
}

template <typename S>
S normal_dlpdf(S x, S mu, S sigma) {
  return -(x - mu) / (sigma * sigma);
}

template <typename S>
S cauchy_lpdf(S x, S location, S scale) {
  using std::log;
  S r = x - location;
  return -S(kLogPi) + log(scale) - log(scale * scale + r * r);
}

template <typename S>
S cauchy_dlpdf(S x, S location, S scale) {
  S r = x - location;
  return S(-2) * r / (scale * scale + r * r);
}

// Half-Cauchy on v > 0: twice the central Cauchy density.
template <typename S>
S half_cauchy_lpdf(S v, S scale) {
  using std::log;
  if (!(v > S(0))) return -std::numeric_limits<S>::infinity();
  return S(kLogTwo) - S(kLogPi) + log(scale) - log(scale * scale + v * v);
}

template <typename S>
S half_cauchy_dlpdf(S v, S scale) {
  return S(-2) * v / (scale * scale + v * v);
}

// Gamma in shape/scale form: mean = shape * scale.
template <typename S>
S gamma_lpdf(S v, S shape, S scale) {
  using std::log;
  if (!(v > S(0))) return -std::numeric_limits<S>::infinity();
  return -S(std::lgamma(double(shape))) - shape * log(scale) +
         (shape - S(1)) * log(v) - v / scale;
}

template <typename S>
S gamma_dlpdf(S v, S shape, S scale) {
  return (shape - S(1)) / v - S(1) / scale;
}

// Inverse-gamma with shape a, scale b: mean = b / (a - 1) for a > 1.
template <typename S>
S inv_gamma_lpdf(S v, S shape, S scale) {
  using std::log;
  if (!(v > S(0))) return -std::numeric_limits<S>::infinity();
  return shape * log(scale) - S(std::lgamma(double(shape))) -
         (shape + S(1)) * log(v) - scale / v;
}

template <typename S>
S inv_gamma_dlpdf(S v, S shape, S scale) {
  return -(shape + S(1)) / v + scale / (v * v);
}

}  // namespace toolwear
