#pragma once

#include <array>
#include <variant>

namespace toolwear {

// Hyperpriors of the heavy-tailed configuration: slope population mean is
// Gamma (shape/scale convention), group sds are half-Cauchy, intercept
// population mean is Normal.  Per-tool Cauchy noise scales get their own
// half-Cauchy scale.
struct CauchyHierPriors {
  double gamma_shape = 1.0;        // Gamma shape k for mu_m
  double gamma_scale = 1.0;        // Gamma scale theta for mu_m
  double s_sigma_m = 25.0;         // half-Cauchy scale for sigma_m
  double mu_c_mean = 0.0;          // Normal location for mu_c
  double mu_c_sd = 1.0;            // Normal sd for mu_c
  double s_sigma_c = 25.0;         // half-Cauchy scale for sigma_c
  double gamma_noise_scale = 25.0; // half-Cauchy scale for each gamma_k

  void validate() const;
};

// Normal / inverse-gamma configuration over the (intercept, slope) weight
// vector: population means are Normal, group sds are inverse-gamma, per-tool
// noise sds are half-Cauchy.
struct GaussianHierPriors {
  std::array<double, 2> m_alpha{0.0, 0.0};  // prior mean of (mu_c, mu_m)
  std::array<double, 2> s_alpha{1.0, 1.0};  // prior sd of (mu_c, mu_m)
  double a = 2.0;                           // inverse-gamma shape for sigma_c, sigma_m
  double b = 1.0;                           // inverse-gamma scale
  double noise_scale = 25.0;                // half-Cauchy scale for each sigma_k

  void validate() const;
};

using PriorConfig = std::variant<CauchyHierPriors, GaussianHierPriors>;

void validate_priors(const PriorConfig& priors);

}  // namespace toolwear
