#include "toolwear/priors.hpp"

#include "toolwear/errors.hpp"

namespace toolwear {

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0))
    throw ConfigError(std::string(field) + " must be > 0");
}

}  // namespace

void CauchyHierPriors::validate() const {
  require_positive(gamma_shape, "gamma_shape");
  require_positive(gamma_scale, "gamma_scale");
  require_positive(s_sigma_m, "s_sigma_m");
  require_positive(mu_c_sd, "mu_c_sd");
  require_positive(s_sigma_c, "s_sigma_c");
  require_positive(gamma_noise_scale, "gamma_noise_scale");
}

void GaussianHierPriors::validate() const {
  require_positive(s_alpha[0], "s_alpha[0]");
  require_positive(s_alpha[1], "s_alpha[1]");
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(noise_scale, "noise_scale");
}

void validate_priors(const PriorConfig& priors) {
  std::visit([](const auto& p) { p.validate(); }, priors);
}

}  // namespace toolwear
