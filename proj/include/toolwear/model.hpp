#pragma once

#include <string>
#include <vector>

#include "toolwear/dataset.hpp"
#include "toolwear/priors.hpp"
#include "toolwear/types.hpp"

namespace toolwear {

enum class Pooling { Complete, None, Partial };
enum class Likelihood { Gaussian, Cauchy };

enum class ParamRole {
  Slope,
  Intercept,
  Noise,
  SlopeMean,
  SlopeSd,
  InterceptMean,
  InterceptSd,
};

struct ParamInfo {
  std::string name;
  ParamRole role{};
  int tool = -1;          // tool id; -1 for shared and population entries
  bool positive = false;  // exp-transformed in unconstrained space
  // Group coordinate stored as a standardized offset in unconstrained space:
  // m_k = mu_m + sigma_m * m~_k.  Keeps the funnel out of the sampler's way;
  // constrain() still reports the actual m_k.
  bool offset = false;
};

// Hyperparameter values substituted when pooling omits the hyper level:
// prior means where defined, otherwise the prior median (half-Cauchy) or
// mode (inverse-gamma with shape <= 1).
struct FixedHypers {
  double mu_m = 0.0;
  double sigma_m = 1.0;
  double mu_c = 0.0;
  double sigma_c = 1.0;
};

// Immutable description of one regression model over one dataset.  All
// evaluation functions are pure; concurrent use is safe.
struct ModelSpec {
  Pooling pooling{};
  Likelihood likelihood{};
  PriorConfig priors;
  PopulationDataset data;
  std::vector<ParamInfo> layout;
  FixedHypers fixed;
  Index i_mu_m = -1, i_sigma_m = -1, i_mu_c = -1, i_sigma_c = -1;
  // Revealed observations per tool, extracted once.
  std::vector<VecXd> rx, ry;

  Index size() const { return static_cast<Index>(layout.size()); }
  // Index of (role, tool), falling back to the shared entry under complete
  // pooling; -1 when absent.
  Index param_index(ParamRole role, int tool) const;
  double noise_prior_scale() const;
};

// Layout: slopes, intercepts, noise scales (blocked per tool), then for
// partial pooling the hypers mu_m, sigma_m, mu_c, sigma_c.
// Sizes: Partial 3K+4, None 3K, Complete 3.
ModelSpec build_model(Pooling pooling, Likelihood likelihood,
                      const PriorConfig& priors, PopulationDataset data);

// Bijection between unconstrained sampling space and constrained parameters.
// Positive-tagged entries map by exp; offsets recenter by their hypers;
// everything else is identity.  unconstrain(constrain(u)) == u.
VecXd constrain(const ModelSpec& spec, const VecXd& u);
VecXd unconstrain(const ModelSpec& spec, const VecXd& theta);

// Log joint density over revealed observations plus priors plus the log
// Jacobian of the constraining transform, as a function of unconstrained u.
double log_posterior(const ModelSpec& spec, const VecXd& u);
VecXd grad_log_posterior(const ModelSpec& spec, const VecXd& u);
// Fused evaluation; grad may be null.
double log_posterior_grad(const ModelSpec& spec, const VecXd& u, VecXd* grad);

const char* to_string(Pooling p);
const char* to_string(Likelihood l);
Pooling pooling_from_string(const std::string& s);
Likelihood likelihood_from_string(const std::string& s);

}  // namespace toolwear
