#pragma once

#include <cstdint>
#include <vector>

#include "toolwear/dataset.hpp"
#include "toolwear/types.hpp"

namespace toolwear {

struct SyntheticConfig {
  int n_tools = 7;
  int n_steps = 12;
  double step_km = 6.02;
  double true_mu_m = 0.015;
  double true_sigma_m = 0.004;
  double true_mu_c = 0.3;
  double true_sigma_c = 0.05;
  double noise_gamma = 0.02;  // Cauchy noise scale; 0 gives exact lines
  double noise_bound = 5.0;   // resample noise outside +-bound
  std::uint64_t seed = 0;

  void validate() const;
};

// The line parameters actually drawn for each tool.
struct GroundTruth {
  std::vector<int> tool_ids;
  VecXd m, c;
};

// Population of wear histories on a uniform grid x_i = i * step_km, all
// labels revealed.  Slopes are redrawn until positive; heavy-tail noise is
// resampled into +-noise_bound.  Deterministic by seed; parameter and noise
// streams are independent, so changing n_steps never changes the lines.
PopulationDataset generate_synthetic(const SyntheticConfig& config,
                                     GroundTruth* truth = nullptr);

}  // namespace toolwear
