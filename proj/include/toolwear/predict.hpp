#pragma once

#include <map>
#include <optional>
#include <vector>

#include "toolwear/dataset.hpp"
#include "toolwear/diagnostics.hpp"
#include "toolwear/types.hpp"

namespace toolwear {

enum class ExceedanceMode { LatentOnly, WithNoise };

struct Forecast {
  int tool_id = 0;
  VecXd x_grid;
  // Rows are posterior draws (all chains stacked), columns grid points.
  MatXd latent_draws;
  std::optional<MatXd> predictive_draws;  // latent plus observation noise
};

struct ExceedanceEstimate {
  double probability = 0.0;
  ExceedanceMode mode = ExceedanceMode::LatentOnly;
  double x_eval = 0.0;
  Index n_draws = 0;
};

// Per-draw sliding distance at which the latent line crosses s_crit;
// +infinity marks draws that never cross.
struct FailureTimeDistribution {
  int tool_id = 0;
  VecXd t_f_draws;
};

struct MseReport {
  std::map<int, double> per_tool;  // mean squared error over hidden points
  double total = 0.0;              // sum over tools
  Index n_points = 0;
};

// Posterior predictive curves for one tool.  Noise draws come from a stream
// derived from the sampler seed, so repeated calls reproduce byte-identical
// forecasts.
Forecast forecast(const PosteriorSamples& samples, int tool_id,
                  const VecXd& x_grid, bool include_noise);

// Fraction of draws whose forecast at x_eval exceeds s_crit.
ExceedanceEstimate exceedance_probability(const PosteriorSamples& samples,
                                          int tool_id, double x_eval,
                                          double s_crit, ExceedanceMode mode);

// T_f = (s_crit - c)/m for rising draws; 0 when the intercept already
// exceeds s_crit; +infinity when the draw never crosses.
FailureTimeDistribution failure_time(const PosteriorSamples& samples,
                                     int tool_id, double s_crit);

// Fraction of draws with T_f strictly below t.
double prob_failure_before(const FailureTimeDistribution& ftd, double t);

// Squared error of the posterior-mean latent prediction against hidden
// labels, averaged within each tool and summed across tools.  The default
// held-out set is every point with revealed == 0.
MseReport total_mse(const PosteriorSamples& samples,
                    const PopulationDataset& dataset);
MseReport total_mse(const PosteriorSamples& samples,
                    const PopulationDataset& dataset,
                    const std::vector<std::vector<std::uint8_t>>& heldout);

}  // namespace toolwear
