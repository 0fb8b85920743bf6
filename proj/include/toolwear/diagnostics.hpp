#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toolwear/model.hpp"
#include "toolwear/types.hpp"

namespace toolwear {

// Post-warmup draws in constrained space, one matrix (draws x params) per
// chain.  Immutable after return from the sampler.
struct PosteriorSamples {
  std::vector<ParamInfo> layout;
  std::vector<MatXd> chains;
  std::vector<std::vector<std::uint8_t>> divergent;  // per chain, per draw
  std::uint64_t seed = 0;

  Index n_chains() const { return static_cast<Index>(chains.size()); }
  Index n_draws() const { return chains.empty() ? 0 : chains[0].rows(); }
  Index n_params() const { return static_cast<Index>(layout.size()); }
  Index total_draws() const { return n_chains() * n_draws(); }

  Index param_index(const std::string& name) const;  // -1 if absent
  Index param_index(ParamRole role, int tool) const;
  // All chains' draws of one parameter, concatenated chain-major.
  VecXd stacked(Index param) const;
};

struct Diagnostics {
  double mean_accept = 0.0;
  Index divergences = 0;
  VecXd rhat;
  VecXd ess_bulk;
  // Constant-everywhere parameters get rhat 1 and ess = total draws, plus
  // this flag; split-R-hat is undefined for them.
  std::vector<std::uint8_t> degenerate;
  Index max_depth_hits = 0;
  std::vector<double> step_size;  // per chain, post-adaptation

  double max_rhat() const;
};

// Split-R-hat over one parameter's per-chain draw vectors.  Chains are split
// in half; between/within variance ratio per the usual estimator.
double split_rhat(const std::vector<VecXd>& chains, bool* degenerate = nullptr);

// Rank-normalized bulk effective sample size with Geyer's initial monotone
// sequence truncation, on split chains.
double bulk_ess(const std::vector<VecXd>& chains);

// R-hat and bulk ESS per parameter.  Requires >= 2 chains and >= 4 draws per
// chain.  mean_accept / step sizes are filled by the sampler, not here.
Diagnostics diagnostics(const PosteriorSamples& samples);

}  // namespace toolwear
