#include "toolwear/sampler.hpp"

#include <atomic>
#include <string>

namespace toolwear {

void SamplerConfig::validate() const {
  if (warmup < 1) throw ConfigError("warmup must be >= 1");
  if (draws < 1) throw ConfigError("draws must be >= 1");
  if (chains < 1) throw ConfigError("chains must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw ConfigError("target_accept must be in (0, 1)");
  if (max_tree_depth < 1) throw ConfigError("max_tree_depth must be >= 1");
  if (static_steps < 1) throw ConfigError("static_steps must be >= 1");
  if (!(init_jitter >= 0.0)) throw ConfigError("init_jitter must be >= 0");
}

std::pair<PosteriorSamples, Diagnostics> sample(const ModelSpec& spec,
                                                const SamplerConfig& config) {
  ModelTarget target{&spec};
  std::vector<RawChain> raw = run_chains(target, config);

  PosteriorSamples samples;
  samples.layout = spec.layout;
  samples.seed = config.seed;
  samples.chains.reserve(raw.size());
  samples.divergent.reserve(raw.size());
  for (const auto& ch : raw) {
    MatXd constrained(ch.draws.rows(), ch.draws.cols());
    for (Index d = 0; d < ch.draws.rows(); ++d)
      constrained.row(d) = constrain(spec, ch.draws.row(d).transpose()).transpose();
    samples.chains.push_back(std::move(constrained));
    samples.divergent.push_back(ch.divergent);
  }

  Diagnostics diag;
  bool enough = config.chains >= 2 && config.draws >= 4;
  if (enough) diag = diagnostics(samples);
  double acc = 0;
  diag.step_size.clear();
  for (const auto& ch : raw) {
    acc += ch.mean_accept;
    diag.step_size.push_back(ch.step_size);
    diag.max_depth_hits += ch.max_depth_hits;
  }
  diag.mean_accept = raw.empty() ? 0.0 : acc / static_cast<double>(raw.size());
  if (!enough) {
    diag.divergences = 0;
    for (const auto& dv : samples.divergent)
      for (auto f : dv) diag.divergences += (f != 0);
  }

  for (std::size_t c = 0; c < raw.size(); ++c) {
    if (raw[c].divergences == static_cast<Index>(config.draws))
      throw SamplingError("chain " + std::to_string(c) +
                              ": every draw diverged; posterior unusable",
                          diag);
  }
  return {std::move(samples), std::move(diag)};
}

}  // namespace toolwear
