#include "toolwear/synthetic.hpp"

#include <cmath>
#include <string>

#include "toolwear/errors.hpp"
#include "toolwear/rng.hpp"

namespace toolwear {

void SyntheticConfig::validate() const {
  if (n_tools < 1) throw ConfigError("n_tools must be >= 1");
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (!(step_km > 0.0)) throw ConfigError("step_km must be > 0");
  if (!(true_sigma_m >= 0.0)) throw ConfigError("true_sigma_m must be >= 0");
  if (!(true_sigma_c >= 0.0)) throw ConfigError("true_sigma_c must be >= 0");
  if (!(noise_gamma >= 0.0)) throw ConfigError("noise_gamma must be >= 0");
  if (!(noise_bound > 0.0)) throw ConfigError("noise_bound must be > 0");
}

PopulationDataset generate_synthetic(const SyntheticConfig& config,
                                     GroundTruth* truth) {
  config.validate();
  PopulationDataset ds;
  ds.step_km = config.step_km;
  if (truth) {
    truth->tool_ids.clear();
    truth->m.resize(config.n_tools);
    truth->c.resize(config.n_tools);
  }

  for (int k = 0; k < config.n_tools; ++k) {
    Rng param_rng = Rng::stream(config.seed, "truth",
                                static_cast<std::uint64_t>(k));
    double m = 0.0;
    bool ok = false;
    for (int tries = 0; tries < 100; ++tries) {
      m = config.true_mu_m + config.true_sigma_m * param_rng.normal();
      if (m > 0.0) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw ConfigError("tool " + std::to_string(k + 1) +
                        ": no positive slope after 100 draws; check true_mu_m");
    double c = config.true_mu_c + config.true_sigma_c * param_rng.normal();

    ToolSeries t;
    t.tool_id = k + 1;
    t.x.resize(config.n_steps);
    t.y.resize(config.n_steps);
    t.revealed.assign(static_cast<std::size_t>(config.n_steps), 1);
    Rng noise_rng = Rng::stream(config.seed, "noise",
                                static_cast<std::uint64_t>(k));
    for (int i = 0; i < config.n_steps; ++i) {
      double x = static_cast<double>(i + 1) * config.step_km;
      double eps = 0.0;
      for (int tries = 0; tries < 1000; ++tries) {
        eps = noise_rng.cauchy(0.0, config.noise_gamma);
        if (std::abs(eps) <= config.noise_bound) break;
      }
      if (std::abs(eps) > config.noise_bound)
        eps = eps > 0 ? config.noise_bound : -config.noise_bound;
      t.x[i] = x;
      t.y[i] = m * x + c + eps;
    }
    ds.tools.push_back(std::move(t));
    if (truth) {
      truth->tool_ids.push_back(k + 1);
      truth->m[k] = m;
      truth->c[k] = c;
    }
  }
  ds.validate();
  return ds;
}

}  // namespace toolwear
