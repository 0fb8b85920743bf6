#include "toolwear/predict.hpp"

#include <cmath>
#include <limits>

#include "toolwear/errors.hpp"
#include "toolwear/rng.hpp"

namespace toolwear {

namespace {

struct LineCols {
  VecXd m, c, noise;
};

LineCols line_draws(const PosteriorSamples& samples, int tool_id) {
  Index im = samples.param_index(ParamRole::Slope, tool_id);
  Index ic = samples.param_index(ParamRole::Intercept, tool_id);
  Index is = samples.param_index(ParamRole::Noise, tool_id);
  if (im < 0 || ic < 0 || is < 0)
    throw ConfigError("tool " + std::to_string(tool_id) +
                      " not present in posterior layout");
  return {samples.stacked(im), samples.stacked(ic), samples.stacked(is)};
}

}  // namespace

Forecast forecast(const PosteriorSamples& samples, int tool_id,
                  const VecXd& x_grid, bool include_noise) {
  if (x_grid.size() == 0) throw ConfigError("forecast needs a nonempty grid");
  LineCols cols = line_draws(samples, tool_id);
  Index n = cols.m.size();

  Forecast f;
  f.tool_id = tool_id;
  f.x_grid = x_grid;
  f.latent_draws = cols.m * x_grid.transpose();
  f.latent_draws.colwise() += cols.c;

  if (include_noise) {
    Rng rng = Rng::stream(samples.seed, "predictive",
                          static_cast<std::uint64_t>(tool_id));
    MatXd noisy = f.latent_draws;
    for (Index d = 0; d < n; ++d)
      for (Index j = 0; j < x_grid.size(); ++j)
        noisy(d, j) += rng.cauchy(0.0, cols.noise[d]);
    f.predictive_draws = std::move(noisy);
  }
  return f;
}

ExceedanceEstimate exceedance_probability(const PosteriorSamples& samples,
                                          int tool_id, double x_eval,
                                          double s_crit, ExceedanceMode mode) {
  if (!(x_eval >= 0.0)) throw ConfigError("x_eval must be >= 0");
  VecXd grid(1);
  grid[0] = x_eval;
  Forecast f =
      forecast(samples, tool_id, grid, mode == ExceedanceMode::WithNoise);
  const MatXd& values = mode == ExceedanceMode::WithNoise
                            ? *f.predictive_draws
                            : f.latent_draws;
  Index n = values.rows();
  Index count = 0;
  for (Index d = 0; d < n; ++d) count += values(d, 0) > s_crit;

  ExceedanceEstimate e;
  e.probability = static_cast<double>(count) / static_cast<double>(n);
  e.mode = mode;
  e.x_eval = x_eval;
  e.n_draws = n;
  return e;
}

FailureTimeDistribution failure_time(const PosteriorSamples& samples,
                                     int tool_id, double s_crit) {
  LineCols cols = line_draws(samples, tool_id);
  Index n = cols.m.size();
  FailureTimeDistribution ftd;
  ftd.tool_id = tool_id;
  ftd.t_f_draws.resize(n);
  for (Index d = 0; d < n; ++d) {
    double m = cols.m[d], c = cols.c[d];
    if (c >= s_crit)
      ftd.t_f_draws[d] = 0.0;
    else if (m > 0.0)
      ftd.t_f_draws[d] = (s_crit - c) / m;
    else
      ftd.t_f_draws[d] = std::numeric_limits<double>::infinity();
  }
  return ftd;
}

double prob_failure_before(const FailureTimeDistribution& ftd, double t) {
  if (!(t >= 0.0)) throw ConfigError("horizon must be >= 0");
  Index n = ftd.t_f_draws.size();
  if (n == 0) throw ConfigError("empty failure-time distribution");
  Index count = 0;
  for (Index d = 0; d < n; ++d) count += ftd.t_f_draws[d] < t;
  return static_cast<double>(count) / static_cast<double>(n);
}

MseReport total_mse(const PosteriorSamples& samples,
                    const PopulationDataset& dataset) {
  std::vector<std::vector<std::uint8_t>> heldout;
  heldout.reserve(dataset.tools.size());
  for (const auto& t : dataset.tools) {
    std::vector<std::uint8_t> mask(t.revealed.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = !t.revealed[i];
    heldout.push_back(std::move(mask));
  }
  return total_mse(samples, dataset, heldout);
}

MseReport total_mse(const PosteriorSamples& samples,
                    const PopulationDataset& dataset,
                    const std::vector<std::vector<std::uint8_t>>& heldout) {
  if (heldout.size() != dataset.tools.size())
    throw ConfigError("held-out mask does not match dataset shape");
  MseReport report;
  for (std::size_t k = 0; k < dataset.tools.size(); ++k) {
    const ToolSeries& t = dataset.tools[k];
    if (heldout[k].size() != static_cast<std::size_t>(t.size()))
      throw ConfigError("held-out mask does not match dataset shape");
    LineCols cols = line_draws(samples, t.tool_id);
    double m_mean = cols.m.mean(), c_mean = cols.c.mean();
    double acc = 0.0;
    Index n = 0;
    for (Index i = 0; i < t.size(); ++i) {
      if (!heldout[k][static_cast<std::size_t>(i)]) continue;
      double err = m_mean * t.x[i] + c_mean - t.y[i];
      acc += err * err;
      ++n;
    }
    if (n == 0) continue;
    report.per_tool[t.tool_id] = acc / static_cast<double>(n);
    report.total += acc / static_cast<double>(n);
    report.n_points += n;
  }
  if (report.n_points == 0)
    throw ConfigError("no held-out points to score");
  return report;
}

}  // namespace toolwear
