#include "toolwear/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "toolwear/errors.hpp"

namespace toolwear {

Index PosteriorSamples::param_index(const std::string& name) const {
  for (Index i = 0; i < n_params(); ++i)
    if (layout[static_cast<std::size_t>(i)].name == name) return i;
  return -1;
}

Index PosteriorSamples::param_index(ParamRole role, int tool) const {
  Index shared = -1;
  for (Index i = 0; i < n_params(); ++i) {
    const ParamInfo& p = layout[static_cast<std::size_t>(i)];
    if (p.role != role) continue;
    if (p.tool == tool) return i;
    if (p.tool == -1) shared = i;
  }
  return shared;
}

VecXd PosteriorSamples::stacked(Index param) const {
  VecXd out(total_draws());
  Index at = 0;
  for (const auto& ch : chains) {
    out.segment(at, ch.rows()) = ch.col(param);
    at += ch.rows();
  }
  return out;
}

double Diagnostics::max_rhat() const {
  double m = 1.0;
  for (Index i = 0; i < rhat.size(); ++i) m = std::max(m, rhat[i]);
  return m;
}

namespace {

// Half-splits of every chain: the front and back halves count as separate
// sequences so within-chain drift shows up as between-sequence variance.
std::vector<VecXd> split_halves(const std::vector<VecXd>& chains) {
  std::vector<VecXd> seqs;
  seqs.reserve(2 * chains.size());
  for (const auto& ch : chains) {
    Index n = ch.size() / 2;
    if (n < 2) throw ConfigError("split diagnostics need at least 4 draws per chain");
    seqs.push_back(ch.head(n));
    seqs.push_back(ch.tail(n));
  }
  return seqs;
}

double seq_mean(const VecXd& v) { return v.mean(); }

double seq_var(const VecXd& v) {
  double mu = v.mean();
  return (v.array() - mu).square().sum() / static_cast<double>(v.size() - 1);
}

// Acklam's rational approximation to the standard normal quantile, followed
// by one Halley refinement against erfc.
double inv_phi(double p) {
  static const double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425, p_high = 1.0 - p_low;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  } else if (p <= p_high) {
    double q = p - 0.5, r = q * q;
    x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) *
        q /
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  }
  double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double split_rhat(const std::vector<VecXd>& chains, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (chains.size() < 2) throw ConfigError("split R-hat needs at least 2 chains");
  auto seqs = split_halves(chains);
  const double J = static_cast<double>(seqs.size());
  const double n = static_cast<double>(seqs[0].size());

  double grand = 0.0, W = 0.0;
  std::vector<double> means(seqs.size());
  for (std::size_t j = 0; j < seqs.size(); ++j) {
    means[j] = seq_mean(seqs[j]);
    grand += means[j];
    W += seq_var(seqs[j]);
  }
  grand /= J;
  W /= J;
  double between = 0.0;
  for (double m : means) between += (m - grand) * (m - grand);
  double B = n * between / (J - 1.0);

  if (W <= 0.0) {
    if (B <= 0.0) {
      if (degenerate) *degenerate = true;
      return 1.0;
    }
    return std::numeric_limits<double>::infinity();
  }
  double vhat = (n - 1.0) / n * W + B / n;
  return std::sqrt(vhat / W);
}

double bulk_ess(const std::vector<VecXd>& chains) {
  if (chains.size() < 2) throw ConfigError("bulk ESS needs at least 2 chains");
  auto seqs = split_halves(chains);
  const std::size_t J = seqs.size();
  const Index n = seqs[0].size();
  const double S = static_cast<double>(J) * static_cast<double>(n);

  // Rank-normalize: average ranks for ties, then Blom offsets into the
  // standard normal quantile.
  struct Item {
    double v;
    std::size_t seq;
    Index idx;
  };
  std::vector<Item> items;
  items.reserve(static_cast<std::size_t>(S));
  for (std::size_t j = 0; j < J; ++j)
    for (Index i = 0; i < n; ++i) items.push_back({seqs[j][i], j, i});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.v < b.v; });
  if (items.front().v == items.back().v) return S;  // constant everywhere

  std::vector<VecXd> z(J, VecXd(n));
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t runlast = i;
    while (runlast + 1 < items.size() && items[runlast + 1].v == items[i].v)
      ++runlast;
    double avg_rank = 0.5 * static_cast<double>(i + runlast) + 1.0;
    double zz = inv_phi((avg_rank - 0.375) / (S + 0.25));
    for (std::size_t k = i; k <= runlast; ++k)
      z[items[k].seq][items[k].idx] = zz;
    i = runlast + 1;
  }

  // Centered sequences and lagged autocovariances (biased, /n).
  std::vector<VecXd> zc(J);
  std::vector<double> means(J);
  double mean_var = 0.0, grand = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    means[j] = z[j].mean();
    zc[j] = z[j].array() - means[j];
    mean_var += zc[j].squaredNorm() / static_cast<double>(n - 1);
    grand += means[j];
  }
  mean_var /= static_cast<double>(J);
  grand /= static_cast<double>(J);
  double var_means = 0.0;
  for (std::size_t j = 0; j < J; ++j)
    var_means += (means[j] - grand) * (means[j] - grand);
  var_means /= static_cast<double>(J - 1);
  double var_plus =
      mean_var * static_cast<double>(n - 1) / static_cast<double>(n) + var_means;
  if (var_plus <= 0.0) return S;

  auto mean_acov = [&](Index t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j)
      acc += zc[j].head(n - t).dot(zc[j].tail(n - t)) / static_cast<double>(n);
    return acc / static_cast<double>(J);
  };

  // Geyer initial positive sequence over paired correlations, then the
  // monotone correction.
  std::vector<double> rho(static_cast<std::size_t>(n + 2), 0.0);
  rho[0] = 1.0;
  double rho_even = 1.0;
  double rho_odd = 1.0 - (mean_var - mean_acov(1)) / var_plus;
  rho[1] = rho_odd;
  Index s = 1;
  while (s < n - 4 && rho_even + rho_odd > 0.0) {
    rho_even = 1.0 - (mean_var - mean_acov(s + 1)) / var_plus;
    rho_odd = 1.0 - (mean_var - mean_acov(s + 2)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[static_cast<std::size_t>(s + 1)] = rho_even;
      rho[static_cast<std::size_t>(s + 2)] = rho_odd;
    }
    s += 2;
  }
  Index max_s = s;
  if (rho_even > 0.0) rho[static_cast<std::size_t>(max_s + 1)] = rho_even;

  for (Index t = 1; t + 3 <= max_s; t += 2) {
    if (rho[static_cast<std::size_t>(t + 1)] + rho[static_cast<std::size_t>(t + 2)] >
        rho[static_cast<std::size_t>(t - 1)] + rho[static_cast<std::size_t>(t)]) {
      double v = 0.5 * (rho[static_cast<std::size_t>(t - 1)] +
                        rho[static_cast<std::size_t>(t)]);
      rho[static_cast<std::size_t>(t + 1)] = v;
      rho[static_cast<std::size_t>(t + 2)] = v;
    }
  }

  double tau = -1.0;
  for (Index t = 0; t < max_s; ++t) tau += 2.0 * rho[static_cast<std::size_t>(t)];
  tau += rho[static_cast<std::size_t>(max_s + 1)];
  tau = std::max(tau, 1.0 / std::log10(S));
  return S / tau;
}

Diagnostics diagnostics(const PosteriorSamples& samples) {
  if (samples.n_chains() < 2)
    throw ConfigError("diagnostics need at least 2 chains");
  if (samples.n_draws() < 4)
    throw ConfigError("diagnostics need at least 4 draws per chain");

  Diagnostics d;
  Index P = samples.n_params();
  d.rhat.resize(P);
  d.ess_bulk.resize(P);
  d.degenerate.assign(static_cast<std::size_t>(P), 0);

  std::vector<VecXd> per_chain(samples.chains.size());
  for (Index p = 0; p < P; ++p) {
    for (std::size_t c = 0; c < samples.chains.size(); ++c)
      per_chain[c] = samples.chains[c].col(p);
    bool degen = false;
    d.rhat[p] = split_rhat(per_chain, &degen);
    d.ess_bulk[p] = bulk_ess(per_chain);
    d.degenerate[static_cast<std::size_t>(p)] = degen ? 1 : 0;
  }
  for (const auto& dv : samples.divergent)
    for (auto f : dv) d.divergences += (f != 0);
  return d;
}

}  // namespace toolwear
