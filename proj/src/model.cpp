#include "toolwear/model.hpp"

#include <cmath>
#include <string>

#include "toolwear/distributions.hpp"
#include "toolwear/errors.hpp"

namespace toolwear {

const char* to_string(Pooling p) {
  switch (p) {
    case Pooling::Complete: return "complete";
    case Pooling::None: return "none";
    case Pooling::Partial: return "partial";
  }
  return "?";
}

const char* to_string(Likelihood l) {
  return l == Likelihood::Gaussian ? "gaussian" : "cauchy";
}

Pooling pooling_from_string(const std::string& s) {
  if (s == "complete") return Pooling::Complete;
  if (s == "none") return Pooling::None;
  if (s == "partial") return Pooling::Partial;
  throw ConfigError("unknown pooling '" + s + "' (complete|none|partial)");
}

Likelihood likelihood_from_string(const std::string& s) {
  if (s == "gaussian") return Likelihood::Gaussian;
  if (s == "cauchy") return Likelihood::Cauchy;
  throw ConfigError("unknown likelihood '" + s + "' (gaussian|cauchy)");
}

Index ModelSpec::param_index(ParamRole role, int tool) const {
  Index shared = -1;
  for (Index i = 0; i < size(); ++i) {
    const ParamInfo& p = layout[static_cast<std::size_t>(i)];
    if (p.role != role) continue;
    if (p.tool == tool) return i;
    if (p.tool == -1) shared = i;
  }
  return shared;
}

double ModelSpec::noise_prior_scale() const {
  if (const auto* cp = std::get_if<CauchyHierPriors>(&priors))
    return cp->gamma_noise_scale;
  return std::get<GaussianHierPriors>(priors).noise_scale;
}

namespace {

FixedHypers fixed_from_priors(const PriorConfig& priors) {
  FixedHypers f;
  if (const auto* cp = std::get_if<CauchyHierPriors>(&priors)) {
    f.mu_m = cp->gamma_shape * cp->gamma_scale;  // Gamma mean
    f.sigma_m = cp->s_sigma_m;                   // half-Cauchy median
    f.mu_c = cp->mu_c_mean;
    f.sigma_c = cp->s_sigma_c;
  } else {
    const auto& gp = std::get<GaussianHierPriors>(priors);
    f.mu_c = gp.m_alpha[0];
    f.mu_m = gp.m_alpha[1];
    // Inverse-gamma mean where it exists, mode otherwise.
    double s = gp.a > 1.0 ? gp.b / (gp.a - 1.0) : gp.b / (gp.a + 1.0);
    f.sigma_m = s;
    f.sigma_c = s;
  }
  return f;
}

}  // namespace

ModelSpec build_model(Pooling pooling, Likelihood likelihood,
                      const PriorConfig& priors, PopulationDataset data) {
  data.validate();
  validate_priors(priors);
  bool cauchy_priors = std::holds_alternative<CauchyHierPriors>(priors);
  if (cauchy_priors != (likelihood == Likelihood::Cauchy))
    throw ConfigError("prior family does not match likelihood family");

  ModelSpec spec;
  spec.pooling = pooling;
  spec.likelihood = likelihood;
  spec.priors = priors;
  spec.data = std::move(data);
  spec.fixed = fixed_from_priors(priors);

  const char* noise_name = likelihood == Likelihood::Cauchy ? "gamma" : "sigma";
  auto push = [&spec](std::string name, ParamRole role, int tool,
                      bool positive, bool offset) {
    spec.layout.push_back({std::move(name), role, tool, positive, offset});
  };

  int K = static_cast<int>(spec.data.tools.size());
  bool shared = pooling == Pooling::Complete;
  bool hier = pooling == Pooling::Partial;
  auto tool_id = [&spec](int k) {
    return spec.data.tools[static_cast<std::size_t>(k)].tool_id;
  };

  if (shared) {
    push("m", ParamRole::Slope, -1, false, false);
    push("c", ParamRole::Intercept, -1, false, false);
    push(noise_name, ParamRole::Noise, -1, true, false);
  } else {
    for (int k = 0; k < K; ++k) {
      int id = tool_id(k);
      push("m[" + std::to_string(id) + "]", ParamRole::Slope, id, false, hier);
    }
    for (int k = 0; k < K; ++k) {
      int id = tool_id(k);
      push("c[" + std::to_string(id) + "]", ParamRole::Intercept, id, false,
           hier);
    }
    for (int k = 0; k < K; ++k) {
      int id = tool_id(k);
      push(std::string(noise_name) + "[" + std::to_string(id) + "]",
           ParamRole::Noise, id, true, false);
    }
  }
  if (hier) {
    // mu_m keeps its positivity only under the Gamma prior.
    push("mu_m", ParamRole::SlopeMean, -1, cauchy_priors, false);
    push("sigma_m", ParamRole::SlopeSd, -1, true, false);
    push("mu_c", ParamRole::InterceptMean, -1, false, false);
    push("sigma_c", ParamRole::InterceptSd, -1, true, false);
    spec.i_mu_m = spec.size() - 4;
    spec.i_sigma_m = spec.size() - 3;
    spec.i_mu_c = spec.size() - 2;
    spec.i_sigma_c = spec.size() - 1;
  }

  spec.rx.reserve(spec.data.tools.size());
  spec.ry.reserve(spec.data.tools.size());
  for (const auto& t : spec.data.tools) {
    spec.rx.push_back(t.revealed_x());
    spec.ry.push_back(t.revealed_y());
  }
  return spec;
}

VecXd constrain(const ModelSpec& spec, const VecXd& u) {
  if (u.size() != spec.size())
    throw ConfigError("parameter vector length does not match layout");
  VecXd theta(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const ParamInfo& p = spec.layout[static_cast<std::size_t>(i)];
    theta[i] = p.positive ? std::exp(u[i]) : u[i];
  }
  if (spec.pooling == Pooling::Partial) {
    double mu_m = theta[spec.i_mu_m], sigma_m = theta[spec.i_sigma_m];
    double mu_c = theta[spec.i_mu_c], sigma_c = theta[spec.i_sigma_c];
    for (Index i = 0; i < u.size(); ++i) {
      const ParamInfo& p = spec.layout[static_cast<std::size_t>(i)];
      if (!p.offset) continue;
      if (p.role == ParamRole::Slope)
        theta[i] = mu_m + sigma_m * u[i];
      else
        theta[i] = mu_c + sigma_c * u[i];
    }
  }
  if (!theta.allFinite())
    throw InferenceError("constrain produced non-finite parameters");
  return theta;
}

VecXd unconstrain(const ModelSpec& spec, const VecXd& theta) {
  if (theta.size() != spec.size())
    throw ConfigError("parameter vector length does not match layout");
  VecXd u(theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    const ParamInfo& p = spec.layout[static_cast<std::size_t>(i)];
    u[i] = p.positive ? std::log(theta[i]) : theta[i];
  }
  if (spec.pooling == Pooling::Partial) {
    double mu_m = theta[spec.i_mu_m], sigma_m = theta[spec.i_sigma_m];
    double mu_c = theta[spec.i_mu_c], sigma_c = theta[spec.i_sigma_c];
    for (Index i = 0; i < theta.size(); ++i) {
      const ParamInfo& p = spec.layout[static_cast<std::size_t>(i)];
      if (!p.offset) continue;
      if (p.role == ParamRole::Slope)
        u[i] = (theta[i] - mu_m) / sigma_m;
      else
        u[i] = (theta[i] - mu_c) / sigma_c;
    }
  }
  return u;
}

namespace {

struct LikGrad {
  double m = 0, c = 0, noise = 0;
};

// Log likelihood of one tool's revealed points given line (m, c) and noise
// scale s, with optional accumulation of d/dm, d/dc, d/ds.
double tool_loglik(Likelihood lik, const VecXd& x, const VecXd& y, double m,
                   double c, double s, LikGrad* g) {
  Index n = x.size();
  if (n == 0) return 0.0;
  Eigen::ArrayXd r = y.array() - m * x.array() - c;
  if (lik == Likelihood::Cauchy) {
    Eigen::ArrayXd denom = s * s + r.square();
    double lp = static_cast<double>(n) * (-kLogPi + std::log(s)) -
                denom.log().sum();
    if (g) {
      Eigen::ArrayXd w = r / denom;
      g->m += 2.0 * (w * x.array()).sum();
      g->c += 2.0 * w.sum();
      g->noise += ((r.square() - s * s) / denom).sum() / s;
    }
    return lp;
  }
  double inv_var = 1.0 / (s * s);
  double lp = -static_cast<double>(n) * (kHalfLogTwoPi + std::log(s)) -
              0.5 * inv_var * r.square().sum();
  if (g) {
    g->m += inv_var * (r * x.array()).sum();
    g->c += inv_var * r.sum();
    g->noise += r.square().sum() * inv_var / s - static_cast<double>(n) / s;
  }
  return lp;
}

}  // namespace

double log_posterior_grad(const ModelSpec& spec, const VecXd& u, VecXd* grad) {
  if (u.size() != spec.size())
    throw ConfigError("parameter vector length does not match layout");
  if (grad) grad->setZero(spec.size());

  const Index K = spec.data.n_tools();
  const double noise_scale = spec.noise_prior_scale();
  double lp = 0.0;

  if (spec.pooling == Pooling::Complete) {
    double m = u[0], c = u[1], s = std::exp(u[2]);
    LikGrad lg;
    for (Index k = 0; k < K; ++k)
      lp += tool_loglik(spec.likelihood, spec.rx[static_cast<std::size_t>(k)],
                        spec.ry[static_cast<std::size_t>(k)], m, c, s,
                        grad ? &lg : nullptr);
    const FixedHypers& f = spec.fixed;
    lp += normal_lpdf(m, f.mu_m, f.sigma_m);
    lp += normal_lpdf(c, f.mu_c, f.sigma_c);
    lp += half_cauchy_lpdf(s, noise_scale) + u[2];
    if (grad) {
      (*grad)[0] = lg.m + normal_dlpdf(m, f.mu_m, f.sigma_m);
      (*grad)[1] = lg.c + normal_dlpdf(c, f.mu_c, f.sigma_c);
      (*grad)[2] = s * (lg.noise + half_cauchy_dlpdf(s, noise_scale)) + 1.0;
    }
    return lp;
  }

  if (spec.pooling == Pooling::None) {
    const FixedHypers& f = spec.fixed;
    for (Index k = 0; k < K; ++k) {
      double m = u[k], c = u[K + k], s = std::exp(u[2 * K + k]);
      LikGrad lg;
      lp += tool_loglik(spec.likelihood, spec.rx[static_cast<std::size_t>(k)],
                        spec.ry[static_cast<std::size_t>(k)], m, c, s,
                        grad ? &lg : nullptr);
      lp += normal_lpdf(m, f.mu_m, f.sigma_m);
      lp += normal_lpdf(c, f.mu_c, f.sigma_c);
      lp += half_cauchy_lpdf(s, noise_scale) + u[2 * K + k];
      if (grad) {
        (*grad)[k] = lg.m + normal_dlpdf(m, f.mu_m, f.sigma_m);
        (*grad)[K + k] = lg.c + normal_dlpdf(c, f.mu_c, f.sigma_c);
        (*grad)[2 * K + k] =
            s * (lg.noise + half_cauchy_dlpdf(s, noise_scale)) + 1.0;
      }
    }
    return lp;
  }

  // Partial pooling, non-centered: u holds standardized offsets a_k, b_k with
  // m_k = mu_m + sigma_m * a_k, c_k = mu_c + sigma_c * b_k; their group priors
  // become standard normal on the offsets.
  bool cauchy_priors = std::holds_alternative<CauchyHierPriors>(spec.priors);
  double mu_m = cauchy_priors ? std::exp(u[spec.i_mu_m]) : u[spec.i_mu_m];
  double sigma_m = std::exp(u[spec.i_sigma_m]);
  double mu_c = u[spec.i_mu_c];
  double sigma_c = std::exp(u[spec.i_sigma_c]);

  double sum_dm = 0, sum_dm_a = 0, sum_dc = 0, sum_dc_b = 0;
  for (Index k = 0; k < K; ++k) {
    double a = u[k], b = u[K + k];
    double m = mu_m + sigma_m * a;
    double c = mu_c + sigma_c * b;
    double s = std::exp(u[2 * K + k]);
    LikGrad lg;
    lp += tool_loglik(spec.likelihood, spec.rx[static_cast<std::size_t>(k)],
                      spec.ry[static_cast<std::size_t>(k)], m, c, s,
                      grad ? &lg : nullptr);
    lp += std_normal_lpdf(a) + std_normal_lpdf(b);
    lp += half_cauchy_lpdf(s, noise_scale) + u[2 * K + k];
    if (grad) {
      (*grad)[k] = sigma_m * lg.m - a;
      (*grad)[K + k] = sigma_c * lg.c - b;
      (*grad)[2 * K + k] =
          s * (lg.noise + half_cauchy_dlpdf(s, noise_scale)) + 1.0;
      sum_dm += lg.m;
      sum_dm_a += lg.m * a;
      sum_dc += lg.c;
      sum_dc_b += lg.c * b;
    }
  }

  if (cauchy_priors) {
    const auto& pr = std::get<CauchyHierPriors>(spec.priors);
    lp += gamma_lpdf(mu_m, pr.gamma_shape, pr.gamma_scale) + u[spec.i_mu_m];
    lp += half_cauchy_lpdf(sigma_m, pr.s_sigma_m) + u[spec.i_sigma_m];
    lp += normal_lpdf(mu_c, pr.mu_c_mean, pr.mu_c_sd);
    lp += half_cauchy_lpdf(sigma_c, pr.s_sigma_c) + u[spec.i_sigma_c];
    if (grad) {
      (*grad)[spec.i_mu_m] =
          mu_m * (sum_dm + gamma_dlpdf(mu_m, pr.gamma_shape, pr.gamma_scale)) +
          1.0;
      (*grad)[spec.i_sigma_m] =
          sigma_m * (sum_dm_a + half_cauchy_dlpdf(sigma_m, pr.s_sigma_m)) + 1.0;
      (*grad)[spec.i_mu_c] = sum_dc + normal_dlpdf(mu_c, pr.mu_c_mean, pr.mu_c_sd);
      (*grad)[spec.i_sigma_c] =
          sigma_c * (sum_dc_b + half_cauchy_dlpdf(sigma_c, pr.s_sigma_c)) + 1.0;
    }
  } else {
    const auto& pr = std::get<GaussianHierPriors>(spec.priors);
    lp += normal_lpdf(mu_m, pr.m_alpha[1], pr.s_alpha[1]);
    lp += inv_gamma_lpdf(sigma_m, pr.a, pr.b) + u[spec.i_sigma_m];
    lp += normal_lpdf(mu_c, pr.m_alpha[0], pr.s_alpha[0]);
    lp += inv_gamma_lpdf(sigma_c, pr.a, pr.b) + u[spec.i_sigma_c];
    if (grad) {
      (*grad)[spec.i_mu_m] =
          sum_dm + normal_dlpdf(mu_m, pr.m_alpha[1], pr.s_alpha[1]);
      (*grad)[spec.i_sigma_m] =
          sigma_m * (sum_dm_a + inv_gamma_dlpdf(sigma_m, pr.a, pr.b)) + 1.0;
      (*grad)[spec.i_mu_c] =
          sum_dc + normal_dlpdf(mu_c, pr.m_alpha[0], pr.s_alpha[0]);
      (*grad)[spec.i_sigma_c] =
          sigma_c * (sum_dc_b + inv_gamma_dlpdf(sigma_c, pr.a, pr.b)) + 1.0;
    }
  }
  return lp;
}

double log_posterior(const ModelSpec& spec, const VecXd& u) {
  return log_posterior_grad(spec, u, nullptr);
}

VecXd grad_log_posterior(const ModelSpec& spec, const VecXd& u) {
  VecXd g(spec.size());
  log_posterior_grad(spec, u, &g);
  return g;
}

}  // namespace toolwear
