#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toolwear/diagnostics.hpp"
#include "toolwear/errors.hpp"
#include "toolwear/model.hpp"
#include "toolwear/rng.hpp"
#include "toolwear/types.hpp"

namespace toolwear {

enum class HmcAlgorithm { Nuts, Static };

struct SamplerConfig {
  int warmup = 1000;
  int draws = 2000;
  int chains = 4;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  std::uint64_t seed = 0;
  double init_jitter = 1.0;
  HmcAlgorithm algorithm = HmcAlgorithm::Nuts;
  int static_steps = 32;  // leapfrog count for the fixed-length fallback
  int threads = 1;        // chains run in parallel; results are order-independent

  void validate() const;
};

// Inference failure that still carries what the chains looked like.
struct SamplingError : InferenceError {
  SamplingError(const std::string& what, Diagnostics diag)
      : InferenceError(what), diagnostics(std::move(diag)) {}
  Diagnostics diagnostics;
};

template <class Target>
concept LogDensityTarget = requires(const Target& t, const VecXd& u, VecXd& g) {
  { t.dim() } -> std::convertible_to<Index>;
  { t.log_density_grad(u, g) } -> std::convertible_to<double>;
};

// Adapter exposing a ModelSpec to the sampler.
struct ModelTarget {
  const ModelSpec* spec;
  Index dim() const { return spec->size(); }
  double log_density_grad(const VecXd& u, VecXd& grad) const {
    return log_posterior_grad(*spec, u, &grad);
  }
};

// Nesterov dual averaging of the log step size toward a target acceptance
// statistic.  Frozen value after warmup is averaged(), not current().
class DualAverager {
 public:
  DualAverager(double init_step, double target) : target_(target) {
    reset(init_step);
  }

  void reset(double init_step) {
    mu_ = std::log(10.0 * init_step);
    log_eps_ = std::log(init_step);
    log_eps_bar_ = 0.0;
    h_bar_ = 0.0;
    m_ = 0;
  }

  void update(double accept_stat) {
    ++m_;
    double m = static_cast<double>(m_);
    double eta = 1.0 / (m + t0_);
    h_bar_ = (1.0 - eta) * h_bar_ + eta * (target_ - accept_stat);
    log_eps_ = mu_ - std::sqrt(m) / gamma_ * h_bar_;
    double w = std::pow(m, -kappa_);
    log_eps_bar_ = w * log_eps_ + (1.0 - w) * log_eps_bar_;
  }

  double current() const { return std::exp(log_eps_); }
  double averaged() const { return std::exp(log_eps_bar_); }

 private:
  double target_;
  double mu_ = 0, log_eps_ = 0, log_eps_bar_ = 0, h_bar_ = 0;
  int m_ = 0;
  static constexpr double gamma_ = 0.05;
  static constexpr double t0_ = 10.0;
  static constexpr double kappa_ = 0.75;
};

inline double log_sum_exp(double a, double b) {
  double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct PhasePoint {
  VecXd q, p, grad;
  double logp = 0;
};

template <LogDensityTarget Target>
PhasePoint leapfrog(const Target& target, const VecXd& inv_mass,
                    PhasePoint z, double step) {
  z.p += 0.5 * step * z.grad;
  z.q += step * (inv_mass.array() * z.p.array()).matrix();
  z.logp = target.log_density_grad(z.q, z.grad);
  z.p += 0.5 * step * z.grad;
  return z;
}

inline double kinetic_energy(const VecXd& p, const VecXd& inv_mass) {
  return 0.5 * (inv_mass.array() * p.array().square()).sum();
}

inline double hamiltonian(const PhasePoint& z, const VecXd& inv_mass) {
  return -z.logp + kinetic_energy(z.p, inv_mass);
}

// Energy drop beyond this flags the trajectory divergent.
inline constexpr double kMaxEnergyError = 1000.0;

struct TransitionStats {
  double accept_sum = 0;
  Index n_leaves = 0;
  bool divergent = false;
  int depth = 0;
  bool max_depth_hit = false;

  double accept_stat() const {
    return n_leaves > 0 ? accept_sum / static_cast<double>(n_leaves) : 0.0;
  }
};

namespace detail {

// Generalized U-turn test between trajectory endpoints with the metric folded
// into the momenta.
inline bool uturn(const PhasePoint& back, const PhasePoint& front,
                  const VecXd& inv_mass) {
  VecXd dq = front.q - back.q;
  return dq.dot((inv_mass.array() * front.p.array()).matrix()) < 0.0 ||
         dq.dot((inv_mass.array() * back.p.array()).matrix()) < 0.0;
}

struct Tree {
  PhasePoint back, front;
  VecXd sel_q, sel_grad;
  double sel_logp = 0;
  double log_weight = 0;  // log sum of exp(h0 - H) over leaves
};

// Doubling subtree; nullopt on divergence or internal U-turn.  Multinomial
// sampling within the subtree, uniform across equal-weight halves.
template <LogDensityTarget Target>
std::optional<Tree> build_tree(const Target& target, Rng& rng,
                               const VecXd& inv_mass, double step, int depth,
                               int dir, const PhasePoint& from, double h0,
                               TransitionStats& stats) {
  if (depth == 0) {
    PhasePoint z = leapfrog(target, inv_mass, from, dir * step);
    double h = hamiltonian(z, inv_mass);
    double log_w = h0 - h;
    ++stats.n_leaves;
    if (std::isfinite(h)) stats.accept_sum += std::min(1.0, std::exp(log_w));
    if (!std::isfinite(h) || h - h0 > kMaxEnergyError) {
      stats.divergent = true;
      return std::nullopt;
    }
    return Tree{z, z, z.q, z.grad, z.logp, log_w};
  }
  auto first = build_tree(target, rng, inv_mass, step, depth - 1, dir, from,
                          h0, stats);
  if (!first) return std::nullopt;
  const PhasePoint& cont = dir > 0 ? first->front : first->back;
  auto second = build_tree(target, rng, inv_mass, step, depth - 1, dir, cont,
                           h0, stats);
  if (!second) return std::nullopt;

  Tree out;
  out.back = dir > 0 ? first->back : second->back;
  out.front = dir > 0 ? second->front : first->front;
  out.log_weight = log_sum_exp(first->log_weight, second->log_weight);
  double p_second = std::exp(second->log_weight - out.log_weight);
  const Tree& pick = rng.uniform01() < p_second ? *second : *first;
  out.sel_q = pick.sel_q;
  out.sel_grad = pick.sel_grad;
  out.sel_logp = pick.sel_logp;
  if (uturn(out.back, out.front, inv_mass)) return std::nullopt;
  return out;
}

}  // namespace detail

struct HmcState {
  VecXd q, grad;
  double logp = 0;
};

template <LogDensityTarget Target>
VecXd sample_momentum(Rng& rng, const VecXd& inv_mass, const Target&) {
  VecXd p(inv_mass.size());
  for (Index i = 0; i < p.size(); ++i)
    p[i] = rng.normal() / std::sqrt(inv_mass[i]);
  return p;
}

// One NUTS transition: doubling with multinomial proposals, biased toward the
// newer half-tree; stops on U-turn, divergence, or max_depth.
template <LogDensityTarget Target>
TransitionStats nuts_transition(const Target& target, Rng& rng,
                                const VecXd& inv_mass, double step,
                                int max_depth, HmcState& state) {
  TransitionStats stats;
  PhasePoint z0{state.q, VecXd(), state.grad, state.logp};
  z0.p = sample_momentum(rng, inv_mass, target);
  double h0 = hamiltonian(z0, inv_mass);

  detail::Tree tree{z0, z0, z0.q, z0.grad, z0.logp, 0.0};
  int depth = 0;
  while (depth < max_depth) {
    int dir = rng.uniform01() < 0.5 ? -1 : 1;
    const PhasePoint& tip = dir > 0 ? tree.front : tree.back;
    auto sub = detail::build_tree(target, rng, inv_mass, step, depth, dir, tip,
                                  h0, stats);
    if (!sub) break;
    // Biased progressive update favours the fresh half of the trajectory.
    double p_replace = std::exp(sub->log_weight - tree.log_weight);
    if (rng.uniform01() < p_replace) {
      tree.sel_q = sub->sel_q;
      tree.sel_grad = sub->sel_grad;
      tree.sel_logp = sub->sel_logp;
    }
    if (dir > 0)
      tree.front = sub->front;
    else
      tree.back = sub->back;
    tree.log_weight = log_sum_exp(tree.log_weight, sub->log_weight);
    ++depth;
    if (detail::uturn(tree.back, tree.front, inv_mass)) break;
  }
  stats.depth = depth;
  stats.max_depth_hit = depth == max_depth;
  state.q = tree.sel_q;
  state.grad = tree.sel_grad;
  state.logp = tree.sel_logp;
  return stats;
}

// Fixed-length HMC fallback with a Metropolis correction.
template <LogDensityTarget Target>
TransitionStats static_hmc_transition(const Target& target, Rng& rng,
                                      const VecXd& inv_mass, double step,
                                      int n_steps, HmcState& state) {
  TransitionStats stats;
  PhasePoint z{state.q, VecXd(), state.grad, state.logp};
  z.p = sample_momentum(rng, inv_mass, target);
  double h0 = hamiltonian(z, inv_mass);
  for (int i = 0; i < n_steps; ++i) {
    z = leapfrog(target, inv_mass, z, step);
    double h = hamiltonian(z, inv_mass);
    ++stats.n_leaves;
    if (!std::isfinite(h) || h - h0 > kMaxEnergyError) {
      stats.divergent = true;
      return stats;
    }
  }
  double h1 = hamiltonian(z, inv_mass);
  double accept = std::min(1.0, std::exp(h0 - h1));
  stats.accept_sum = accept * static_cast<double>(stats.n_leaves);
  if (rng.uniform01() < accept) {
    state.q = z.q;
    state.grad = z.grad;
    state.logp = z.logp;
  }
  return stats;
}

// Coarse bracketing of a reasonable starting step size: double or halve until
// the one-step acceptance crosses 1/2.
template <LogDensityTarget Target>
double find_initial_step(const Target& target, Rng& rng, const VecXd& inv_mass,
                         const HmcState& state) {
  PhasePoint z{state.q, VecXd(), state.grad, state.logp};
  z.p = sample_momentum(rng, inv_mass, target);
  double h0 = hamiltonian(z, inv_mass);
  auto log_ratio = [&](double s) {
    PhasePoint z1 = leapfrog(target, inv_mass, z, s);
    return h0 - hamiltonian(z1, inv_mass);
  };
  double step = 1.0;
  double r = log_ratio(step);
  const double half = std::log(0.5);
  bool grow = std::isfinite(r) && r > half;
  for (int i = 0; i < 100; ++i) {
    step *= grow ? 2.0 : 0.5;
    if (step > 1e7 || step < 1e-10) break;
    r = log_ratio(step);
    bool still = std::isfinite(r) && r > half;
    if (still != grow) break;
  }
  return step;
}

struct RawChain {
  MatXd draws;  // draws x dim, unconstrained
  std::vector<std::uint8_t> divergent;
  double mean_accept = 0;
  double step_size = 0;
  Index divergences = 0;
  Index max_depth_hits = 0;
};

// One chain, fully deterministic given (config.seed, chain index).  Warmup
// adapts the step size throughout and, when warmup >= 40, estimates a
// diagonal inverse mass from the middle window before re-adapting the step.
template <LogDensityTarget Target>
RawChain run_chain(const Target& target, const SamplerConfig& cfg, int chain) {
  const Index D = target.dim();
  Rng rng = Rng::stream(cfg.seed, "chain", static_cast<std::uint64_t>(chain));

  HmcState state;
  state.q.resize(D);
  for (Index i = 0; i < D; ++i)
    state.q[i] = (2.0 * rng.uniform01() - 1.0) * cfg.init_jitter;
  state.grad.resize(D);
  state.logp = target.log_density_grad(state.q, state.grad);
  if (!std::isfinite(state.logp))
    throw InferenceError("chain " + std::to_string(chain) +
                         ": non-finite log density at initialization");

  VecXd inv_mass = VecXd::Ones(D);
  double step = find_initial_step(target, rng, inv_mass, state);
  DualAverager da(step, cfg.target_accept);

  const int W = cfg.warmup;
  const bool adapt_mass = W >= 40;
  const int collect_lo = W / 2, collect_hi = 3 * W / 4;
  VecXd wf_mean = VecXd::Zero(D), wf_m2 = VecXd::Zero(D);
  Index wf_n = 0;

  auto transit = [&](double eps) {
    return cfg.algorithm == HmcAlgorithm::Nuts
               ? nuts_transition(target, rng, inv_mass, eps, cfg.max_tree_depth,
                                 state)
               : static_hmc_transition(target, rng, inv_mass, eps,
                                       cfg.static_steps, state);
  };

  for (int i = 0; i < W; ++i) {
    TransitionStats st = transit(da.current());
    da.update(st.accept_stat());
    if (adapt_mass && i >= collect_lo && i < collect_hi) {
      ++wf_n;
      VecXd delta = state.q - wf_mean;
      wf_mean += delta / static_cast<double>(wf_n);
      wf_m2 += delta.cwiseProduct(state.q - wf_mean);
    }
    if (adapt_mass && i + 1 == collect_hi && wf_n > 1) {
      double n = static_cast<double>(wf_n);
      VecXd var = wf_m2 / (n - 1.0);
      // Regularize toward a small diagonal so sparse windows stay sane.
      inv_mass = (n / (n + 5.0)) * var.array() + 1e-3 * (5.0 / (n + 5.0));
      double s2 = find_initial_step(target, rng, inv_mass, state);
      da.reset(s2);
    }
  }

  RawChain out;
  out.step_size = cfg.warmup > 0 ? da.averaged() : da.current();
  out.draws.resize(cfg.draws, D);
  out.divergent.assign(static_cast<std::size_t>(cfg.draws), 0);
  double accept_total = 0;
  for (int j = 0; j < cfg.draws; ++j) {
    TransitionStats st = transit(out.step_size);
    out.draws.row(j) = state.q.transpose();
    out.divergent[static_cast<std::size_t>(j)] = st.divergent ? 1 : 0;
    out.divergences += st.divergent;
    out.max_depth_hits += st.max_depth_hit;
    accept_total += st.accept_stat();
  }
  out.mean_accept = cfg.draws > 0 ? accept_total / cfg.draws : 0.0;
  return out;
}

// All chains, optionally in parallel; the result never depends on the
// schedule.  Throws SamplingError if any chain is divergent on every draw.
template <LogDensityTarget Target>
std::vector<RawChain> run_chains(const Target& target, const SamplerConfig& cfg);

// Model-facing entry: runs chains, maps draws to constrained space, attaches
// diagnostics.
std::pair<PosteriorSamples, Diagnostics> sample(const ModelSpec& spec,
                                                const SamplerConfig& config);

}  // namespace toolwear

#include "toolwear/sampler_impl.hpp"
