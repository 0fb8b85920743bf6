#include <doctest.h>

#include <cmath>
#include <vector>

#include "toolwear/distributions.hpp"
#include "toolwear/sampler.hpp"

using namespace toolwear;

namespace {

// Product of independent normals with known moments.
struct GaussianTarget {
  VecXd mean, sd;
  Index dim() const { return mean.size(); }
  double log_density_grad(const VecXd& u, VecXd& g) const {
    g.resize(mean.size());
    double lp = 0;
    for (Index i = 0; i < mean.size(); ++i) {
      double z = (u[i] - mean[i]) / sd[i];
      lp += -0.5 * z * z - std::log(sd[i]) - kHalfLogTwoPi;
      g[i] = -z / sd[i];
    }
    return lp;
  }
};

GaussianTarget std_normal(Index d) {
  return GaussianTarget{VecXd::Zero(d), VecXd::Ones(d)};
}

struct NeverFinite {
  Index dim() const { return 2; }
  double log_density_grad(const VecXd&, VecXd& g) const {
    g = VecXd::Zero(2);
    return -std::numeric_limits<double>::infinity();
  }
};

// Mean of 20 observations with unit noise under a Normal(0, 10) prior on the
// mean; posterior is Normal(post_mean, post_sd) in closed form.
struct ConjugateMean {
  VecXd y;
  Index dim() const { return 1; }
  double log_density_grad(const VecXd& u, VecXd& g) const {
    double t = u[0];
    double lp = 0, d = 0;
    for (Index i = 0; i < y.size(); ++i) {
      double r = y[i] - t;
      lp += -0.5 * r * r;
      d += r;
    }
    lp += -0.5 * t * t / 100.0;
    d += -t / 100.0;
    g.resize(1);
    g[0] = d;
    return lp;
  }
};

VecXd stack_dim(const std::vector<RawChain>& chains, Index d) {
  Index total = 0;
  for (const auto& c : chains) total += c.draws.rows();
  VecXd out(total);
  Index at = 0;
  for (const auto& c : chains) {
    out.segment(at, c.draws.rows()) = c.draws.col(d);
    at += c.draws.rows();
  }
  return out;
}

std::vector<VecXd> per_chain_dim(const std::vector<RawChain>& chains, Index d) {
  std::vector<VecXd> out;
  for (const auto& c : chains) out.push_back(c.draws.col(d));
  return out;
}

PhasePoint phase(const GaussianTarget& t, double q, double p) {
  PhasePoint z;
  z.q = VecXd::Constant(1, q);
  z.p = VecXd::Constant(1, p);
  z.grad.resize(1);
  z.logp = t.log_density_grad(z.q, z.grad);
  return z;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("leapfrog is reversible") {
    GaussianTarget t = std_normal(3);
    VecXd inv_mass(3);
    inv_mass << 1.0, 0.5, 2.0;
    PhasePoint z0;
    z0.q.resize(3);
    z0.q << 0.3, -1.1, 0.8;
    z0.p.resize(3);
    z0.p << -0.4, 0.9, 0.2;
    z0.grad.resize(3);
    z0.logp = t.log_density_grad(z0.q, z0.grad);

    PhasePoint z = z0;
    for (int i = 0; i < 7; ++i) z = leapfrog(t, inv_mass, z, 0.2);
    z.p = -z.p;
    for (int i = 0; i < 7; ++i) z = leapfrog(t, inv_mass, z, 0.2);
    z.p = -z.p;
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(z.q[i] - z0.q[i]) <= 1e-12);
      CHECK(std::abs(z.p[i] - z0.p[i]) <= 1e-12);
    }
  }

  TEST_CASE("zero step is the identity") {
    GaussianTarget t = std_normal(2);
    VecXd inv_mass = VecXd::Ones(2);
    PhasePoint z0;
    z0.q.resize(2);
    z0.q << 0.5, -0.25;
    z0.p.resize(2);
    z0.p << 1.5, 0.75;
    z0.grad.resize(2);
    z0.logp = t.log_density_grad(z0.q, z0.grad);
    PhasePoint z = leapfrog(t, inv_mass, z0, 0.0);
    CHECK(z.q == z0.q);
    CHECK(z.p == z0.p);
    CHECK(z.logp == z0.logp);
  }

  TEST_CASE("energy error shrinks quadratically with the step") {
    GaussianTarget t = std_normal(1);
    VecXd inv_mass = VecXd::Ones(1);
    auto energy_err = [&](double h, int n) {
      PhasePoint z = phase(t, 1.3, -0.7);
      double h0 = hamiltonian(z, inv_mass);
      for (int i = 0; i < n; ++i) z = leapfrog(t, inv_mass, z, h);
      return std::abs(hamiltonian(z, inv_mass) - h0);
    };
    // Fixed total time 0.8; halving the step should quarter the error.
    double e1 = energy_err(0.1, 8);
    double e2 = energy_err(0.05, 16);
    double e3 = energy_err(0.025, 32);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.15));
  }

  TEST_CASE("dual averaging holds its shrinkage point at the target") {
    DualAverager da(0.5, 0.8);
    for (int i = 0; i < 1000; ++i) da.update(0.8);
    CHECK(da.current() == doctest::Approx(5.0).epsilon(1e-12));
    double before = da.averaged();
    for (int i = 0; i < 100; ++i) da.update(0.8);
    CHECK(std::abs(da.averaged() / before - 1.0) < 1e-3);
  }

  TEST_CASE("dual averaging moves the step against the acceptance gap") {
    DualAverager low(0.5, 0.8);
    low.update(0.0);
    double prev = low.current();
    for (int i = 0; i < 50; ++i) {
      low.update(0.0);  // rejecting everything must shrink the step
      CHECK(low.current() < prev);
      prev = low.current();
    }
    DualAverager high(0.5, 0.8);
    high.update(1.0);
    prev = high.current();
    for (int i = 0; i < 50; ++i) {
      high.update(1.0);  // full acceptance must grow it
      CHECK(high.current() > prev);
      prev = high.current();
    }
  }

  TEST_CASE("initial step lands in a usable bracket") {
    GaussianTarget t = std_normal(4);
    VecXd inv_mass = VecXd::Ones(4);
    Rng rng(99);
    HmcState s;
    s.q = VecXd::Zero(4);
    s.grad.resize(4);
    s.logp = t.log_density_grad(s.q, s.grad);
    for (int trial = 0; trial < 10; ++trial) {
      double step = find_initial_step(t, rng, inv_mass, s);
      CHECK(step > 1e-4);
      CHECK(step < 1e3);
    }
  }

  TEST_CASE("u-turn criterion folds in the inverse mass") {
    VecXd ones = VecXd::Ones(2);
    PhasePoint back, front;
    back.q.resize(2);
    back.q << 0.0, 0.0;
    front.q.resize(2);
    front.q << 1.0, 10.0;
    back.p.resize(2);
    front.p.resize(2);
    back.p << 1.0, -1.0;
    front.p = back.p;
    CHECK(detail::uturn(back, front, ones));  // 1 - 10 < 0
    VecXd light(2);
    light << 1.0, 0.01;  // second coordinate barely moves
    CHECK(!detail::uturn(back, front, light));  // 1 - 0.1 > 0

    front.q << 1.0, 0.0;
    front.p << 1.0, 0.0;
    back.p << 1.0, 0.0;
    CHECK(!detail::uturn(back, front, ones));
    back.p << -1.0, 0.0;  // rear end moving away
    CHECK(detail::uturn(back, front, ones));
  }

  TEST_CASE("nuts recovers a separable gaussian") {
    GaussianTarget t{VecXd(5), VecXd(5)};
    t.mean << -2.0, 0.0, 1.5, 4.0, -0.5;
    t.sd << 0.3, 1.0, 2.0, 5.0, 0.7;
    SamplerConfig cfg;
    cfg.chains = 4;
    cfg.warmup = 500;
    cfg.draws = 1000;
    cfg.seed = 314;
    std::vector<RawChain> chains = run_chains(t, cfg);
    REQUIRE(chains.size() == 4);
    Index divergences = 0;
    for (const auto& c : chains) divergences += c.divergences;
    CHECK(divergences == 0);
    for (const auto& c : chains) {
      CHECK(c.mean_accept > 0.6);
      CHECK(c.mean_accept <= 1.0);
    }
    for (Index d = 0; d < 5; ++d) {
      VecXd all = stack_dim(chains, d);
      double ess = bulk_ess(per_chain_dim(chains, d));
      CHECK(ess > 400.0);
      double mean = all.mean();
      double sd = std::sqrt((all.array() - mean).square().sum() /
                            static_cast<double>(all.size() - 1));
      CHECK(std::abs(mean - t.mean[d]) <= 3.0 * t.sd[d] / std::sqrt(ess));
      CHECK(sd == doctest::Approx(t.sd[d]).epsilon(0.10));
    }
  }

  TEST_CASE("draws pass a ks check against the target law") {
    GaussianTarget t = std_normal(1);
    SamplerConfig cfg;
    cfg.chains = 4;
    cfg.warmup = 500;
    cfg.draws = 1000;
    cfg.seed = 2718;
    std::vector<RawChain> chains = run_chains(t, cfg);
    VecXd all = stack_dim(chains, 0);
    std::vector<double> v(all.data(), all.data() + all.size());
    std::sort(v.begin(), v.end());
    double dmax = 0;
    auto n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double cdf = 0.5 * std::erfc(-v[i] / std::sqrt(2.0));
      double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
      dmax = std::max({dmax, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    double ess = bulk_ess(per_chain_dim(chains, 0));
    CHECK(dmax < 1.628 / std::sqrt(std::min(ess, n)));  // ~alpha 0.01
  }

  TEST_CASE("conjugate posterior is matched within monte carlo error") {
    Rng rng(7);
    ConjugateMean t;
    t.y.resize(20);
    for (Index i = 0; i < 20; ++i) t.y[i] = 1.4 + rng.normal();
    double prec = 20.0 + 1.0 / 100.0;
    double post_mean = t.y.sum() / prec;
    double post_sd = 1.0 / std::sqrt(prec);

    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.warmup = 400;
    cfg.draws = 600;
    cfg.seed = 11;
    std::vector<RawChain> chains = run_chains(t, cfg);
    VecXd all = stack_dim(chains, 0);
    double ess = bulk_ess(per_chain_dim(chains, 0));
    double mcse = post_sd / std::sqrt(ess);
    CHECK(std::abs(all.mean() - post_mean) <= 3.0 * mcse);
    double sd = std::sqrt((all.array() - all.mean()).square().sum() /
                          static_cast<double>(all.size() - 1));
    CHECK(sd == doctest::Approx(post_sd).epsilon(0.15));
  }

  TEST_CASE("chains are reproducible and schedule independent") {
    GaussianTarget t = std_normal(3);
    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.warmup = 100;
    cfg.draws = 150;
    cfg.seed = 555;
    auto a = run_chains(t, cfg);
    auto b = run_chains(t, cfg);
    cfg.threads = 2;
    auto c = run_chains(t, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].draws == b[i].draws);
      CHECK(a[i].draws == c[i].draws);
      CHECK(a[i].step_size == b[i].step_size);
      CHECK(a[i].step_size == c[i].step_size);
    }
    cfg.threads = 1;
    cfg.seed = 556;
    auto d = run_chains(t, cfg);
    CHECK(a[0].draws != d[0].draws);
  }

  TEST_CASE("static integrator fallback also samples correctly") {
    GaussianTarget t{VecXd(2), VecXd(2)};
    t.mean << 1.0, -2.0;
    t.sd << 1.0, 0.5;
    SamplerConfig cfg;
    cfg.algorithm = HmcAlgorithm::Static;
    cfg.static_steps = 16;
    cfg.chains = 2;
    cfg.warmup = 400;
    cfg.draws = 800;
    cfg.seed = 333;
    std::vector<RawChain> chains = run_chains(t, cfg);
    for (const auto& c : chains) {
      CHECK(c.mean_accept > 0.5);
      CHECK(c.divergences == 0);
    }
    for (Index d = 0; d < 2; ++d) {
      VecXd all = stack_dim(chains, d);
      double ess = bulk_ess(per_chain_dim(chains, d));
      CHECK(std::abs(all.mean() - t.mean[d]) <=
            3.0 * t.sd[d] / std::sqrt(std::max(ess, 50.0)));
    }
  }

  TEST_CASE("non-finite density at the start is fatal") {
    NeverFinite t;
    SamplerConfig cfg;
    cfg.chains = 1;
    cfg.warmup = 10;
    cfg.draws = 10;
    CHECK_THROWS_AS((void)run_chains(t, cfg), InferenceError);
  }

  TEST_CASE("config validation rejects nonsense") {
    SamplerConfig cfg;
    cfg.chains = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SamplerConfig{};
    cfg.target_accept = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SamplerConfig{};
    cfg.warmup = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SamplerConfig{};
    cfg.draws = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("sampling failure still reports diagnostics") {
    Diagnostics diag;
    diag.divergences = 42;
    SamplingError err("every draw diverged", diag);
    const InferenceError& base = err;  // maps to the inference exit path
    CHECK(std::string(base.what()).find("diverged") != std::string::npos);
    CHECK(err.diagnostics.divergences == 42);
  }
}
