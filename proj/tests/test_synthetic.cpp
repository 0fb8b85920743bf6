#include <doctest.h>

#include <cmath>

#include "toolwear/errors.hpp"
#include "toolwear/synthetic.hpp"

using namespace toolwear;

TEST_SUITE("synthetic") {
  TEST_CASE("same seed reproduces the population exactly") {
    SyntheticConfig cfg;
    cfg.seed = 42;
    GroundTruth t1, t2;
    PopulationDataset a = generate_synthetic(cfg, &t1);
    PopulationDataset b = generate_synthetic(cfg, &t2);
    REQUIRE(a.n_tools() == b.n_tools());
    for (Index k = 0; k < a.n_tools(); ++k) {
      CHECK(a.tools[static_cast<std::size_t>(k)].x ==
            b.tools[static_cast<std::size_t>(k)].x);
      CHECK(a.tools[static_cast<std::size_t>(k)].y ==
            b.tools[static_cast<std::size_t>(k)].y);
    }
    CHECK(t1.m == t2.m);
    CHECK(t1.c == t2.c);

    cfg.seed = 43;
    PopulationDataset c = generate_synthetic(cfg);
    CHECK(a.tools[0].y != c.tools[0].y);
  }

  TEST_CASE("zero noise gives exact lines on the uniform grid") {
    SyntheticConfig cfg;
    cfg.n_tools = 3;
    cfg.n_steps = 5;
    cfg.step_km = 6.02;
    cfg.noise_gamma = 0.0;
    cfg.seed = 7;
    GroundTruth truth;
    PopulationDataset ds = generate_synthetic(cfg, &truth);
    REQUIRE(truth.tool_ids.size() == 3);
    for (Index k = 0; k < 3; ++k) {
      const ToolSeries& t = ds.tools[static_cast<std::size_t>(k)];
      CHECK(t.tool_id == truth.tool_ids[static_cast<std::size_t>(k)]);
      for (Index i = 0; i < t.size(); ++i) {
        CHECK(t.x[i] ==
              doctest::Approx(static_cast<double>(i + 1) * 6.02).epsilon(1e-15));
        CHECK(t.y[i] ==
              doctest::Approx(truth.m[k] * t.x[i] + truth.c[k]).epsilon(1e-15));
        CHECK(t.revealed[static_cast<std::size_t>(i)] == 1);
      }
    }
    CHECK(ds.step_km == 6.02);
  }

  TEST_CASE("slopes are always positive") {
    SyntheticConfig cfg;
    cfg.n_tools = 40;
    cfg.n_steps = 2;
    cfg.true_mu_m = 0.001;   // most of the prior mass sits below zero
    cfg.true_sigma_m = 0.01;
    cfg.seed = 99;
    GroundTruth truth;
    generate_synthetic(cfg, &truth);
    for (Index k = 0; k < truth.m.size(); ++k) CHECK(truth.m[k] > 0.0);
  }

  TEST_CASE("noise is clamped into the truncation bound") {
    SyntheticConfig cfg;
    cfg.n_tools = 10;
    cfg.n_steps = 30;
    cfg.noise_gamma = 0.5;   // wide tails force frequent resampling
    cfg.noise_bound = 0.75;
    cfg.seed = 5;
    GroundTruth truth;
    PopulationDataset ds = generate_synthetic(cfg, &truth);
    double max_abs = 0.0;
    for (Index k = 0; k < ds.n_tools(); ++k) {
      const ToolSeries& t = ds.tools[static_cast<std::size_t>(k)];
      for (Index i = 0; i < t.size(); ++i) {
        double eps = t.y[i] - (truth.m[k] * t.x[i] + truth.c[k]);
        max_abs = std::max(max_abs, std::abs(eps));
        CHECK(std::abs(eps) <= 0.75 + 1e-12);
      }
    }
    CHECK(max_abs > 0.1);  // the clamp was actually exercised
  }

  TEST_CASE("line parameters do not depend on the series length") {
    SyntheticConfig short_cfg;
    short_cfg.n_steps = 4;
    short_cfg.seed = 21;
    SyntheticConfig long_cfg = short_cfg;
    long_cfg.n_steps = 12;
    GroundTruth ts, tl;
    PopulationDataset a = generate_synthetic(short_cfg, &ts);
    PopulationDataset b = generate_synthetic(long_cfg, &tl);
    CHECK(ts.m == tl.m);
    CHECK(ts.c == tl.c);
    for (Index k = 0; k < a.n_tools(); ++k)
      for (Index i = 0; i < 4; ++i)
        CHECK(a.tools[static_cast<std::size_t>(k)].y[i] ==
              b.tools[static_cast<std::size_t>(k)].y[i]);
  }

  TEST_CASE("least squares recovers the drawn slopes") {
    SyntheticConfig cfg;
    cfg.n_tools = 50;
    cfg.n_steps = 12;
    cfg.true_sigma_m = 0.01;
    cfg.noise_gamma = 0.002;
    cfg.seed = 77;
    GroundTruth truth;
    PopulationDataset ds = generate_synthetic(cfg, &truth);

    VecXd est(50);
    for (Index k = 0; k < 50; ++k) {
      const ToolSeries& t = ds.tools[static_cast<std::size_t>(k)];
      double xm = t.x.mean(), ym = t.y.mean();
      double sxx = (t.x.array() - xm).square().sum();
      est[k] = (t.x.array() - xm).cwiseProduct(t.y.array() - ym).sum() / sxx;
    }
    double bias = (est - truth.m).mean();
    CHECK(std::abs(bias) < 0.002);
    // Spread of the true slopes dominates the fit error, so the estimates
    // must track the truth almost perfectly.
    double em = est.mean(), tm = truth.m.mean();
    double cov = ((est.array() - em) * (truth.m.array() - tm)).sum();
    double corr = cov / std::sqrt((est.array() - em).square().sum() *
                                  (truth.m.array() - tm).square().sum());
    CHECK(corr > 0.95);
  }

  TEST_CASE("config validation") {
    SyntheticConfig cfg;
    cfg.n_tools = 0;
    CHECK_THROWS_AS((void)generate_synthetic(cfg), ConfigError);
    cfg = SyntheticConfig{};
    cfg.step_km = 0.0;
    CHECK_THROWS_AS((void)generate_synthetic(cfg), ConfigError);
    cfg = SyntheticConfig{};
    cfg.noise_bound = 0.0;
    CHECK_THROWS_AS((void)generate_synthetic(cfg), ConfigError);
    cfg = SyntheticConfig{};
    cfg.n_steps = 0;
    CHECK_THROWS_AS((void)generate_synthetic(cfg), ConfigError);
  }
}
