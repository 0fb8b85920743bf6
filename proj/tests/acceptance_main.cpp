// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Statistical criteria run on seeded synthetic populations, so every number
// here is reproducible run to run.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <utility>
#include <vector>

#include "toolwear/dataset.hpp"
#include "toolwear/decision.hpp"
#include "toolwear/diagnostics.hpp"
#include "toolwear/harness.hpp"
#include "toolwear/io.hpp"
#include "toolwear/model.hpp"
#include "toolwear/predict.hpp"
#include "toolwear/rng.hpp"
#include "toolwear/sampler.hpp"
#include "toolwear/synthetic.hpp"

using namespace toolwear;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Conjugate Gaussian mean: sampler vs the closed-form posterior.

struct ConjugateMeanTarget {
  VecXd y;
  double prior_sd = 10.0;
  Index dim() const { return 1; }
  double log_density_grad(const VecXd& u, VecXd& grad) const {
    double mu = u[0];
    double pv = prior_sd * prior_sd;
    grad.resize(1);
    grad[0] = (y.array() - mu).sum() - mu / pv;
    return -0.5 * (y.array() - mu).square().sum() - 0.5 * mu * mu / pv;
  }
};

Verdict criterion_conjugate() {
  auto t0 = Clock::now();
  ConjugateMeanTarget target;
  target.y.resize(20);
  Rng data_rng = Rng::stream(2024, "chain", 0);
  for (Index i = 0; i < 20; ++i) target.y[i] = 1.7 + data_rng.normal();

  double prec = 1.0 / (target.prior_sd * target.prior_sd) +
                static_cast<double>(target.y.size());
  double post_mean = target.y.sum() / prec;
  double post_sd = std::sqrt(1.0 / prec);

  SamplerConfig cfg;
  cfg.warmup = 1000;
  cfg.draws = 2000;
  cfg.chains = 4;
  cfg.seed = 314;
  std::vector<RawChain> raw = run_chains(target, cfg);

  PosteriorSamples ps;
  ps.layout.push_back({"mu", ParamRole::Slope, -1, false, false});
  for (auto& rc : raw) {
    ps.chains.push_back(rc.draws);
    ps.divergent.push_back(rc.divergent);
  }
  Diagnostics diag = diagnostics(ps);

  VecXd v = ps.stacked(0);
  double mean = v.mean();
  double sd = std::sqrt((v.array() - mean).square().sum() /
                        static_cast<double>(v.size() - 1));
  double ess = diag.ess_bulk[0];
  double rhat = diag.rhat[0];
  double mcse_mean = post_sd / std::sqrt(ess);
  double mcse_sd = post_sd / std::sqrt(2.0 * ess);
  double elapsed = seconds_since(t0);

  bool mean_ok = std::fabs(mean - post_mean) <= 3.0 * mcse_mean;
  bool sd_ok = std::fabs(sd - post_sd) <= 3.0 * mcse_sd;
  bool rhat_ok = rhat < 1.01;
  bool time_ok = elapsed < 10.0;

  std::ostringstream d;
  d << "mean off by " << fmt(std::fabs(mean - post_mean) / mcse_mean, 2)
    << " mcse, sd off by " << fmt(std::fabs(sd - post_sd) / mcse_sd, 2)
    << " mcse, rhat " << fmt(rhat, 4) << ", ess " << fmt(ess, 4) << ", "
    << fmt(elapsed, 3) << "s";
  return {mean_ok && sd_ok && rhat_ok && time_ok, d.str()};
}

// ---------------------------------------------------------------------------
// 2. Analytic gradients vs central finite differences, every model variant.

PopulationDataset gradient_fixture() {
  PopulationDataset ds;
  ToolSeries a;
  a.tool_id = 1;
  a.x.resize(3);
  a.x << 1.0, 2.0, 3.0;
  a.y.resize(3);
  a.y << 0.32, 0.33, 0.41;
  a.revealed = {1, 1, 1};
  ToolSeries b = a;
  b.tool_id = 2;
  b.y << 0.28, 0.35, 0.36;
  b.revealed = {1, 0, 1};  // one hidden label keeps the mask path honest
  ds.tools = {a, b};
  ds.step_km = 1.0;
  return ds;
}

Verdict criterion_gradients() {
  auto t0 = Clock::now();
  PopulationDataset ds = gradient_fixture();
  const Pooling poolings[] = {Pooling::Complete, Pooling::None,
                              Pooling::Partial};
  const Likelihood liks[] = {Likelihood::Cauchy, Likelihood::Gaussian};

  double worst = 0.0;
  int checked = 0;
  std::uint64_t variant = 0;
  for (Pooling p : poolings)
    for (Likelihood l : liks) {
      PriorConfig priors = l == Likelihood::Gaussian
                               ? PriorConfig(GaussianHierPriors{})
                               : PriorConfig(CauchyHierPriors{});
      ModelSpec spec = build_model(p, l, priors, ds);
      Rng rng = Rng::stream(99, "chain", variant++);
      const double h = 1e-5;
      VecXd grad(spec.size()), scratch(spec.size());
      for (int pt = 0; pt < 100; ++pt) {
        VecXd u(spec.size());
        for (Index i = 0; i < u.size(); ++i)
          u[i] = (2.0 * rng.uniform01() - 1.0) * 1.5;
        log_posterior_grad(spec, u, &grad);
        for (Index i = 0; i < u.size(); ++i) {
          VecXd up = u, dn = u;
          up[i] += h;
          dn[i] -= h;
          double fd = (log_posterior_grad(spec, up, &scratch) -
                       log_posterior_grad(spec, dn, &scratch)) /
                      (2.0 * h);
          double rel = std::fabs(fd - grad[i]) /
                       std::max(1.0, std::fabs(grad[i]));
          worst = std::max(worst, rel);
          ++checked;
        }
      }
    }
  double elapsed = seconds_since(t0);
  bool ok = worst <= 1e-6 && elapsed < 30.0;
  std::ostringstream d;
  d << "6 variants x 100 points (" << checked
    << " partials), worst relative error " << fmt(worst, 3) << ", "
    << fmt(elapsed, 3) << "s";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 3. Decision arithmetic, exact.

Verdict criterion_decision() {
  const double tol = 1e-12;
  DecisionParams p;  // c_workpiece 1, c_tool 0.25, c_inspection 0.05
  bool ok = true;
  std::ostringstream d;

  ok &= std::fabs(eu_do_nothing(0.3, p) - 0.3) <= tol;
  ok &= std::fabs(eu_inspect(0.3, p) - 0.125) <= tol;

  const double cross = 1.0 / 15.0;
  ok &= std::fabs(eu_do_nothing(cross, p) - eu_inspect(cross, p)) <= tol;
  ok &= choose_action(cross, p) == ActionKind::DoNothing;  // tie -> inaction
  ok &= choose_action(cross + 1e-9, p) == ActionKind::Inspect;
  ok &= choose_action(cross - 1e-9, p) == ActionKind::DoNothing;

  ok &= std::fabs(p.alpha() - 0.25) <= tol;
  ok &= replacement_triggered(0.25, p);
  ok &= !replacement_triggered(0.25 - 1e-9, p);

  d << "eu(0.3) = {" << fmt(eu_do_nothing(0.3, p), 12) << ", "
    << fmt(eu_inspect(0.3, p), 12) << "}, crossover gap "
    << fmt(std::fabs(eu_do_nothing(cross, p) - eu_inspect(cross, p)), 2)
    << ", alpha " << fmt(p.alpha(), 12);
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 4-6. Shared replication study: 7 tools, 4 fully observed, 3 with 2-point
// prefixes; fits under all three poolings plus both policies per seed.

struct StudyRep {
  int shrink_wins = 0;  // active tools where partial sd < none sd
  bool mse_ok = false;
  Index risk_inspections = 0;
  Index periodic_inspections = 0;
  double risk_total = 0.0;
  double periodic_total = 0.0;
};

struct StudyResult {
  std::vector<StudyRep> reps;
  double elapsed = 0.0;
};

double latent_sd_at(const PosteriorSamples& s, int tool_id, double x) {
  VecXd grid(1);
  grid << x;
  VecXd col = forecast(s, tool_id, grid, false).latent_draws.col(0);
  double mean = col.mean();
  return std::sqrt((col.array() - mean).square().sum() /
                   static_cast<double>(col.size() - 1));
}

PosteriorSamples fit_pooling(const PopulationDataset& ds, Pooling pooling,
                             const SamplerConfig& base, std::uint64_t seed) {
  SamplerConfig cfg = base;
  cfg.seed = seed;
  ModelSpec spec =
      build_model(pooling, Likelihood::Cauchy, CauchyHierPriors{}, ds);
  return sample(spec, cfg).first;
}

StudyResult run_study() {
  auto t0 = Clock::now();
  StudyResult out;
  const int n_reps = 20;
  const std::vector<int> historic{1, 2, 3, 4};
  const std::vector<int> active{5, 6, 7};

  for (int rep = 0; rep < n_reps; ++rep) {
    SyntheticConfig gen;  // default fleet shape: 7 tools x 12 steps
    gen.seed = 9000 + static_cast<std::uint64_t>(rep);
    PopulationDataset ds = generate_synthetic(gen);
    for (int id : active) {
      ToolSeries& t = ds.tool(id);
      for (Index j = 2; j < t.size(); ++j) t.revealed[j] = 0;
    }

    ScenarioConfig sc;
    sc.historic_tools = historic;
    sc.active_tools = active;
    sc.active_prefix = 2;
    sc.periodic_period = 1;
    sc.sampler.chains = 2;
    sc.sampler.warmup = 250;
    sc.sampler.draws = 300;
    sc.sampler.threads = 1;
    sc.seed = gen.seed;

    StudyRep r;

    PosteriorSamples part = fit_pooling(ds, Pooling::Partial, sc.sampler,
                                        sc.seed);
    PosteriorSamples none = fit_pooling(ds, Pooling::None, sc.sampler,
                                        sc.seed + 1);
    PosteriorSamples comp = fit_pooling(ds, Pooling::Complete, sc.sampler,
                                        sc.seed + 2);

    for (int id : active) {
      double x_last = ds.tool(id).x[ds.tool(id).size() - 1];
      if (latent_sd_at(part, id, x_last) < latent_sd_at(none, id, x_last))
        ++r.shrink_wins;
    }

    double mse_p = total_mse(part, ds).total;
    double mse_n = total_mse(none, ds).total;
    double mse_c = total_mse(comp, ds).total;
    r.mse_ok = mse_p <= mse_n && mse_p <= mse_c;

    OracleReplacements orc = gold_standard_replacements(ds, sc);
    SimulationResult risk = run_risk_based(ds, sc, &orc);
    SimulationResult peri = run_periodic(ds, sc, &orc);
    r.risk_inspections = risk.ledger.inspections;
    r.periodic_inspections = peri.ledger.inspections;
    r.risk_total = risk.ledger.total;
    r.periodic_total = peri.ledger.total;

    out.reps.push_back(r);
  }
  out.elapsed = seconds_since(t0);
  return out;
}

Verdict criterion_shrinkage(const StudyResult& s) {
  int wins = 0, cases = 0;
  for (const auto& r : s.reps) {
    wins += r.shrink_wins;
    cases += 3;
  }
  bool ok = wins >= (9 * cases + 9) / 10 && s.elapsed < 1200.0;
  std::ostringstream d;
  d << "partial pooling narrowed the data-poor latent posterior in " << wins
    << "/" << cases << " cases; study took " << fmt(s.elapsed, 4) << "s";
  return {ok, d.str()};
}

Verdict criterion_mse(const StudyResult& s) {
  int wins = 0;
  for (const auto& r : s.reps) wins += r.mse_ok ? 1 : 0;
  int n = static_cast<int>(s.reps.size());
  bool ok = wins * 5 >= n * 4;  // >= 80%
  std::ostringstream d;
  d << "held-out mse had partial <= none and partial <= complete in " << wins
    << "/" << n << " replications";
  return {ok, d.str()};
}

Verdict criterion_policy(const StudyResult& s) {
  int fewer = 0;
  double risk_sum = 0.0, peri_sum = 0.0;
  for (const auto& r : s.reps) {
    fewer += r.risk_inspections < r.periodic_inspections ? 1 : 0;
    risk_sum += r.risk_total;
    peri_sum += r.periodic_total;
  }
  int n = static_cast<int>(s.reps.size());
  double mean_risk = risk_sum / n;
  double mean_peri = peri_sum / n;
  double reduction = (mean_peri - mean_risk) / mean_peri * 100.0;
  bool ok = fewer * 5 >= n * 4 && mean_risk < mean_peri &&
            reduction >= 15.0 && reduction <= 60.0;
  std::ostringstream d;
  d << "risk-based used fewer inspections in " << fewer << "/" << n
    << " replications; mean cost " << fmt(mean_risk, 4) << " vs "
    << fmt(mean_peri, 4) << " (" << fmt(reduction, 4) << "% reduction)";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 7. Online causality: scrambling labels the policy had not seen by step t
// leaves the decision prefix bit-identical.

bool same_event(const EventRecord& a, const EventRecord& b) {
  auto eqd = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return a.tool_id == b.tool_id && a.step == b.step && a.action == b.action &&
         a.inspected == b.inspected && a.end_of_life == b.end_of_life &&
         eqd(a.p_exceed, b.p_exceed) && eqd(a.eu_nothing, b.eu_nothing) &&
         eqd(a.eu_inspect, b.eu_inspect) && eqd(a.p_fail_next, b.p_fail_next);
}

std::vector<EventRecord> prefix_of(const std::vector<EventRecord>& tl, int t) {
  std::vector<EventRecord> out;
  for (const auto& e : tl)
    if (e.step < t) out.push_back(e);
  return out;
}

Verdict criterion_causality() {
  const std::vector<int> historic{1, 2, 3};
  const std::vector<int> active{4, 5};
  int ok_pairs = 0;
  std::ostringstream d;

  Rng pick = Rng::stream(4242, "chain", 0);
  for (int pair = 0; pair < 10; ++pair) {
    SyntheticConfig gen;
    gen.n_tools = 5;
    gen.n_steps = 8;
    gen.true_mu_m = 0.02;
    gen.seed = 9100 + static_cast<std::uint64_t>(pair);
    PopulationDataset ds = generate_synthetic(gen);
    for (int id : active) {
      ToolSeries& tl = ds.tool(id);
      for (Index j = 2; j < tl.size(); ++j) tl.revealed[j] = 0;
    }

    ScenarioConfig sc;
    sc.historic_tools = historic;
    sc.active_tools = active;
    sc.active_prefix = 2;
    sc.sampler.chains = 2;
    sc.sampler.warmup = 200;
    sc.sampler.draws = 250;
    sc.sampler.threads = 1;
    sc.seed = gen.seed;

    OracleReplacements orc = gold_standard_replacements(ds, sc);
    SimulationResult original = run_risk_based(ds, sc, &orc);

    int t = 4 + static_cast<int>(pick.uniform01() * 5.0);  // 4..8
    if (t > 8) t = 8;

    std::set<std::pair<int, int>> revealed_at;  // (tool, step), online only
    for (const auto& e : original.timeline)
      if (e.inspected) revealed_at.insert({e.tool_id, e.step});

    PopulationDataset scrambled = ds;
    for (int id : active) {
      ToolSeries& tl = scrambled.tool(id);
      for (Index j = 2; j < tl.size(); ++j) {
        int step = static_cast<int>(j) + 1;
        bool seen_early =
            step < t && revealed_at.count({id, step}) > 0;
        if (!seen_early) tl.y[j] += 7.5 + static_cast<double>(j);
      }
    }

    SimulationResult replay = run_risk_based(scrambled, sc, &orc);

    std::vector<EventRecord> a = prefix_of(original.timeline, t);
    std::vector<EventRecord> b = prefix_of(replay.timeline, t);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = same_event(a[i], b[i]);
    if (same) ++ok_pairs;
  }
  bool ok = ok_pairs == 10;
  d << "decision prefixes identical for " << ok_pairs
    << "/10 scrambled-future replays";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 8. Exceedance, failure time, and brute-force recounts agree exactly.

Verdict criterion_estimators() {
  SyntheticConfig gen;
  gen.n_tools = 3;
  gen.n_steps = 8;
  gen.seed = 777;
  PopulationDataset ds = generate_synthetic(gen);

  SamplerConfig cfg;
  cfg.chains = 2;
  cfg.warmup = 250;
  cfg.draws = 300;
  cfg.seed = 777;
  ModelSpec spec = build_model(Pooling::Partial, Likelihood::Cauchy,
                               CauchyHierPriors{}, ds);
  PosteriorSamples samples = sample(spec, cfg).first;

  const int tool = 2;
  const double s_crit = 0.9;
  FailureTimeDistribution ftd = failure_time(samples, tool, s_crit);

  VecXd grid(13);
  for (Index i = 0; i < 13; ++i) grid[i] = 6.02 * static_cast<double>(i + 1);
  MatXd latent = forecast(samples, tool, grid, false).latent_draws;

  std::string path = (std::filesystem::temp_directory_path() /
                      ("toolwear_acc8_" + std::to_string(::getpid()) + ".csv"))
                         .string();
  write_draws_csv(path, samples);
  DrawsTable table = read_draws_csv(path);
  std::filesystem::remove(path);
  Index im = -1, ic = -1;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i] == "m[2]") im = static_cast<Index>(i);
    if (table.columns[i] == "c[2]") ic = static_cast<Index>(i);
  }
  if (im < 0 || ic < 0) return {false, "draw file lacks m[2]/c[2] columns"};

  const Index n = ftd.t_f_draws.size();
  bool identity_ok = latent.rows() == n && table.values.rows() == n;
  bool csv_ok = identity_ok;
  int mismatches = 0;

  for (Index g = 0; identity_ok && g < grid.size(); ++g) {
    double x = grid[g];
    Index exceed_count = 0, fail_count = 0, csv_exceed = 0, csv_fail = 0;
    for (Index dr = 0; dr < n; ++dr) {
      bool exceeds = latent(dr, g) > s_crit;
      bool fails = ftd.t_f_draws[dr] < x;
      if (exceeds != fails) ++mismatches;
      exceed_count += exceeds;
      fail_count += fails;

      double m = table.values(dr, im);
      double c = table.values(dr, ic);
      csv_exceed += (m * x + c) > s_crit;
      double tf = c >= s_crit
                      ? 0.0
                      : (m > 0.0 ? (s_crit - c) / m
                                 : std::numeric_limits<double>::infinity());
      csv_fail += tf < x;
    }
    double p_exceed =
        exceedance_probability(samples, tool, x, s_crit,
                               ExceedanceMode::LatentOnly)
            .probability;
    double p_fail = prob_failure_before(ftd, x);
    double nd = static_cast<double>(n);
    identity_ok = identity_ok && mismatches == 0 &&
                  p_exceed == static_cast<double>(exceed_count) / nd &&
                  p_fail == static_cast<double>(fail_count) / nd &&
                  p_exceed == p_fail;
    csv_ok = csv_ok && csv_exceed == exceed_count && csv_fail == fail_count;
  }

  bool ok = identity_ok && csv_ok;
  std::ostringstream d;
  d << "crossing-time identity exact over " << n << " draws x " << grid.size()
    << " horizons (" << mismatches
    << " draw mismatches); draw-file recount "
    << (csv_ok ? "matches" : "differs");
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 9. Byte-identical reruns of every command, through the installed binary.

struct CliOut {
  int code = -1;
  std::string out;
};

CliOut run_cli(const std::string& bin, const std::string& args) {
  std::string cmd = "'" + bin + "' " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return {};
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, p))
    out.append(buf, got);
  int status = ::pclose(p);
  CliOut r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = std::move(out);
  return r;
}

Verdict criterion_reproducibility() {
  const char* bin = std::getenv("TOOLWEAR_BIN");
  if (!bin) return {false, "TOOLWEAR_BIN is not set"};

  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() /
                  ("toolwear_acc9_" + std::to_string(::getpid()));
  fs::create_directories(root);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{root};

  auto in_root = [&](const std::string& n) { return (root / n).string(); };
  auto same_file = [](const std::string& a, const std::string& b) {
    return read_text_file(a) == read_text_file(b);
  };

  // generate
  for (int i = 0; i < 2; ++i) {
    CliOut g = run_cli(bin, "generate --seed 2121 --out " +
                                in_root("ds" + std::to_string(i) + ".csv") +
                                " --truth " +
                                in_root("t" + std::to_string(i) + ".json"));
    if (g.code != 0) return {false, "generate exited " + std::to_string(g.code)};
  }
  bool gen_ok = same_file(in_root("ds0.csv"), in_root("ds1.csv")) &&
                same_file(in_root("t0.json"), in_root("t1.json"));

  // fit
  for (int i = 0; i < 2; ++i) {
    CliOut f = run_cli(
        bin, "fit --data " + in_root("ds0.csv") +
                 " --pooling complete --chains 2 --warmup 200 --draws 200"
                 " --seed 7 --allow-unconverged --out " +
                 in_root("fit" + std::to_string(i)));
    if (f.code != 0) return {false, "fit exited " + std::to_string(f.code)};
  }
  bool fit_ok =
      same_file(in_root("fit0_draws.csv"), in_root("fit1_draws.csv")) &&
      same_file(in_root("fit0_summary.json"), in_root("fit1_summary.json"));

  // simulate
  write_text_file(in_root("sim.json"), R"({
    "seed": 21,
    "synthetic": {"n_tools": 3, "n_steps": 5, "true_mu_m": 0.025,
                  "true_mu_c": 0.3, "noise_gamma": 0.02},
    "scenario": {"historic_tools": [1], "active_tools": [2, 3],
                 "active_prefix": 2, "periodic_period": 2},
    "sampler": {"warmup": 150, "draws": 150, "chains": 2}
  })");
  for (int i = 0; i < 2; ++i) {
    CliOut s = run_cli(bin, "simulate --config " + in_root("sim.json") +
                                " --out-dir " +
                                in_root("sim" + std::to_string(i)));
    if (s.code != 0)
      return {false, "simulate exited " + std::to_string(s.code)};
  }
  bool sim_ok = true;
  for (const char* name : {"risk_based.json", "periodic.json",
                           "gold_standard.json", "compare.csv"})
    sim_ok = sim_ok && same_file(in_root("sim0") + "/" + name,
                                 in_root("sim1") + "/" + name);

  bool ok = gen_ok && fit_ok && sim_ok;
  std::ostringstream d;
  d << "reran generate/fit/simulate: " << (gen_ok ? "dataset" : "DATASET DIFF")
    << ", " << (fit_ok ? "draws" : "DRAWS DIFF") << ", "
    << (sim_ok ? "policy results byte-identical" : "POLICY RESULT DIFF");
  return {ok, d.str()};
}

Verdict guarded(Verdict (*fn)()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

void report(int id, const Verdict& v, int& failures) {
  std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL")
            << " - " << v.detail << "\n";
  std::cout.flush();
  if (!v.pass) ++failures;
}

}  // namespace

int main() {
  int failures = 0;
  report(1, guarded(criterion_conjugate), failures);
  report(2, guarded(criterion_gradients), failures);
  report(3, guarded(criterion_decision), failures);

  try {
    StudyResult study = run_study();
    report(4, criterion_shrinkage(study), failures);
    report(5, criterion_mse(study), failures);
    report(6, criterion_policy(study), failures);
  } catch (const std::exception& e) {
    Verdict v{false, std::string("study exception: ") + e.what()};
    report(4, v, failures);
    report(5, v, failures);
    report(6, v, failures);
  }

  report(7, guarded(criterion_causality), failures);
  report(8, guarded(criterion_estimators), failures);
  report(9, guarded(criterion_reproducibility), failures);

  return failures == 0 ? 0 : 1;
}
