#include "toolwear/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toolwear/dataset.hpp"
#include "toolwear/errors.hpp"
#include "toolwear/harness.hpp"
#include "toolwear/io.hpp"
#include "toolwear/model.hpp"
#include "toolwear/predict.hpp"
#include "toolwear/sampler.hpp"
#include "toolwear/synthetic.hpp"

namespace toolwear {

namespace {

struct GlobalArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool force = false;
};

void ensure_fresh(const std::string& path, bool force) {
  if (!force && file_exists(path))
    throw IoError(path + " exists; pass --force to overwrite");
}

void emit_manifest(const std::string& command, std::uint64_t cfg_hash,
                   std::uint64_t seed, const std::vector<std::string>& outputs,
                   std::chrono::steady_clock::time_point t0) {
  RunManifest m;
  m.command = command;
  m.config_hash = cfg_hash;
  m.seed = seed;
  m.outputs = outputs;
  m.duration_s = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  std::cout << manifest_json(m);
}

int cmd_generate(const GlobalArgs& g, const std::string& out,
                 const std::string& truth_out) {
  auto t0 = std::chrono::steady_clock::now();
  std::string cfg_text;
  SyntheticConfig cfg;
  if (!g.config.empty()) {
    cfg_text = read_text_file(g.config);
    cfg = synthetic_config_from_json(cfg_text);
  }
  if (g.seed) cfg.seed = *g.seed;
  ensure_fresh(out, g.force);
  ensure_fresh(truth_out, g.force);

  GroundTruth truth;
  PopulationDataset ds = generate_synthetic(cfg, &truth);
  save_dataset_csv(ds, out);
  write_text_file(truth_out, ground_truth_to_json(truth));
  emit_manifest("generate", config_hash(cfg_text), cfg.seed,
                {out, truth_out}, t0);
  return 0;
}

struct FitArgs {
  std::string data;
  std::string pooling = "partial";
  std::string likelihood = "cauchy";
  std::string priors_path;
  std::string out_prefix = "fit";
  bool allow_unconverged = false;
  bool write_forecast = false;
  SamplerConfig sampler;
};

int cmd_fit(const GlobalArgs& g, const FitArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  PopulationDataset ds = load_dataset_csv(a.data);

  Likelihood lik = likelihood_from_string(a.likelihood);
  PriorConfig priors = a.priors_path.empty()
                           ? (lik == Likelihood::Gaussian
                                  ? PriorConfig(GaussianHierPriors{})
                                  : PriorConfig(CauchyHierPriors{}))
                           : priors_config_from_json(
                                 read_text_file(a.priors_path), lik);

  SamplerConfig cfg = a.sampler;
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;

  std::string draws_path = a.out_prefix + "_draws.csv";
  std::string summary_path = a.out_prefix + "_summary.json";
  std::string forecast_path = a.out_prefix + "_forecast.csv";
  ensure_fresh(draws_path, g.force);
  ensure_fresh(summary_path, g.force);
  if (a.write_forecast) ensure_fresh(forecast_path, g.force);

  ModelSpec spec =
      build_model(pooling_from_string(a.pooling), lik, priors, ds);
  auto [samples, diag] = sample(spec, cfg);

  write_draws_csv(draws_path, samples);
  write_text_file(summary_path, fit_summary_json(samples, diag));
  std::vector<std::string> outputs{draws_path, summary_path};

  if (a.write_forecast) {
    std::vector<Forecast> fs;
    for (const auto& t : ds.tools)
      fs.push_back(forecast(samples, t.tool_id, t.x, false));
    write_forecast_csv(forecast_path, fs);
    outputs.push_back(forecast_path);
  }

  std::string cfg_text = a.data + "|" + a.pooling + "|" + a.likelihood;
  emit_manifest("fit", config_hash(cfg_text), cfg.seed, outputs, t0);

  double mr = diag.max_rhat();
  if (!a.allow_unconverged && std::isfinite(mr) && mr > 1.05) {
    std::cerr << "fit: max R-hat " << mr
              << " > 1.05; rerun with more draws or --allow-unconverged\n";
    return 3;
  }
  return 0;
}

SimulationResult gold_result(const PopulationDataset& ds,
                             const ScenarioConfig& sc,
                             const OracleReplacements& orc) {
  SimulationResult res;
  res.policy = PolicyKind::GoldStandard;
  res.mode_used = sc.exceedance_mode;
  res.decision = sc.decision;
  res.dataset_hash = dataset_fingerprint(ds);
  res.oracle = orc;
  for (const auto& [id, step] : orc.step) {
    EventRecord ev;
    ev.tool_id = id;
    ev.step = step;
    ev.action = ActionKind::Replace;
    ev.end_of_life = orc.end_of_life.at(id);
    ev.p_exceed = std::numeric_limits<double>::quiet_NaN();
    ev.eu_nothing = std::numeric_limits<double>::quiet_NaN();
    ev.eu_inspect = std::numeric_limits<double>::quiet_NaN();
    ev.p_fail_next = std::numeric_limits<double>::quiet_NaN();
    res.timeline.push_back(ev);
    res.replacement_step[id] = step;
    res.replacement_km[id] = orc.km.at(id);
    res.end_of_life[id] = orc.end_of_life.at(id);
  }
  std::vector<EpisodeEvent> events;
  for (const auto& [id, km] : orc.km)
    events.push_back({id, ActionKind::Replace, km});
  res.ledger = settle_ledger(events, orc.km, sc.decision);
  return res;
}

int cmd_simulate(const GlobalArgs& g, const std::string& out_dir,
                 const std::string& policies_flag) {
  auto t0 = std::chrono::steady_clock::now();
  if (g.config.empty()) throw ConfigError("simulate needs --config");
  std::string cfg_text = read_text_file(g.config);
  SimulateSpec spec = simulate_spec_from_json(cfg_text);
  if (g.seed) {
    spec.scenario.seed = *g.seed;
    if (spec.synthetic) spec.synthetic->seed = *g.seed;
  }
  if (g.threads) spec.scenario.sampler.threads = *g.threads;
  if (!policies_flag.empty()) {
    spec.policies.clear();
    std::size_t start = 0;
    while (start <= policies_flag.size()) {
      std::size_t comma = policies_flag.find(',', start);
      std::string name =
          policies_flag.substr(start, comma == std::string::npos
                                          ? std::string::npos
                                          : comma - start);
      if (!name.empty()) spec.policies.push_back(policy_from_string(name));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (spec.policies.empty())
      throw ConfigError("--policies lists no policies");
  }

  PopulationDataset ds = spec.dataset_csv
                             ? load_dataset_csv(*spec.dataset_csv)
                             : generate_synthetic(*spec.synthetic);
  for (const auto& w : spec.scenario.validate(ds))
    std::cerr << "warning: " << w << "\n";

  std::filesystem::create_directories(out_dir);
  auto path_in = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  OracleReplacements orc = gold_standard_replacements(ds, spec.scenario);

  std::vector<SimulationResult> results;
  std::vector<std::string> outputs;
  for (PolicyKind p : spec.policies) {
    SimulationResult r;
    switch (p) {
      case PolicyKind::RiskBased:
        r = run_risk_based(ds, spec.scenario, &orc);
        break;
      case PolicyKind::Periodic:
        r = run_periodic(ds, spec.scenario, &orc);
        break;
      case PolicyKind::GoldStandard:
        r = gold_result(ds, spec.scenario, orc);
        break;
    }
    std::string path = path_in(std::string(to_string(p)) + ".json");
    ensure_fresh(path, g.force);
    write_text_file(path, simulation_result_to_json(r));
    outputs.push_back(path);
    results.push_back(std::move(r));
  }
  {
    std::string path = path_in("gold_standard.json");
    bool requested = false;
    for (PolicyKind p : spec.policies)
      requested |= p == PolicyKind::GoldStandard;
    if (!requested) {
      ensure_fresh(path, g.force);
      write_text_file(
          path, simulation_result_to_json(gold_result(ds, spec.scenario, orc)));
      outputs.push_back(path);
    }
  }
  if (results.size() >= 2) {
    std::string path = path_in("compare.csv");
    ensure_fresh(path, g.force);
    write_text_file(path, comparison_csv(compare(results, orc)));
    outputs.push_back(path);
  }
  emit_manifest("simulate", config_hash(cfg_text), spec.scenario.seed,
                outputs, t0);
  return 0;
}

int cmd_report(const GlobalArgs& g, const std::vector<std::string>& paths,
               const std::string& out_md, const std::string& out_csv) {
  auto t0 = std::chrono::steady_clock::now();
  if (paths.empty()) throw ConfigError("report needs at least one result file");

  std::string all_bytes;
  std::vector<SimulationResult> results;
  for (const auto& p : paths) {
    std::string text = read_text_file(p);
    all_bytes += text;
    SimulationResult r = simulation_result_from_json(text);
    CostLedger recount = recount_ledger(r);
    if (std::fabs(recount.total - r.ledger.total) > 1e-12 ||
        recount.inspections != r.ledger.inspections)
      throw ConfigError(p + ": ledger does not match its event timeline");
    results.push_back(std::move(r));
  }

  PolicyComparison cmp;
  if (results.size() == 1) {
    const auto& r = results.front();
    ComparisonRow row;
    row.policy = r.policy;
    row.inspections = r.ledger.inspections;
    row.inspection_cost = r.ledger.inspection_cost;
    row.wasted_life_cost = r.ledger.wasted_life_cost;
    row.damage_cost = r.ledger.damage_cost;
    row.total = r.ledger.total;
    cmp.rows.push_back(row);
  } else {
    cmp = compare(results, results.front().oracle);
  }

  std::string md = comparison_markdown(cmp);
  std::vector<std::string> outputs;
  if (!out_md.empty()) {
    ensure_fresh(out_md, g.force);
    write_text_file(out_md, md);
    outputs.push_back(out_md);
  } else {
    std::cout << md;
  }
  if (!out_csv.empty()) {
    ensure_fresh(out_csv, g.force);
    write_text_file(out_csv, comparison_csv(cmp));
    outputs.push_back(out_csv);
  }
  std::uint64_t seed = 0;
  emit_manifest("report", config_hash(all_bytes), seed, outputs, t0);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Hierarchical tool-wear inference and inspection planning"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  std::uint64_t seed_val = 0;
  int threads_val = 0;
  app.add_option("--config", g.config, "JSON config file");
  auto* seed_opt =
      app.add_option("--seed", seed_val, "override the config seed");
  auto* threads_opt =
      app.add_option("--threads", threads_val, "sampler thread cap");
  app.add_flag("--force", g.force, "overwrite existing outputs");

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  std::string gen_out = "dataset.csv";
  std::string gen_truth = "truth.json";
  gen->add_option("--out", gen_out, "dataset CSV path");
  gen->add_option("--truth", gen_truth, "ground-truth JSON path");

  auto* fit = app.add_subcommand("fit", "sample a posterior for a dataset");
  FitArgs fa;
  fit->add_option("--data", fa.data, "dataset CSV")->required();
  fit->add_option("--pooling", fa.pooling, "complete|none|partial");
  fit->add_option("--likelihood", fa.likelihood, "gaussian|cauchy");
  fit->add_option("--priors", fa.priors_path, "prior JSON file");
  fit->add_option("--out", fa.out_prefix, "output path prefix");
  fit->add_option("--chains", fa.sampler.chains, "number of chains");
  fit->add_option("--warmup", fa.sampler.warmup, "warmup iterations");
  fit->add_option("--draws", fa.sampler.draws, "post-warmup draws per chain");
  fit->add_option("--target-accept", fa.sampler.target_accept,
                  "dual-averaging target");
  fit->add_option("--max-depth", fa.sampler.max_tree_depth,
                  "tree doubling cap");
  fit->add_flag("--allow-unconverged", fa.allow_unconverged,
                "exit 0 even if R-hat > 1.05");
  fit->add_flag("--forecast", fa.write_forecast,
                "also write per-tool forecast quantiles");

  auto* sim = app.add_subcommand("simulate", "run inspection policies");
  std::string sim_out_dir = ".";
  std::string sim_policies;
  sim->add_option("--out-dir", sim_out_dir, "output directory");
  sim->add_option("--policies", sim_policies,
                  "comma list: risk,periodic,gold");

  auto* rep = app.add_subcommand("report", "tabulate result files");
  std::vector<std::string> rep_paths;
  std::string rep_md, rep_csv;
  rep->add_option("results", rep_paths, "result JSON files");
  rep->add_option("--out", rep_md, "write markdown here instead of stdout");
  rep->add_option("--csv", rep_csv, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*seed_opt) g.seed = seed_val;
    if (*threads_opt) g.threads = threads_val;
    if (gen->parsed()) return cmd_generate(g, gen_out, gen_truth);
    if (fit->parsed()) return cmd_fit(g, fa);
    if (sim->parsed()) return cmd_simulate(g, sim_out_dir, sim_policies);
    if (rep->parsed()) return cmd_report(g, rep_paths, rep_md, rep_csv);
    throw ConfigError("no command given");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InferenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace toolwear
