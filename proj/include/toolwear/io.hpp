#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toolwear/diagnostics.hpp"
#include "toolwear/harness.hpp"
#include "toolwear/predict.hpp"
#include "toolwear/synthetic.hpp"
#include "toolwear/types.hpp"

namespace toolwear {

// Round-trippable decimal form (%.17g).
std::string fmt_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
bool file_exists(const std::string& path);

// FNV-1a over the raw bytes; stable across platforms.
std::uint64_t config_hash(const std::string& text);

std::string synthetic_config_to_json(const SyntheticConfig& c);
SyntheticConfig synthetic_config_from_json(const std::string& text);
std::string ground_truth_to_json(const GroundTruth& t);

// Prior document keyed by field name; family taken from a "family" key,
// inferred from the fields present, or defaulted to match the likelihood.
PriorConfig priors_config_from_json(const std::string& text,
                                    Likelihood fallback);

// One simulate config document: data source, scenario, sampler, decision.
struct SimulateSpec {
  std::optional<std::string> dataset_csv;
  std::optional<SyntheticConfig> synthetic;
  ScenarioConfig scenario;
  std::vector<PolicyKind> policies{PolicyKind::RiskBased,
                                   PolicyKind::Periodic};
};

SimulateSpec simulate_spec_from_json(const std::string& text);
std::string simulate_spec_to_json(const SimulateSpec& s);

std::string simulation_result_to_json(const SimulationResult& r);
SimulationResult simulation_result_from_json(const std::string& text);

std::string comparison_csv(const PolicyComparison& cmp);
// Single-result tables omit the reduction column.
std::string comparison_markdown(const PolicyComparison& cmp);

// Header `chain,iter,<layout names>`; chains and iters are 1-based.
void write_draws_csv(const std::string& path, const PosteriorSamples& s);

struct DrawsTable {
  std::vector<std::string> columns;  // parameter names, chain/iter stripped
  std::vector<int> chain;
  std::vector<int> iter;
  MatXd values;  // rows align with chain/iter
};

DrawsTable read_draws_csv(const std::string& path);

std::string fit_summary_json(const PosteriorSamples& s, const Diagnostics& d);

// Header tool_id,x,mean,q05,q50,q95 over each forecast's grid.
void write_forecast_csv(const std::string& path,
                        const std::vector<Forecast>& forecasts);

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double duration_s = 0.0;
};

std::string manifest_json(const RunManifest& m);

}  // namespace toolwear
