#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "toolwear/dataset.hpp"
#include "toolwear/decision.hpp"
#include "toolwear/model.hpp"
#include "toolwear/predict.hpp"
#include "toolwear/sampler.hpp"

namespace toolwear {

enum class PolicyKind { RiskBased, Periodic, GoldStandard };

const char* to_string(PolicyKind p);
PolicyKind policy_from_string(const std::string& s);

struct ScenarioConfig {
  std::vector<int> historic_tools;  // fully revealed from the start
  std::vector<int> active_tools;    // monitored online
  int active_prefix = 2;            // initially revealed points per active tool
  int periodic_period = 1;
  SamplerConfig sampler;            // per-fit seeds are derived from `seed`
  DecisionParams decision;
  ExceedanceMode exceedance_mode = ExceedanceMode::LatentOnly;
  Likelihood likelihood = Likelihood::Cauchy;
  PriorConfig priors = CauchyHierPriors{};
  std::uint64_t seed = 0;

  // Structural checks against a dataset; returns human-readable warnings
  // (e.g. fewer than 4 historic tools) without failing.
  std::vector<std::string> validate(const PopulationDataset& ds) const;
};

struct EventRecord {
  int tool_id = 0;
  int step = 0;            // 1-based measurement opportunity
  ActionKind action{};     // resolved action for this step
  bool inspected = false;  // label revealed at this step
  bool end_of_life = false;
  // NaN marks quantities the policy did not evaluate at this step.
  double p_exceed = 0.0;    // exceedance at the next opportunity
  double eu_nothing = 0.0;
  double eu_inspect = 0.0;
  double p_fail_next = 0.0; // trigger probability at the next opportunity
};

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
};

struct RefitRecord {
  int tool_id = 0;  // episode owner; -1 for the initial population fit
  int step = 0;     // 0 for fits before the first opportunity
  Index n_revealed = 0;
  std::vector<ParamSummary> params;
};

struct OracleReplacements {
  std::map<int, int> step;
  std::map<int, double> km;
  std::map<int, bool> end_of_life;
};

struct SimulationResult {
  PolicyKind policy{};
  ExceedanceMode mode_used{};
  std::vector<EventRecord> timeline;
  std::map<int, int> replacement_step;
  std::map<int, double> replacement_km;
  std::map<int, bool> end_of_life;
  OracleReplacements oracle;  // copied in for cost settlement and reports
  DecisionParams decision;    // params the episode was settled under
  CostLedger ledger;
  std::vector<RefitRecord> refits;
  std::uint64_t dataset_hash = 0;
};

// Content hash of (ids, x, y) only; reveal masks excluded so the same
// underlying dataset matches across policies.
std::uint64_t dataset_fingerprint(const PopulationDataset& ds);

// Memoizing fitter: the posterior for a reveal state is computed once, and
// its sampler seed is derived from (scenario seed, reveal state), so any
// policy reaching the same revealed labels sees the same draws.
class FitCache {
 public:
  FitCache(const ScenarioConfig& scenario);
  std::shared_ptr<const PosteriorSamples> fit(const PopulationDataset& ds);
  Index fits_run() const { return fits_run_; }

 private:
  Likelihood likelihood_;
  PriorConfig priors_;
  SamplerConfig sampler_;
  std::uint64_t seed_;
  Index fits_run_ = 0;
  std::map<std::uint64_t, std::shared_ptr<const PosteriorSamples>> cache_;
};

// Full-information optimum: fit once with everything revealed, then per
// active tool take the earliest step whose next-opportunity failure
// probability reaches alpha.  Never-fired episodes are flagged end-of-life
// at the final step.
OracleReplacements gold_standard_replacements(const PopulationDataset& ds,
                                              const ScenarioConfig& scenario);

// Online active-learning policy: at each hidden step, inspect only when the
// expected cost of inspecting beats inaction; the replacement trigger is
// evaluated on the post-inspection posterior.  Pass a precomputed oracle to
// avoid refitting it; otherwise it is computed here.
SimulationResult run_risk_based(const PopulationDataset& ds,
                                const ScenarioConfig& scenario,
                                const OracleReplacements* oracle = nullptr);

// Baseline: unconditional inspections on a fixed period; the trigger is
// evaluated every step with the current posterior.
SimulationResult run_periodic(const PopulationDataset& ds,
                              const ScenarioConfig& scenario,
                              const OracleReplacements* oracle = nullptr);

struct ComparisonRow {
  PolicyKind policy{};
  Index inspections = 0;
  double inspection_cost = 0.0;
  double wasted_life_cost = 0.0;
  double damage_cost = 0.0;
  double total = 0.0;
  double reduction_pct = 0.0;            // vs the first row
  std::map<int, int> discrepancy_steps;  // replacement - oracle, per tool
};

struct PolicyComparison {
  std::vector<ComparisonRow> rows;
};

// Side-by-side costs; all results must come from the same dataset.
PolicyComparison compare(const std::vector<SimulationResult>& results,
                         const OracleReplacements& oracle);

// Rebuild the ledger from the event timeline and replacement record alone,
// bypassing the settled ledger; reports cross-check the two.
CostLedger recount_ledger(const SimulationResult& r);

}  // namespace toolwear
