#include "toolwear/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "toolwear/errors.hpp"
#include "toolwear/rng.hpp"

namespace toolwear {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

const char* to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::RiskBased: return "risk_based";
    case PolicyKind::Periodic: return "periodic";
    case PolicyKind::GoldStandard: return "gold_standard";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& s) {
  if (s == "risk_based" || s == "risk") return PolicyKind::RiskBased;
  if (s == "periodic") return PolicyKind::Periodic;
  if (s == "gold_standard" || s == "gold") return PolicyKind::GoldStandard;
  throw ConfigError("unknown policy '" + s + "' (risk|periodic|gold)");
}

std::vector<std::string> ScenarioConfig::validate(
    const PopulationDataset& ds) const {
  sampler.validate();
  decision.validate();
  validate_priors(priors);
  if (active_tools.empty()) throw ConfigError("no active tools configured");
  if (active_prefix < 0) throw ConfigError("active_prefix must be >= 0");
  if (periodic_period < 1) throw ConfigError("periodic_period must be >= 1");

  std::set<int> seen;
  for (int id : historic_tools) {
    if (ds.index_of(id) < 0)
      throw ConfigError("historic tool " + std::to_string(id) +
                        " not in dataset");
    if (!seen.insert(id).second)
      throw ConfigError("tool " + std::to_string(id) + " listed twice");
  }
  for (int id : active_tools) {
    if (ds.index_of(id) < 0)
      throw ConfigError("active tool " + std::to_string(id) +
                        " not in dataset");
    if (!seen.insert(id).second)
      throw ConfigError("tool " + std::to_string(id) +
                        " cannot be both historic and active");
  }

  std::vector<std::string> warnings;
  if (historic_tools.size() < 4)
    warnings.push_back("only " + std::to_string(historic_tools.size()) +
                       " historic tools; population-level estimates are weak "
                       "below 4 full histories");
  return warnings;
}

std::uint64_t dataset_fingerprint(const PopulationDataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& t : ds.tools) {
    h = fnv1a64(&t.tool_id, sizeof(t.tool_id), h);
    Index n = t.size();
    h = fnv1a64(&n, sizeof(n), h);
    h = fnv1a64(t.x.data(), sizeof(double) * static_cast<std::size_t>(n), h);
    h = fnv1a64(t.y.data(), sizeof(double) * static_cast<std::size_t>(n), h);
  }
  return h;
}

namespace {

PopulationDataset apply_masks(const PopulationDataset& ds,
                              const ScenarioConfig& sc) {
  PopulationDataset out = ds;
  for (int id : sc.historic_tools) {
    auto& t = out.tool(id);
    std::fill(t.revealed.begin(), t.revealed.end(), 1);
  }
  for (int id : sc.active_tools) {
    auto& t = out.tool(id);
    for (Index i = 0; i < t.size(); ++i)
      t.revealed[static_cast<std::size_t>(i)] = i < sc.active_prefix ? 1 : 0;
  }
  return out;
}

// x one opportunity past step (1-based); extends the grid by step_km at the
// series end.
double next_x(const ToolSeries& t, int step, double step_km) {
  Index n = t.size();
  if (step < n) return t.x[step];
  return t.x[n - 1] + step_km;
}

// First 1-based step with a hidden label; 0 when everything is revealed.
int first_hidden_step(const ToolSeries& t) {
  for (Index i = 0; i < t.size(); ++i)
    if (!t.revealed[static_cast<std::size_t>(i)]) return static_cast<int>(i) + 1;
  return 0;
}

Index count_revealed(const PopulationDataset& ds) {
  Index n = 0;
  for (const auto& t : ds.tools) n += t.n_revealed();
  return n;
}

std::vector<ParamSummary> summarize(const PosteriorSamples& s) {
  std::vector<ParamSummary> out;
  out.reserve(static_cast<std::size_t>(s.n_params()));
  for (Index p = 0; p < s.n_params(); ++p) {
    VecXd v = s.stacked(p);
    double mean = v.mean();
    double sd = std::sqrt((v.array() - mean).square().sum() /
                          static_cast<double>(v.size() - 1));
    out.push_back({s.layout[static_cast<std::size_t>(p)].name, mean, sd});
  }
  return out;
}

void record_refit(std::vector<RefitRecord>& refits, int tool, int step,
                  const PopulationDataset& state,
                  const PosteriorSamples& samples) {
  refits.push_back({tool, step, count_revealed(state), summarize(samples)});
}

std::vector<EpisodeEvent> ledger_events(const SimulationResult& res,
                                        const PopulationDataset& ds) {
  std::vector<EpisodeEvent> out;
  for (const auto& ev : res.timeline) {
    const ToolSeries& t = ds.tool(ev.tool_id);
    if (ev.inspected)
      out.push_back({ev.tool_id, ActionKind::Inspect, t.x[ev.step - 1]});
    if (ev.action == ActionKind::Replace)
      out.push_back({ev.tool_id, ActionKind::Replace, t.x[ev.step - 1]});
  }
  return out;
}

void settle(SimulationResult& res, const PopulationDataset& ds,
            const ScenarioConfig& sc) {
  res.ledger = settle_ledger(ledger_events(res, ds), res.oracle.km,
                             sc.decision);
}

}  // namespace

FitCache::FitCache(const ScenarioConfig& scenario)
    : likelihood_(scenario.likelihood),
      priors_(scenario.priors),
      sampler_(scenario.sampler),
      seed_(scenario.seed) {}

std::shared_ptr<const PosteriorSamples> FitCache::fit(
    const PopulationDataset& ds) {
  std::uint64_t key = fnv1a64(&likelihood_, sizeof(likelihood_));
  for (const auto& t : ds.tools) {
    key = fnv1a64(&t.tool_id, sizeof(t.tool_id), key);
    key = fnv1a64(t.revealed.data(), t.revealed.size(), key);
  }
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  SamplerConfig cfg = sampler_;
  cfg.seed = derive_key(seed_, "fit", key);
  ModelSpec spec = build_model(Pooling::Partial, likelihood_, priors_, ds);
  auto [samples, diag] = sample(spec, cfg);
  (void)diag;
  ++fits_run_;
  auto sp = std::make_shared<const PosteriorSamples>(std::move(samples));
  cache_.emplace(key, sp);
  return sp;
}

OracleReplacements gold_standard_replacements(const PopulationDataset& ds,
                                              const ScenarioConfig& scenario) {
  scenario.validate(ds);
  PopulationDataset full = ds;
  for (auto& t : full.tools) std::fill(t.revealed.begin(), t.revealed.end(), 1);

  FitCache cache(scenario);
  auto samples = cache.fit(full);

  OracleReplacements orc;
  for (int id : scenario.active_tools) {
    const ToolSeries& t = full.tool(id);
    int n = static_cast<int>(t.size());
    FailureTimeDistribution ftd =
        failure_time(*samples, id, scenario.decision.s_crit);
    int found = 0;
    for (int step = 1; step <= n; ++step) {
      double pf = prob_failure_before(ftd, next_x(t, step, full.step_km));
      if (replacement_triggered(pf, scenario.decision)) {
        found = step;
        break;
      }
    }
    if (found > 0) {
      orc.step[id] = found;
      orc.km[id] = t.x[found - 1];
      orc.end_of_life[id] = false;
    } else {
      orc.step[id] = n;
      orc.km[id] = t.x[n - 1];
      orc.end_of_life[id] = true;
    }
  }
  return orc;
}

SimulationResult run_risk_based(const PopulationDataset& ds,
                                const ScenarioConfig& scenario,
                                const OracleReplacements* oracle) {
  scenario.validate(ds);
  SimulationResult res;
  res.policy = PolicyKind::RiskBased;
  res.mode_used = scenario.exceedance_mode;
  res.decision = scenario.decision;
  res.dataset_hash = dataset_fingerprint(ds);
  res.oracle = oracle ? *oracle : gold_standard_replacements(ds, scenario);

  PopulationDataset base = apply_masks(ds, scenario);
  FitCache cache(scenario);
  record_refit(res.refits, -1, 0, base, *cache.fit(base));

  for (int id : scenario.active_tools) {
    PopulationDataset state = base;  // episodes never share inspections
    const ToolSeries& t = state.tool(id);
    int n = static_cast<int>(t.size());
    int start = first_hidden_step(t);
    bool replaced = false;

    if (start > 0) {
      for (int step = start; step <= n && !replaced; ++step) {
        if (state.tool(id).revealed[static_cast<std::size_t>(step - 1)])
          continue;
        auto cur = cache.fit(state);
        double nx = next_x(t, step, state.step_km);
        double p = exceedance_probability(*cur, id, nx,
                                          scenario.decision.s_crit,
                                          scenario.exceedance_mode)
                       .probability;
        EventRecord ev;
        ev.tool_id = id;
        ev.step = step;
        ev.p_exceed = p;
        ev.eu_nothing = eu_do_nothing(p, scenario.decision);
        ev.eu_inspect = eu_inspect(p, scenario.decision);
        ev.p_fail_next = kNan;
        ev.action = choose_action(p, scenario.decision);

        if (ev.action == ActionKind::Inspect) {
          state.tool(id).revealed[static_cast<std::size_t>(step - 1)] = 1;
          auto updated = cache.fit(state);
          record_refit(res.refits, id, step, state, *updated);
          double pf = prob_failure_before(
              failure_time(*updated, id, scenario.decision.s_crit), nx);
          ev.inspected = true;
          ev.p_fail_next = pf;
          if (replacement_triggered(pf, scenario.decision)) {
            ev.action = ActionKind::Replace;
            replaced = true;
            res.replacement_step[id] = step;
            res.replacement_km[id] = t.x[step - 1];
            res.end_of_life[id] = false;
          }
        }
        res.timeline.push_back(ev);
      }
    }
    if (!replaced) {
      EventRecord ev;
      ev.tool_id = id;
      ev.step = n;
      ev.action = ActionKind::Replace;
      ev.end_of_life = true;
      ev.p_exceed = kNan;
      ev.eu_nothing = kNan;
      ev.eu_inspect = kNan;
      ev.p_fail_next = kNan;
      res.timeline.push_back(ev);
      res.replacement_step[id] = n;
      res.replacement_km[id] = t.x[n - 1];
      res.end_of_life[id] = true;
    }
  }
  settle(res, ds, scenario);
  return res;
}

SimulationResult run_periodic(const PopulationDataset& ds,
                              const ScenarioConfig& scenario,
                              const OracleReplacements* oracle) {
  scenario.validate(ds);
  SimulationResult res;
  res.policy = PolicyKind::Periodic;
  res.mode_used = scenario.exceedance_mode;
  res.decision = scenario.decision;
  res.dataset_hash = dataset_fingerprint(ds);
  res.oracle = oracle ? *oracle : gold_standard_replacements(ds, scenario);

  PopulationDataset base = apply_masks(ds, scenario);
  FitCache cache(scenario);
  record_refit(res.refits, -1, 0, base, *cache.fit(base));

  for (int id : scenario.active_tools) {
    PopulationDataset state = base;
    const ToolSeries& t = state.tool(id);
    int n = static_cast<int>(t.size());
    int start = first_hidden_step(t);
    auto cur = cache.fit(state);
    bool replaced = false;

    // The trigger is re-evaluated at every opportunity with the newest
    // posterior, so a fully revealed series reduces to the oracle rule.
    for (int step = 1; step <= n && !replaced; ++step) {
      EventRecord ev;
      ev.tool_id = id;
      ev.step = step;
      ev.action = ActionKind::DoNothing;
      ev.p_exceed = kNan;
      ev.eu_nothing = kNan;
      ev.eu_inspect = kNan;

      bool hidden = !state.tool(id).revealed[static_cast<std::size_t>(step - 1)];
      // The period-th opportunity after the prefix, then every period:
      // period 1 inspects every step, period > series inspects never.
      bool scheduled = start > 0 && step >= start && hidden &&
                       (step - start + 1) % scenario.periodic_period == 0;
      if (scheduled) {
        state.tool(id).revealed[static_cast<std::size_t>(step - 1)] = 1;
        cur = cache.fit(state);
        record_refit(res.refits, id, step, state, *cur);
        ev.action = ActionKind::Inspect;
        ev.inspected = true;
      }
      double nx = next_x(t, step, state.step_km);
      double pf = prob_failure_before(
          failure_time(*cur, id, scenario.decision.s_crit), nx);
      ev.p_fail_next = pf;
      if (replacement_triggered(pf, scenario.decision)) {
        ev.action = ActionKind::Replace;
        replaced = true;
        res.replacement_step[id] = step;
        res.replacement_km[id] = t.x[step - 1];
        res.end_of_life[id] = false;
      }
      res.timeline.push_back(ev);
    }
    if (!replaced) {
      EventRecord ev;
      ev.tool_id = id;
      ev.step = n;
      ev.action = ActionKind::Replace;
      ev.end_of_life = true;
      ev.p_exceed = kNan;
      ev.eu_nothing = kNan;
      ev.eu_inspect = kNan;
      ev.p_fail_next = kNan;
      res.timeline.push_back(ev);
      res.replacement_step[id] = n;
      res.replacement_km[id] = t.x[n - 1];
      res.end_of_life[id] = true;
    }
  }
  settle(res, ds, scenario);
  return res;
}

CostLedger recount_ledger(const SimulationResult& r) {
  CostLedger led;
  for (const auto& e : r.timeline)
    if (e.inspected) ++led.inspections;
  led.inspection_cost =
      static_cast<double>(led.inspections) * r.decision.c_inspection;
  for (const auto& [tool, km] : r.replacement_km) {
    auto it = r.oracle.km.find(tool);
    if (it == r.oracle.km.end())
      throw ConfigError("tool " + std::to_string(tool) +
                        " has no oracle replacement");
    if (km > it->second)
      led.damage_cost += late_replacement_cost(km, it->second, r.decision);
    else
      led.wasted_life_cost += wasted_life_cost(km, it->second, r.decision);
  }
  led.total = led.inspection_cost + led.wasted_life_cost + led.damage_cost;
  return led;
}

PolicyComparison compare(const std::vector<SimulationResult>& results,
                         const OracleReplacements& oracle) {
  if (results.size() < 2)
    throw ConfigError("comparison needs at least two policy results");
  for (const auto& r : results)
    if (r.dataset_hash != results.front().dataset_hash)
      throw ConfigError("results come from different datasets");

  PolicyComparison cmp;
  double first_total = results.front().ledger.total;
  for (const auto& r : results) {
    ComparisonRow row;
    row.policy = r.policy;
    row.inspections = r.ledger.inspections;
    row.inspection_cost = r.ledger.inspection_cost;
    row.wasted_life_cost = r.ledger.wasted_life_cost;
    row.damage_cost = r.ledger.damage_cost;
    row.total = r.ledger.total;
    row.reduction_pct =
        first_total > 0.0 ? (first_total - r.ledger.total) / first_total * 100.0
                          : 0.0;
    for (const auto& [tool, step] : r.replacement_step) {
      auto it = oracle.step.find(tool);
      if (it != oracle.step.end()) row.discrepancy_steps[tool] = step - it->second;
    }
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

}  // namespace toolwear
