#include "toolwear/decision.hpp"

#include <string>

#include "toolwear/errors.hpp"

namespace toolwear {

void DecisionParams::validate() const {
  if (!(s_crit > 0.0)) throw ConfigError("s_crit must be > 0");
  if (c_inspection < 0.0 || c_tool < 0.0)
    throw ConfigError("costs must be >= 0");
  if (!(c_workpiece > 0.0)) throw ConfigError("c_workpiece must be > 0");
}

const char* to_string(ActionKind a) {
  switch (a) {
    case ActionKind::DoNothing: return "do_nothing";
    case ActionKind::Inspect: return "inspect";
    case ActionKind::Replace: return "replace";
  }
  return "?";
}

ActionKind action_from_string(const std::string& s) {
  if (s == "do_nothing") return ActionKind::DoNothing;
  if (s == "inspect") return ActionKind::Inspect;
  if (s == "replace") return ActionKind::Replace;
  throw ConfigError("unknown action '" + s + "'");
}

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("probability outside [0, 1]");
}

}  // namespace

double eu_do_nothing(double p_exceed_next, const DecisionParams& params) {
  check_probability(p_exceed_next);
  return p_exceed_next * params.c_workpiece;
}

double eu_inspect(double p_exceed_next, const DecisionParams& params) {
  check_probability(p_exceed_next);
  return params.c_tool * p_exceed_next + params.c_inspection;
}

ActionKind choose_action(double p_exceed_next, const DecisionParams& params) {
  return eu_inspect(p_exceed_next, params) < eu_do_nothing(p_exceed_next, params)
             ? ActionKind::Inspect
             : ActionKind::DoNothing;
}

bool replacement_triggered(double p_fail_before, const DecisionParams& params) {
  check_probability(p_fail_before);
  return p_fail_before >= params.alpha();
}

double wasted_life_cost(double t_replacement, double t_optimal,
                        const DecisionParams& params) {
  if (!(t_optimal > 0.0) || !(t_replacement > 0.0))
    throw ConfigError("replacement times must be > 0");
  if (t_replacement > t_optimal)
    throw ConfigError("late replacement carries damage cost, not wasted life");
  if (params.charge_used_life)
    return params.c_tool * t_replacement / t_optimal;
  return params.c_tool * (t_optimal - t_replacement) / t_optimal;
}

double late_replacement_cost(double t_replacement, double t_optimal,
                             const DecisionParams& params) {
  if (!(t_optimal > 0.0) || !(t_replacement > 0.0))
    throw ConfigError("replacement times must be > 0");
  return t_replacement > t_optimal ? params.c_workpiece : 0.0;
}

CostLedger settle_ledger(const std::vector<EpisodeEvent>& events,
                         const std::map<int, double>& t_optimal,
                         const DecisionParams& params) {
  CostLedger ledger;
  std::map<int, int> replacements;
  for (const auto& e : events) {
    switch (e.action) {
      case ActionKind::Inspect:
        ++ledger.inspections;
        break;
      case ActionKind::Replace: {
        auto it = t_optimal.find(e.tool_id);
        if (it == t_optimal.end())
          throw ConfigError("no optimal replacement time for tool " +
                            std::to_string(e.tool_id));
        if (++replacements[e.tool_id] > 1)
          throw ConfigError("multiple replacements for tool " +
                            std::to_string(e.tool_id));
        if (e.time > it->second)
          ledger.damage_cost += late_replacement_cost(e.time, it->second, params);
        else
          ledger.wasted_life_cost += wasted_life_cost(e.time, it->second, params);
        break;
      }
      case ActionKind::DoNothing:
        break;
    }
  }
  for (const auto& [tool, t_opt] : t_optimal) {
    (void)t_opt;
    if (replacements.find(tool) == replacements.end())
      throw ConfigError("missing replacement event for tool " +
                        std::to_string(tool));
  }
  ledger.inspection_cost =
      static_cast<double>(ledger.inspections) * params.c_inspection;
  ledger.total =
      ledger.inspection_cost + ledger.wasted_life_cost + ledger.damage_cost;
  return ledger;
}

}  // namespace toolwear
