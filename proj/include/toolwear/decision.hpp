#pragma once

#include <map>
#include <string>
#include <vector>

#include "toolwear/types.hpp"

namespace toolwear {

// Everything is a nonnegative cost and decisions minimize expected cost;
// c_workpiece is the damage cost of machining past s_crit.
struct DecisionParams {
  double s_crit = 0.9;
  double c_inspection = 0.05;
  double c_tool = 0.25;
  double c_workpiece = 1.0;
  // Alternative accounting that charges the used fraction of tool life
  // instead of the forfeited fraction; kept for sensitivity runs.
  bool charge_used_life = false;

  double alpha() const { return c_tool / c_workpiece; }
  void validate() const;
};

enum class ActionKind { DoNothing, Inspect, Replace };

const char* to_string(ActionKind a);
ActionKind action_from_string(const std::string& s);

struct CostLedger {
  Index inspections = 0;
  double inspection_cost = 0.0;
  double wasted_life_cost = 0.0;
  double damage_cost = 0.0;
  double total = 0.0;
};

// Expected cost of inaction: p * c_workpiece.
double eu_do_nothing(double p_exceed_next, const DecisionParams& params);

// Expected cost of inspecting now: c_tool * p + c_inspection.
double eu_inspect(double p_exceed_next, const DecisionParams& params);

// Argmin over {DoNothing, Inspect}; ties go to DoNothing.
ActionKind choose_action(double p_exceed_next, const DecisionParams& params);

// Replace at the earliest time the failure probability reaches
// alpha = c_tool / c_workpiece.
bool replacement_triggered(double p_fail_before, const DecisionParams& params);

// Cost of the life forfeited by replacing at t_replacement <= t_optimal.
double wasted_life_cost(double t_replacement, double t_optimal,
                        const DecisionParams& params);

// Damage cost when replacement happens after the optimal time.
double late_replacement_cost(double t_replacement, double t_optimal,
                             const DecisionParams& params);

struct EpisodeEvent {
  int tool_id = 0;
  ActionKind action{};
  double time = 0.0;  // km
};

// Tally inspections and replacement timing against per-tool optima.
// Requires exactly one Replace per tool that appears in t_optimal.
CostLedger settle_ledger(const std::vector<EpisodeEvent>& events,
                         const std::map<int, double>& t_optimal,
                         const DecisionParams& params);

}  // namespace toolwear
