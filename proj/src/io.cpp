#include "toolwear/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "toolwear/errors.hpp"
#include "toolwear/rng.hpp"

namespace toolwear {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed on " + path);
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

std::uint64_t config_hash(const std::string& text) {
  return fnv1a64(text.data(), text.size());
}

namespace {

std::string hex_u64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex_u64(const std::string& s, const char* field) {
  std::string_view sv = s;
  if (sv.rfind("0x", 0) == 0) sv.remove_prefix(2);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v, 16);
  if (ec != std::errc() || p != sv.data() + sv.size())
    throw ConfigError(std::string("field '") + field + "': bad hash '" + s +
                      "'");
  return v;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

[[noreturn]] void bad_field(const char* key, const char* need) {
  throw ConfigError(std::string("field '") + key + "' must be " + need);
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num_or(const json& j, const char* key, double dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_number()) bad_field(key, "a number");
  return f->get<double>();
}

int int_or(const json& j, const char* key, int dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_number_integer()) bad_field(key, "an integer");
  return f->get<int>();
}

bool bool_or(const json& j, const char* key, bool dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_boolean()) bad_field(key, "a boolean");
  return f->get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_string()) bad_field(key, "a string");
  return f->get<std::string>();
}

std::uint64_t u64_or(const json& j, const char* key, std::uint64_t dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_number_unsigned()) {
    // Signed storage: anything negative is out; values above INT64_MAX are
    // stored unsigned, so the signed read cannot wrap here.
    if (!f->is_number_integer() || f->get<std::int64_t>() < 0)
      bad_field(key, "a nonnegative integer");
  }
  return f->get<std::uint64_t>();
}

std::vector<int> int_list_or(const json& j, const char* key,
                             std::vector<int> dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_array()) bad_field(key, "an array of integers");
  std::vector<int> out;
  for (const auto& e : *f) {
    if (!e.is_number_integer()) bad_field(key, "an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

json nan_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double null_nan(const json& j, const char* key) {
  const json* f = find(j, key);
  if (!f || f->is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!f->is_number()) bad_field(key, "a number or null");
  return f->get<double>();
}

const char* mode_to_string(ExceedanceMode m) {
  return m == ExceedanceMode::LatentOnly ? "latent" : "with_noise";
}

ExceedanceMode mode_from_string(const std::string& s) {
  if (s == "latent") return ExceedanceMode::LatentOnly;
  if (s == "with_noise") return ExceedanceMode::WithNoise;
  throw ConfigError("unknown exceedance mode '" + s +
                    "' (latent|with_noise)");
}

const char* algorithm_to_string(HmcAlgorithm a) {
  return a == HmcAlgorithm::Nuts ? "nuts" : "static";
}

HmcAlgorithm algorithm_from_string(const std::string& s) {
  if (s == "nuts") return HmcAlgorithm::Nuts;
  if (s == "static") return HmcAlgorithm::Static;
  throw ConfigError("unknown algorithm '" + s + "' (nuts|static)");
}

json priors_to_json(const PriorConfig& priors) {
  json j;
  if (const auto* c = std::get_if<CauchyHierPriors>(&priors)) {
    j["family"] = "cauchy";
    j["gamma_shape"] = c->gamma_shape;
    j["gamma_scale"] = c->gamma_scale;
    j["s_sigma_m"] = c->s_sigma_m;
    j["mu_c_mean"] = c->mu_c_mean;
    j["mu_c_sd"] = c->mu_c_sd;
    j["s_sigma_c"] = c->s_sigma_c;
    j["gamma_noise_scale"] = c->gamma_noise_scale;
  } else {
    const auto& g = std::get<GaussianHierPriors>(priors);
    j["family"] = "gaussian";
    j["m_alpha"] = {g.m_alpha[0], g.m_alpha[1]};
    j["s_alpha"] = {g.s_alpha[0], g.s_alpha[1]};
    j["a"] = g.a;
    j["b"] = g.b;
    j["noise_scale"] = g.noise_scale;
  }
  return j;
}

std::array<double, 2> pair_or(const json& j, const char* key,
                              std::array<double, 2> dflt) {
  const json* f = find(j, key);
  if (!f) return dflt;
  if (!f->is_array() || f->size() != 2 || !(*f)[0].is_number() ||
      !(*f)[1].is_number())
    bad_field(key, "an array of two numbers");
  return {(*f)[0].get<double>(), (*f)[1].get<double>()};
}

PriorConfig priors_from_json(const json& j, Likelihood fallback) {
  std::string family = str_or(j, "family", "");
  if (family.empty()) {
    if (find(j, "m_alpha") || find(j, "s_alpha") || find(j, "a") ||
        find(j, "b"))
      family = "gaussian";
    else if (find(j, "gamma_shape") || find(j, "gamma_scale") ||
             find(j, "s_sigma_m") || find(j, "gamma_noise_scale"))
      family = "cauchy";
    else
      family = fallback == Likelihood::Gaussian ? "gaussian" : "cauchy";
  }
  if (family == "cauchy") {
    CauchyHierPriors c;
    c.gamma_shape = num_or(j, "gamma_shape", c.gamma_shape);
    c.gamma_scale = num_or(j, "gamma_scale", c.gamma_scale);
    c.s_sigma_m = num_or(j, "s_sigma_m", c.s_sigma_m);
    c.mu_c_mean = num_or(j, "mu_c_mean", c.mu_c_mean);
    c.mu_c_sd = num_or(j, "mu_c_sd", c.mu_c_sd);
    c.s_sigma_c = num_or(j, "s_sigma_c", c.s_sigma_c);
    c.gamma_noise_scale = num_or(j, "gamma_noise_scale", c.gamma_noise_scale);
    return c;
  }
  if (family == "gaussian") {
    GaussianHierPriors g;
    g.m_alpha = pair_or(j, "m_alpha", g.m_alpha);
    g.s_alpha = pair_or(j, "s_alpha", g.s_alpha);
    g.a = num_or(j, "a", g.a);
    g.b = num_or(j, "b", g.b);
    g.noise_scale = num_or(j, "noise_scale", g.noise_scale);
    return g;
  }
  throw ConfigError("unknown prior family '" + family +
                    "' (cauchy|gaussian)");
}

json sampler_to_json(const SamplerConfig& c) {
  json j;
  j["warmup"] = c.warmup;
  j["draws"] = c.draws;
  j["chains"] = c.chains;
  j["target_accept"] = c.target_accept;
  j["max_tree_depth"] = c.max_tree_depth;
  j["init_jitter"] = c.init_jitter;
  j["algorithm"] = algorithm_to_string(c.algorithm);
  j["static_steps"] = c.static_steps;
  j["threads"] = c.threads;
  return j;
}

SamplerConfig sampler_from_json(const json& j) {
  SamplerConfig c;
  c.warmup = int_or(j, "warmup", c.warmup);
  c.draws = int_or(j, "draws", c.draws);
  c.chains = int_or(j, "chains", c.chains);
  c.target_accept = num_or(j, "target_accept", c.target_accept);
  c.max_tree_depth = int_or(j, "max_tree_depth", c.max_tree_depth);
  c.init_jitter = num_or(j, "init_jitter", c.init_jitter);
  c.algorithm = algorithm_from_string(str_or(j, "algorithm", "nuts"));
  c.static_steps = int_or(j, "static_steps", c.static_steps);
  c.threads = int_or(j, "threads", c.threads);
  return c;
}

json decision_to_json(const DecisionParams& d) {
  json j;
  j["s_crit"] = d.s_crit;
  j["c_inspection"] = d.c_inspection;
  j["c_tool"] = d.c_tool;
  j["c_workpiece"] = d.c_workpiece;
  j["charge_used_life"] = d.charge_used_life;
  return j;
}

DecisionParams decision_from_json(const json& j) {
  DecisionParams d;
  d.s_crit = num_or(j, "s_crit", d.s_crit);
  d.c_inspection = num_or(j, "c_inspection", d.c_inspection);
  d.c_tool = num_or(j, "c_tool", d.c_tool);
  d.c_workpiece = num_or(j, "c_workpiece", d.c_workpiece);
  d.charge_used_life = bool_or(j, "charge_used_life", d.charge_used_life);
  return d;
}

json synthetic_to_json_obj(const SyntheticConfig& c) {
  json j;
  j["n_tools"] = c.n_tools;
  j["n_steps"] = c.n_steps;
  j["step_km"] = c.step_km;
  j["true_mu_m"] = c.true_mu_m;
  j["true_sigma_m"] = c.true_sigma_m;
  j["true_mu_c"] = c.true_mu_c;
  j["true_sigma_c"] = c.true_sigma_c;
  j["noise_gamma"] = c.noise_gamma;
  j["noise_bound"] = c.noise_bound;
  j["seed"] = c.seed;
  return j;
}

SyntheticConfig synthetic_from_json_obj(const json& j,
                                        std::uint64_t default_seed) {
  SyntheticConfig c;
  c.n_tools = int_or(j, "n_tools", c.n_tools);
  c.n_steps = int_or(j, "n_steps", c.n_steps);
  c.step_km = num_or(j, "step_km", c.step_km);
  c.true_mu_m = num_or(j, "true_mu_m", c.true_mu_m);
  c.true_sigma_m = num_or(j, "true_sigma_m", c.true_sigma_m);
  c.true_mu_c = num_or(j, "true_mu_c", c.true_mu_c);
  c.true_sigma_c = num_or(j, "true_sigma_c", c.true_sigma_c);
  c.noise_gamma = num_or(j, "noise_gamma", c.noise_gamma);
  c.noise_bound = num_or(j, "noise_bound", c.noise_bound);
  c.seed = u64_or(j, "seed", default_seed);
  return c;
}

template <class T>
json int_map_to_json(const std::map<int, T>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

template <class T>
std::map<int, T> int_map_from_json(const json& j, const char* key) {
  std::map<int, T> out;
  const json* f = find(j, key);
  if (!f) return out;
  if (!f->is_object()) bad_field(key, "an object keyed by tool id");
  for (auto it = f->begin(); it != f->end(); ++it) {
    int id = 0;
    const std::string& k = it.key();
    auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), id);
    if (ec != std::errc() || p != k.data() + k.size())
      bad_field(key, "an object keyed by tool id");
    out[id] = it.value().get<T>();
  }
  return out;
}

// Linear-interpolation quantile on an unsorted copy.
double quantile(VecXd v, double p) {
  std::sort(v.data(), v.data() + v.size());
  if (v.size() == 1) return v[0];
  double h = p * static_cast<double>(v.size() - 1);
  Index lo = static_cast<Index>(std::floor(h));
  if (lo >= v.size() - 1) return v[v.size() - 1];
  double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

std::string synthetic_config_to_json(const SyntheticConfig& c) {
  return synthetic_to_json_obj(c).dump(2) + "\n";
}

SyntheticConfig synthetic_config_from_json(const std::string& text) {
  json j = parse_json(text, "synthetic config");
  if (!j.is_object()) throw ConfigError("synthetic config must be an object");
  return synthetic_from_json_obj(j, 0);
}

PriorConfig priors_config_from_json(const std::string& text,
                                    Likelihood fallback) {
  json j = parse_json(text, "prior config");
  if (!j.is_object()) throw ConfigError("prior config must be an object");
  return priors_from_json(j, fallback);
}

std::string ground_truth_to_json(const GroundTruth& t) {
  json j;
  j["tool_ids"] = t.tool_ids;
  std::vector<double> m(t.m.data(), t.m.data() + t.m.size());
  std::vector<double> c(t.c.data(), t.c.data() + t.c.size());
  j["m"] = m;
  j["c"] = c;
  return j.dump(2) + "\n";
}

SimulateSpec simulate_spec_from_json(const std::string& text) {
  json j = parse_json(text, "scenario config");
  if (!j.is_object()) throw ConfigError("scenario config must be an object");
  SimulateSpec s;
  std::uint64_t seed = u64_or(j, "seed", 0);

  if (const json* f = find(j, "dataset_csv")) {
    if (!f->is_string()) bad_field("dataset_csv", "a string");
    s.dataset_csv = f->get<std::string>();
  }
  if (const json* f = find(j, "synthetic")) {
    if (!f->is_object()) bad_field("synthetic", "an object");
    s.synthetic = synthetic_from_json_obj(*f, seed);
  }
  if (s.dataset_csv && s.synthetic)
    throw ConfigError("give either dataset_csv or synthetic, not both");
  if (!s.dataset_csv && !s.synthetic)
    throw ConfigError("scenario config needs dataset_csv or synthetic");

  ScenarioConfig& sc = s.scenario;
  sc.seed = seed;
  if (const json* f = find(j, "scenario")) {
    if (!f->is_object()) bad_field("scenario", "an object");
    sc.historic_tools = int_list_or(*f, "historic_tools", {});
    sc.active_tools = int_list_or(*f, "active_tools", {});
    sc.active_prefix = int_or(*f, "active_prefix", sc.active_prefix);
    sc.periodic_period = int_or(*f, "periodic_period", sc.periodic_period);
    sc.exceedance_mode =
        mode_from_string(str_or(*f, "exceedance_mode", "latent"));
    sc.likelihood =
        likelihood_from_string(str_or(*f, "likelihood", "cauchy"));
    if (const json* pj = find(*f, "priors"))
      sc.priors = priors_from_json(*pj, sc.likelihood);
    else
      sc.priors = priors_from_json(json::object(), sc.likelihood);
  } else {
    throw ConfigError("scenario config needs a scenario object");
  }
  if (const json* f = find(j, "sampler")) {
    if (!f->is_object()) bad_field("sampler", "an object");
    sc.sampler = sampler_from_json(*f);
  }
  if (const json* f = find(j, "decision")) {
    if (!f->is_object()) bad_field("decision", "an object");
    sc.decision = decision_from_json(*f);
  }
  if (const json* f = find(j, "policies")) {
    if (!f->is_array()) bad_field("policies", "an array of policy names");
    s.policies.clear();
    for (const auto& e : *f) {
      if (!e.is_string()) bad_field("policies", "an array of policy names");
      s.policies.push_back(policy_from_string(e.get<std::string>()));
    }
  }
  return s;
}

std::string simulate_spec_to_json(const SimulateSpec& s) {
  json j;
  j["seed"] = s.scenario.seed;
  if (s.dataset_csv) j["dataset_csv"] = *s.dataset_csv;
  if (s.synthetic) j["synthetic"] = synthetic_to_json_obj(*s.synthetic);
  json sc;
  sc["historic_tools"] = s.scenario.historic_tools;
  sc["active_tools"] = s.scenario.active_tools;
  sc["active_prefix"] = s.scenario.active_prefix;
  sc["periodic_period"] = s.scenario.periodic_period;
  sc["exceedance_mode"] = mode_to_string(s.scenario.exceedance_mode);
  sc["likelihood"] = to_string(s.scenario.likelihood);
  sc["priors"] = priors_to_json(s.scenario.priors);
  j["scenario"] = sc;
  j["sampler"] = sampler_to_json(s.scenario.sampler);
  j["decision"] = decision_to_json(s.scenario.decision);
  json pol = json::array();
  for (PolicyKind p : s.policies) pol.push_back(to_string(p));
  j["policies"] = pol;
  return j.dump(2) + "\n";
}

std::string simulation_result_to_json(const SimulationResult& r) {
  json j;
  j["schema"] = 1;
  j["policy"] = to_string(r.policy);
  j["exceedance_mode"] = mode_to_string(r.mode_used);
  j["dataset_hash"] = hex_u64(r.dataset_hash);
  j["decision"] = decision_to_json(r.decision);

  json orc;
  orc["step"] = int_map_to_json(r.oracle.step);
  orc["km"] = int_map_to_json(r.oracle.km);
  orc["end_of_life"] = int_map_to_json(r.oracle.end_of_life);
  j["oracle"] = orc;

  j["replacement_step"] = int_map_to_json(r.replacement_step);
  j["replacement_km"] = int_map_to_json(r.replacement_km);
  j["end_of_life"] = int_map_to_json(r.end_of_life);

  json led;
  led["inspections"] = r.ledger.inspections;
  led["inspection_cost"] = r.ledger.inspection_cost;
  led["wasted_life_cost"] = r.ledger.wasted_life_cost;
  led["damage_cost"] = r.ledger.damage_cost;
  led["total"] = r.ledger.total;
  j["ledger"] = led;

  json tl = json::array();
  for (const auto& e : r.timeline) {
    json ev;
    ev["tool"] = e.tool_id;
    ev["step"] = e.step;
    ev["action"] = to_string(e.action);
    ev["inspected"] = e.inspected;
    ev["end_of_life"] = e.end_of_life;
    ev["p_exceed"] = nan_null(e.p_exceed);
    ev["eu_nothing"] = nan_null(e.eu_nothing);
    ev["eu_inspect"] = nan_null(e.eu_inspect);
    ev["p_fail_next"] = nan_null(e.p_fail_next);
    tl.push_back(ev);
  }
  j["timeline"] = tl;

  json rf = json::array();
  for (const auto& f : r.refits) {
    json o;
    o["tool"] = f.tool_id;
    o["step"] = f.step;
    o["n_revealed"] = f.n_revealed;
    json ps = json::array();
    for (const auto& p : f.params) {
      json po;
      po["name"] = p.name;
      po["mean"] = p.mean;
      po["sd"] = p.sd;
      ps.push_back(po);
    }
    o["params"] = ps;
    rf.push_back(o);
  }
  j["refits"] = rf;
  return j.dump(2) + "\n";
}

SimulationResult simulation_result_from_json(const std::string& text) {
  json j = parse_json(text, "result file");
  if (!j.is_object()) throw ConfigError("result file must be an object");
  if (int_or(j, "schema", 0) != 1)
    throw ConfigError("unsupported result schema version");

  SimulationResult r;
  r.policy = policy_from_string(str_or(j, "policy", "risk_based"));
  r.mode_used = mode_from_string(str_or(j, "exceedance_mode", "latent"));
  r.dataset_hash =
      parse_hex_u64(str_or(j, "dataset_hash", "0x0"), "dataset_hash");
  if (const json* f = find(j, "decision")) r.decision = decision_from_json(*f);

  if (const json* f = find(j, "oracle")) {
    r.oracle.step = int_map_from_json<int>(*f, "step");
    r.oracle.km = int_map_from_json<double>(*f, "km");
    r.oracle.end_of_life = int_map_from_json<bool>(*f, "end_of_life");
  }
  r.replacement_step = int_map_from_json<int>(j, "replacement_step");
  r.replacement_km = int_map_from_json<double>(j, "replacement_km");
  r.end_of_life = int_map_from_json<bool>(j, "end_of_life");

  if (const json* f = find(j, "ledger")) {
    r.ledger.inspections = int_or(*f, "inspections", 0);
    r.ledger.inspection_cost = num_or(*f, "inspection_cost", 0.0);
    r.ledger.wasted_life_cost = num_or(*f, "wasted_life_cost", 0.0);
    r.ledger.damage_cost = num_or(*f, "damage_cost", 0.0);
    r.ledger.total = num_or(*f, "total", 0.0);
  }

  if (const json* f = find(j, "timeline")) {
    if (!f->is_array()) bad_field("timeline", "an array");
    for (const auto& ej : *f) {
      EventRecord e;
      e.tool_id = int_or(ej, "tool", 0);
      e.step = int_or(ej, "step", 0);
      e.action = action_from_string(str_or(ej, "action", "do_nothing"));
      e.inspected = bool_or(ej, "inspected", false);
      e.end_of_life = bool_or(ej, "end_of_life", false);
      e.p_exceed = null_nan(ej, "p_exceed");
      e.eu_nothing = null_nan(ej, "eu_nothing");
      e.eu_inspect = null_nan(ej, "eu_inspect");
      e.p_fail_next = null_nan(ej, "p_fail_next");
      r.timeline.push_back(e);
    }
  }

  if (const json* f = find(j, "refits")) {
    if (!f->is_array()) bad_field("refits", "an array");
    for (const auto& fj : *f) {
      RefitRecord rec;
      rec.tool_id = int_or(fj, "tool", 0);
      rec.step = int_or(fj, "step", 0);
      rec.n_revealed = int_or(fj, "n_revealed", 0);
      if (const json* ps = find(fj, "params")) {
        for (const auto& pj : *ps)
          rec.params.push_back({str_or(pj, "name", ""),
                                num_or(pj, "mean", 0.0),
                                num_or(pj, "sd", 0.0)});
      }
      r.refits.push_back(std::move(rec));
    }
  }
  return r;
}

std::string comparison_csv(const PolicyComparison& cmp) {
  std::set<int> tools;
  for (const auto& row : cmp.rows)
    for (const auto& [id, d] : row.discrepancy_steps) tools.insert(id);

  std::string out =
      "policy,inspections,inspection_cost,wasted_life_cost,damage_cost,"
      "total,reduction_pct";
  for (int id : tools) out += ",discrepancy_" + std::to_string(id);
  out += "\n";
  for (const auto& row : cmp.rows) {
    out += to_string(row.policy);
    out += "," + std::to_string(row.inspections);
    out += "," + fmt_double(row.inspection_cost);
    out += "," + fmt_double(row.wasted_life_cost);
    out += "," + fmt_double(row.damage_cost);
    out += "," + fmt_double(row.total);
    out += "," + fmt_double(row.reduction_pct);
    for (int id : tools) {
      auto it = row.discrepancy_steps.find(id);
      out += ",";
      if (it != row.discrepancy_steps.end())
        out += std::to_string(it->second);
    }
    out += "\n";
  }
  return out;
}

namespace {

std::string fmt_cost(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string comparison_markdown(const PolicyComparison& cmp) {
  bool reduction = cmp.rows.size() > 1;
  std::string out =
      "| policy | inspections | inspection cost | wasted-life cost | damage "
      "cost | total |";
  if (reduction) out += " % reduction |";
  out += "\n|---|---|---|---|---|---|";
  if (reduction) out += "---|";
  out += "\n";
  for (const auto& row : cmp.rows) {
    out += "| ";
    out += to_string(row.policy);
    out += " | " + std::to_string(row.inspections);
    out += " | " + fmt_cost(row.inspection_cost);
    out += " | " + fmt_cost(row.wasted_life_cost);
    out += " | " + fmt_cost(row.damage_cost);
    out += " | " + fmt_cost(row.total);
    if (reduction) out += " | " + fmt_cost(row.reduction_pct);
    out += " |\n";
  }
  return out;
}

void write_draws_csv(const std::string& path, const PosteriorSamples& s) {
  std::string out = "chain,iter";
  for (const auto& p : s.layout) out += "," + p.name;
  out += "\n";
  for (Index c = 0; c < s.n_chains(); ++c) {
    const MatXd& m = s.chains[static_cast<std::size_t>(c)];
    for (Index d = 0; d < m.rows(); ++d) {
      out += std::to_string(c + 1);
      out += "," + std::to_string(d + 1);
      for (Index p = 0; p < m.cols(); ++p) out += "," + fmt_double(m(d, p));
      out += "\n";
    }
  }
  write_text_file(path, out);
}

DrawsTable read_draws_csv(const std::string& path) {
  std::string text = read_text_file(path);
  DrawsTable t;
  std::size_t pos = 0, line_no = 0;
  std::vector<std::vector<double>> rows;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty()) {
      std::vector<std::string_view> fields;
      std::size_t start = 0;
      while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      if (line_no == 1) {
        if (fields.size() < 3 || fields[0] != "chain" || fields[1] != "iter")
          throw IoError(path + ": line 1: expected chain,iter,<params>");
        for (std::size_t i = 2; i < fields.size(); ++i)
          t.columns.emplace_back(fields[i]);
      } else {
        if (fields.size() != t.columns.size() + 2)
          throw IoError(path + ": line " + std::to_string(line_no) +
                        ": wrong field count");
        auto parse_i = [&](std::string_view f) {
          int v = 0;
          auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
          if (ec != std::errc() || p != f.data() + f.size())
            throw IoError(path + ": line " + std::to_string(line_no) +
                          ": bad integer '" + std::string(f) + "'");
          return v;
        };
        t.chain.push_back(parse_i(fields[0]));
        t.iter.push_back(parse_i(fields[1]));
        std::vector<double> row;
        for (std::size_t i = 2; i < fields.size(); ++i) {
          double v = 0.0;
          auto [p, ec] =
              std::from_chars(fields[i].data(),
                              fields[i].data() + fields[i].size(), v);
          if (ec != std::errc() || p != fields[i].data() + fields[i].size())
            throw IoError(path + ": line " + std::to_string(line_no) +
                          ": bad number '" + std::string(fields[i]) + "'");
          row.push_back(v);
        }
        rows.push_back(std::move(row));
      }
    }
    pos = end + 1;
  }
  if (t.columns.empty()) throw IoError(path + ": empty draw file");
  t.values.resize(static_cast<Index>(rows.size()),
                  static_cast<Index>(t.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return t;
}

std::string fit_summary_json(const PosteriorSamples& s, const Diagnostics& d) {
  json j;
  j["chains"] = s.n_chains();
  j["draws_per_chain"] = s.n_draws();
  j["seed"] = s.seed;
  j["divergences"] = d.divergences;
  j["mean_accept"] = d.mean_accept;
  j["max_depth_hits"] = d.max_depth_hits;
  j["step_size"] = d.step_size;

  json ps = json::array();
  for (Index p = 0; p < s.n_params(); ++p) {
    VecXd v = s.stacked(p);
    double mean = v.mean();
    double sd = v.size() > 1
                    ? std::sqrt((v.array() - mean).square().sum() /
                                static_cast<double>(v.size() - 1))
                    : 0.0;
    json po;
    po["name"] = s.layout[static_cast<std::size_t>(p)].name;
    po["mean"] = mean;
    po["sd"] = sd;
    po["q05"] = quantile(v, 0.05);
    po["q95"] = quantile(v, 0.95);
    po["rhat"] = p < d.rhat.size() ? nan_null(d.rhat[p]) : json(nullptr);
    po["ess_bulk"] =
        p < d.ess_bulk.size() ? nan_null(d.ess_bulk[p]) : json(nullptr);
    ps.push_back(po);
  }
  j["params"] = ps;
  return j.dump(2) + "\n";
}

void write_forecast_csv(const std::string& path,
                        const std::vector<Forecast>& forecasts) {
  std::string out = "tool_id,x,mean,q05,q50,q95\n";
  for (const auto& f : forecasts) {
    const MatXd& draws =
        f.predictive_draws ? *f.predictive_draws : f.latent_draws;
    for (Index i = 0; i < f.x_grid.size(); ++i) {
      VecXd col = draws.col(i);
      out += std::to_string(f.tool_id);
      out += "," + fmt_double(f.x_grid[i]);
      out += "," + fmt_double(col.mean());
      out += "," + fmt_double(quantile(col, 0.05));
      out += "," + fmt_double(quantile(col, 0.50));
      out += "," + fmt_double(quantile(col, 0.95));
      out += "\n";
    }
  }
  write_text_file(path, out);
}

std::string manifest_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config_hash"] = hex_u64(m.config_hash);
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["duration_s"] = m.duration_s;
  return j.dump(2) + "\n";
}

}  // namespace toolwear
