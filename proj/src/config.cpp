#include "ringmpc/config.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ringmpc {

namespace {

using nlohmann::json;

// Object reader that tracks which keys were consumed; leftovers are errors,
// so typos never pass silently.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object())
      throw ConfigError(where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw type_error(key, "a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw type_error(key, "an integer");
    return v.get<int>();
  }

  std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw type_error(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw type_error(key, "a boolean");
    return v.get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw type_error(key, "a string");
    return v.get<std::string>();
  }

  std::string require_text(const char* key) {
    if (!has(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return text(key, "");
  }

  std::vector<int> int_list(const char* key) {
    std::vector<int> out;
    if (!has(key)) return out;
    const json& v = raw(key);
    if (!v.is_array()) throw type_error(key, "an array of integers");
    for (const json& e : v) {
      if (!e.is_number_integer()) throw type_error(key, "an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  const json* child(const char* key) {
    if (!has(key)) return nullptr;
    return &raw(key);
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

 private:
  ConfigError type_error(const char* key, const char* what) const {
    return ConfigError(where_ + "." + key + ": expected " + what);
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

AlgorithmSpec algorithm_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  const std::string name = o.require_text("name");
  std::optional<int> iterations;
  if (o.has("iterations")) iterations = o.integer("iterations", 0);
  o.finish();
  try {
    return AlgorithmSpec::from_name(name, iterations);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j, const std::string& where) {
  ScenarioConfig cfg;
  Obj o(j, where);

  if (const json* g = o.child("geometry")) {
    Obj og(*g, o.path("geometry"));
    cfg.geometry.circumference =
        og.number("circumference", cfg.geometry.circumference);
    cfg.geometry.vehicle_count =
        og.integer("vehicle_count", cfg.geometry.vehicle_count);
    og.finish();
  }
  if (const json* a = o.child("algorithm"))
    cfg.algorithm = algorithm_from_json(*a, o.path("algorithm"));
  if (const json* u = o.child("utility")) {
    Obj ou(*u, o.path("utility"));
    UtilityParams& p = cfg.utility;
    p.v_star = ou.number("v_star", p.v_star);
    p.kappa1 = ou.number("kappa1", p.kappa1);
    p.kappa2_v = ou.number("kappa2_v", p.kappa2_v);
    p.kappa2_0 = ou.number("kappa2_0", p.kappa2_0);
    p.kappa3_c = ou.number("kappa3_c", p.kappa3_c);
    p.kappa3_v = ou.number("kappa3_v", p.kappa3_v);
    p.kappa3_d = ou.number("kappa3_d", p.kappa3_d);
    p.w1 = ou.number("w1", p.w1);
    p.w2 = ou.number("w2", p.w2);
    p.w3_g = ou.number("w3_g", p.w3_g);
    p.w3_c = ou.number("w3_c", p.w3_c);
    ou.finish();
  }
  if (const json* v = o.child("vehicle")) {
    Obj ov(*v, o.path("vehicle"));
    VehicleParams& p = cfg.vehicle;
    p.length = ov.number("length", p.length);
    p.dt = ov.number("dt", p.dt);
    p.gamma = ov.number("gamma", p.gamma);
    p.u_min = ov.number("u_min", p.u_min);
    p.u_max = ov.number("u_max", p.u_max);
    ov.finish();
  }
  if (const json* g = o.child("grid")) {
    Obj og(*g, o.path("grid"));
    GridSpec& p = cfg.grid;
    p.c0_count = og.integer("c0_count", p.c0_count);
    p.c0_min = og.number("c0_min", p.c0_min);
    p.c0_max = og.number("c0_max", p.c0_max);
    p.c1_count = og.integer("c1_count", p.c1_count);
    p.c1_min = og.number("c1_min", p.c1_min);
    p.c1_max = og.number("c1_max", p.c1_max);
    p.lambda = og.number("lambda", p.lambda);
    og.finish();
  }
  cfg.horizon = o.integer("horizon", cfg.horizon);
  if (const json* n = o.child("noise")) {
    Obj on(*n, o.path("noise"));
    cfg.noise.sigma_x = on.number("sigma_x", cfg.noise.sigma_x);
    cfg.noise.sigma_v = on.number("sigma_v", cfg.noise.sigma_v);
    cfg.noise.sigma_a = on.number("sigma_a", cfg.noise.sigma_a);
    cfg.noise.seed = on.uinteger("seed", cfg.noise.seed);
    on.finish();
  }
  cfg.duration_s = o.number("duration_s", cfg.duration_s);
  cfg.transient_skip_s = o.number("transient_skip_s", cfg.transient_skip_s);
  if (const json* k = o.child("kick")) {
    Obj ok(*k, o.path("kick"));
    cfg.kick.enabled = ok.boolean("enabled", cfg.kick.enabled);
    cfg.kick.magnitude = ok.number("magnitude", cfg.kick.magnitude);
    cfg.kick.duration_s = ok.number("duration_s", cfg.kick.duration_s);
    cfg.kick.vehicle = ok.integer("vehicle", cfg.kick.vehicle);
    ok.finish();
  }
  cfg.record_trajectory = o.boolean("record_trajectory", false);
  cfg.tau_probes = o.int_list("tau_probes");
  o.finish();

  cfg.grid.order = cfg.algorithm.curve_order;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["geometry"] = {{"circumference", cfg.geometry.circumference},
                   {"vehicle_count", cfg.geometry.vehicle_count}};
  j["algorithm"] = {{"name", cfg.algorithm.name},
                    {"iterations", cfg.algorithm.iterations}};
  j["utility"] = {{"v_star", cfg.utility.v_star},
                  {"kappa1", cfg.utility.kappa1},
                  {"kappa2_v", cfg.utility.kappa2_v},
                  {"kappa2_0", cfg.utility.kappa2_0},
                  {"kappa3_c", cfg.utility.kappa3_c},
                  {"kappa3_v", cfg.utility.kappa3_v},
                  {"kappa3_d", cfg.utility.kappa3_d},
                  {"w1", cfg.utility.w1},
                  {"w2", cfg.utility.w2},
                  {"w3_g", cfg.utility.w3_g},
                  {"w3_c", cfg.utility.w3_c}};
  j["vehicle"] = {{"length", cfg.vehicle.length},
                  {"dt", cfg.vehicle.dt},
                  {"gamma", cfg.vehicle.gamma},
                  {"u_min", cfg.vehicle.u_min},
                  {"u_max", cfg.vehicle.u_max}};
  j["grid"] = {{"c0_count", cfg.grid.c0_count}, {"c0_min", cfg.grid.c0_min},
               {"c0_max", cfg.grid.c0_max},     {"c1_count", cfg.grid.c1_count},
               {"c1_min", cfg.grid.c1_min},     {"c1_max", cfg.grid.c1_max},
               {"lambda", cfg.grid.lambda}};
  j["horizon"] = cfg.horizon;
  j["noise"] = {{"sigma_x", cfg.noise.sigma_x},
                {"sigma_v", cfg.noise.sigma_v},
                {"sigma_a", cfg.noise.sigma_a},
                {"seed", cfg.noise.seed}};
  j["duration_s"] = cfg.duration_s;
  j["transient_skip_s"] = cfg.transient_skip_s;
  j["kick"] = {{"enabled", cfg.kick.enabled},
               {"magnitude", cfg.kick.magnitude},
               {"duration_s", cfg.kick.duration_s},
               {"vehicle", cfg.kick.vehicle}};
  j["record_trajectory"] = cfg.record_trajectory;
  j["tau_probes"] = cfg.tau_probes;
  return j;
}

std::string to_string(ConfigKind k) {
  switch (k) {
    case ConfigKind::simulate:
      return "simulate";
    case ConfigKind::sweep:
      return "sweep";
    case ConfigKind::stability:
      return "stability";
    case ConfigKind::benchmark:
      return "benchmark";
  }
  return "unknown";
}

ConfigKind config_kind(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  const bool sim = doc.contains("runs") || doc.contains("scenario");
  const int kinds = int(sim) + int(doc.contains("sweep")) +
                    int(doc.contains("stability")) +
                    int(doc.contains("benchmark"));
  if (kinds != 1)
    throw ConfigError(
        "config must contain exactly one of: runs/scenario, sweep, "
        "stability, benchmark");
  if (sim) return ConfigKind::simulate;
  if (doc.contains("sweep")) return ConfigKind::sweep;
  if (doc.contains("stability")) return ConfigKind::stability;
  return ConfigKind::benchmark;
}

SimulatePlan simulate_plan_from_json(const json& doc) {
  SimulatePlan plan;
  if (doc.contains("scenario") && doc.contains("runs"))
    throw ConfigError("use either 'scenario' or 'runs', not both");
  if (doc.contains("scenario")) {
    plan.runs.push_back({"run", scenario_from_json(doc.at("scenario"))});
    return plan;
  }
  const json& runs = doc.at("runs");
  if (!runs.is_array() || runs.empty())
    throw ConfigError("runs: expected a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string where = "runs[" + std::to_string(i) + "]";
    Obj o(runs[i], where);
    NamedRun r;
    r.name = o.text("name", "run" + std::to_string(i));
    if (const json* s = o.child("scenario"))
      r.scenario = scenario_from_json(*s, where + ".scenario");
    else
      throw ConfigError(where + ": missing key 'scenario'");
    o.finish();
    if (!names.insert(r.name).second)
      throw ConfigError(where + ": duplicate run name '" + r.name + "'");
    plan.runs.push_back(std::move(r));
  }
  return plan;
}

SweepSpec sweep_from_json(const json& doc) {
  SweepSpec spec;
  Obj root(doc, "config");
  const json* sw = root.child("sweep");
  root.finish();
  Obj o(*sw, "sweep");
  if (const json* s = o.child("scenario"))
    spec.base = scenario_from_json(*s, "sweep.scenario");
  const json* algs = o.child("algorithms");
  if (algs == nullptr) throw ConfigError("sweep: missing key 'algorithms'");
  if (!algs->is_array() || algs->empty())
    throw ConfigError("sweep.algorithms: expected a non-empty array");
  for (std::size_t i = 0; i < algs->size(); ++i)
    spec.algorithms.push_back(algorithm_from_json(
        (*algs)[i], "sweep.algorithms[" + std::to_string(i) + "]"));
  spec.vehicle_counts = o.int_list("vehicle_counts");
  if (const json* vg = o.child("v_star")) {
    Obj ov(*vg, "sweep.v_star");
    spec.v_star.lo = ov.number("lo", spec.v_star.lo);
    spec.v_star.hi = ov.number("hi", spec.v_star.hi);
    spec.v_star.step = ov.number("step", spec.v_star.step);
    ov.finish();
  }
  spec.amplitude_bound = o.number("amplitude_bound", spec.amplitude_bound);
  spec.amplitude_tol = o.number("amplitude_tol", spec.amplitude_tol);
  spec.stop_at_first_feasible =
      o.boolean("stop_at_first_feasible", spec.stop_at_first_feasible);
  if (const json* b = o.child("baseline")) {
    Obj ob(*b, "sweep.baseline");
    spec.baseline.enabled = true;
    if (const json* a = ob.child("algorithm"))
      spec.baseline.algorithm =
          algorithm_from_json(*a, "sweep.baseline.algorithm");
    spec.baseline.v_star = ob.number("v_star", spec.baseline.v_star);
    ob.finish();
  }
  o.finish();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  return spec;
}

StabilityPlan stability_plan_from_json(const json& doc) {
  StabilityPlan plan;
  Obj root(doc, "config");
  const json* st = root.child("stability");
  root.finish();
  Obj o(*st, "stability");
  if (const json* s = o.child("scenario"))
    plan.scenario = scenario_from_json(*s, "stability.scenario");
  const json* algs = o.child("algorithms");
  if (algs == nullptr)
    throw ConfigError("stability: missing key 'algorithms'");
  if (!algs->is_array() || algs->empty())
    throw ConfigError("stability.algorithms: expected a non-empty array");
  for (std::size_t i = 0; i < algs->size(); ++i)
    plan.algorithms.push_back(algorithm_from_json(
        (*algs)[i], "stability.algorithms[" + std::to_string(i) + "]"));
  o.finish();
  return plan;
}

BenchmarkPlan benchmark_plan_from_json(const json& doc) {
  BenchmarkPlan plan;
  Obj root(doc, "config");
  const json* b = root.child("benchmark");
  root.finish();
  Obj o(*b, "benchmark");
  if (const json* s = o.child("scenario"))
    plan.scenario = scenario_from_json(*s, "benchmark.scenario");
  plan.warmup_steps = o.integer("warmup_steps", plan.warmup_steps);
  o.finish();
  if (plan.warmup_steps < 0)
    throw ConfigError("benchmark.warmup_steps: must be non-negative");
  return plan;
}

namespace {

json scenario_patch(double v_star, int n, bool kicked, double duration_s,
                    double skip_s, const char* alg, int iterations,
                    bool record) {
  json s;
  s["geometry"] = {{"vehicle_count", n}};
  s["utility"] = {{"v_star", v_star}};
  s["algorithm"] = {{"name", alg}, {"iterations", iterations}};
  s["duration_s"] = duration_s;
  s["transient_skip_s"] = skip_s;
  s["kick"] = {{"enabled", kicked}};
  s["record_trajectory"] = record;
  return s;
}

struct Experiment {
  const char* summary;
  json (*build)();
};

json build_figure2() {
  json doc;
  doc["runs"] = json::array();
  doc["runs"].push_back(
      {{"name", "sparse"},
       {"scenario",
        scenario_patch(10.49, 24, true, 600, 300, "AS1D_g", 0, true)}});
  doc["runs"].push_back(
      {{"name", "dense"},
       {"scenario",
        scenario_patch(10.49, 38, true, 600, 300, "AS1D_g", 0, true)}});
  return doc;
}

json build_figure4() {
  json doc;
  json& sw = doc["sweep"];
  sw["algorithms"] = json::array(
      {{{"name", "AS1D_g"}}, {{"name", "IAS2D_c"}, {"iterations", 2}},
       {{"name", "CAS2D_c"}, {"iterations", 2}}});
  sw["vehicle_counts"] = {34, 36, 38, 40, 42};
  // candidates cap at the nominal ideal speed: the advisory only slows
  sw["v_star"] = {{"lo", 2.0}, {"hi", 10.49}, {"step", 0.5}};
  sw["amplitude_bound"] = 0.0;
  sw["amplitude_tol"] = 0.1;
  sw["baseline"] = {{"algorithm", {{"name", "AS1D_g"}}}, {"v_star", 10.49}};
  // long runs: branch-boundary candidates need time to shed transients
  sw["scenario"] = scenario_patch(10.49, 38, true, 1800, 1500, "AS1D_g", 0,
                                  false);
  return doc;
}

json build_figure5() {
  json doc;
  json& sw = doc["sweep"];
  sw["algorithms"] = json::array({{{"name", "AS1D_g"}}, {{"name", "AS2D_g"}}});
  sw["vehicle_counts"] = {24, 28, 32, 36, 40};
  sw["v_star"] = {{"lo", 10.49}, {"hi", 10.49}, {"step", 0.5}};
  sw["amplitude_bound"] = 0.0;
  sw["amplitude_tol"] = 0.1;
  sw["scenario"] = scenario_patch(10.49, 38, true, 600, 300, "AS1D_g", 0,
                                  false);
  return doc;
}

json build_figure6() {
  json doc;
  doc["runs"] = json::array();
  doc["runs"].push_back(
      {{"name", "myopic"},
       {"scenario",
        scenario_patch(10.49, 36, false, 600, 300, "AS2D_g", 0, true)}});
  doc["runs"].push_back(
      {{"name", "horizon"},
       {"scenario",
        scenario_patch(10.49, 36, false, 600, 300, "AS2D_c", 0, true)}});
  return doc;
}

json multi_round_comparison(const char* alg) {
  json doc;
  doc["runs"] = json::array();
  for (int t : {0, 2}) {
    json s = scenario_patch(7.5, 38, true, 600, 300, alg, t, true);
    doc["runs"].push_back(
        {{"name", std::string(alg) + "_T" + std::to_string(t)},
         {"scenario", s}});
  }
  return doc;
}

json build_figure9() {
  json doc;
  doc["runs"] = json::array();
  for (const char* alg : {"IAS2D_c", "CAS2D_c"})
    for (int t : {0, 2}) {
      json s = scenario_patch(7.5, 38, true, 600, 300, alg, t, true);
      doc["runs"].push_back(
          {{"name", std::string(alg) + "_T" + std::to_string(t)},
           {"scenario", s}});
    }
  return doc;
}

json build_figure10() {
  json doc;
  doc["runs"] = json::array();
  doc["runs"].push_back(
      {{"name", "myopic_tuned"},
       {"scenario",
        scenario_patch(3.5, 38, true, 600, 300, "AS1D_g", 0, true)}});
  doc["runs"].push_back(
      {{"name", "iterated_tuned"},
       {"scenario",
        scenario_patch(9.0, 38, true, 600, 300, "IAS2D_c", 2, true)}});
  return doc;
}

json build_zroots() {
  json doc;
  json& st = doc["stability"];
  st["algorithms"] = json::array(
      {{{"name", "AS1D_c"}}, {{"name", "AS2D_c"}},
       {{"name", "IAS1D_c"}, {"iterations", 2}},
       {{"name", "IAS2D_c"}, {"iterations", 2}}});
  st["scenario"] =
      scenario_patch(10.49, 36, false, 600, 300, "AS1D_c", 0, false);
  return doc;
}

json build_shallow_waves() {
  json doc;
  doc["runs"] = json::array();
  json quiet = scenario_patch(7.5, 38, true, 900, 450, "CAS2D_c", 2, true);
  json noisy = quiet;
  noisy["noise"] = {{"sigma_a", 0.01}};
  doc["runs"].push_back({{"name", "noise_free"}, {"scenario", quiet}});
  doc["runs"].push_back({{"name", "noisy"}, {"scenario", noisy}});
  return doc;
}

json build_benchmark() {
  json doc;
  doc["benchmark"] = {
      {"scenario",
       scenario_patch(10.49, 30, true, 50, 25, "IAS2D_c", 2, false)},
      {"warmup_steps", 20}};
  return doc;
}

const std::map<std::string, Experiment>& experiments() {
  static const std::map<std::string, Experiment> m = {
      {"figure2",
       {"two-regime demonstration: same controller, sparse vs dense ring",
        build_figure2}},
      {"figure4",
       {"ideal-speed tuning sweep with per-density selection and baseline",
        build_figure4}},
      {"figure5",
       {"constant vs sloped action curves across densities", build_figure5}},
      {"figure6",
       {"myopic vs horizon-summed utility at moderate density",
        build_figure6}},
      {"figure7",
       {"plan-exchange rounds for the iterated controller",
        [] { return multi_round_comparison("IAS2D_c"); }}},
      {"figure8",
       {"plan-exchange rounds for the centralized controller",
        [] { return multi_round_comparison("CAS2D_c"); }}},
      {"figure9",
       {"iterated vs centralized across exchange rounds", build_figure9}},
      {"figure10",
       {"tuned controllers compared at the same density", build_figure10}},
      {"zroots",
       {"closed-loop mode roots for four controllers", build_zroots}},
      {"shallow-waves",
       {"centralized controller with and without actuation noise",
        build_shallow_waves}},
      {"benchmark", {"per-step wall-clock cost", build_benchmark}},
  };
  return m;
}

void deep_merge(json& base, const json& patch) {
  if (!base.is_object() || !patch.is_object()) {
    base = patch;
    return;
  }
  for (const auto& item : patch.items()) {
    if (base.contains(item.key()))
      deep_merge(base[item.key()], item.value());
    else
      base[item.key()] = item.value();
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : experiments()) v.push_back(k);
    return v;
  }();
  return names;
}

bool is_experiment(const std::string& name) {
  return experiments().count(name) > 0;
}

std::string experiment_summary(const std::string& name) {
  return experiments().at(name).summary;
}

nlohmann::json experiment_config(const std::string& name) {
  const auto it = experiments().find(name);
  if (it == experiments().end())
    throw ConfigError("unknown experiment '" + name + "'");
  return it->second.build();
}

void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like path.to.key=value: " +
                      assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;  // bare strings need no quotes
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override has an empty path segment: " +
                                       assignment);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object())
      (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

ResolvedConfig resolve_config(json raw,
                              const std::vector<std::string>& overrides,
                              const std::string& fallback_label) {
  if (!raw.is_object()) throw ConfigError("config root must be an object");
  ResolvedConfig out;
  out.label = fallback_label;
  if (raw.contains("experiment")) {
    const json& e = raw.at("experiment");
    if (!e.is_string())
      throw ConfigError("experiment: expected a string");
    out.label = e.get<std::string>();
    out.doc = experiment_config(out.label);
    raw.erase("experiment");
    deep_merge(out.doc, raw);
  } else {
    out.doc = std::move(raw);
  }
  for (const std::string& ov : overrides) apply_override(out.doc, ov);
  return out;
}

}  // namespace ringmpc
