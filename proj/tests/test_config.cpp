#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "ringmpc/config.hpp"

using namespace ringmpc;
using nlohmann::json;

TEST_CASE("a scenario survives the round trip through its document form") {
  ScenarioConfig cfg;
  cfg.geometry.vehicle_count = 30;
  cfg.geometry.circumference = 250.0;
  cfg.algorithm = AlgorithmSpec::from_name("CAS2D_c", 3);
  cfg.grid.order = 1;
  cfg.utility.v_star = 8.25;
  cfg.utility.w3_g = -12.0;
  cfg.utility.w3_c = -25.0;
  cfg.vehicle.gamma = 0.5;
  cfg.grid.lambda = 150.0;
  cfg.horizon = 5;
  cfg.noise.sigma_a = 0.01;
  cfg.noise.seed = 1234;
  cfg.duration_s = 42.0;
  cfg.transient_skip_s = 21.0;
  cfg.kick.enabled = true;
  cfg.kick.magnitude = -2.0;
  cfg.kick.vehicle = 3;
  cfg.record_trajectory = true;
  cfg.tau_probes = {0, 2};

  const ScenarioConfig back = scenario_from_json(scenario_to_json(cfg));
  CHECK(back.geometry.vehicle_count == 30);
  CHECK(back.geometry.circumference == 250.0);
  CHECK(back.algorithm.name == "CAS2D_c");
  CHECK(back.algorithm.iterations == 3);
  CHECK(back.algorithm.objective == Objective::centralized_local);
  CHECK(back.grid.order == 1);
  CHECK(back.utility.v_star == 8.25);
  CHECK(back.utility.w3_g == -12.0);
  CHECK(back.utility.w3_c == -25.0);
  CHECK(back.vehicle.gamma == 0.5);
  CHECK(back.grid.lambda == 150.0);
  CHECK(back.horizon == 5);
  CHECK(back.noise.sigma_a == 0.01);
  CHECK(back.noise.seed == 1234);
  CHECK(back.duration_s == 42.0);
  CHECK(back.transient_skip_s == 21.0);
  CHECK(back.kick.enabled);
  CHECK(back.kick.magnitude == -2.0);
  CHECK(back.kick.vehicle == 3);
  CHECK(back.record_trajectory);
  CHECK(back.tau_probes == std::vector<int>{0, 2});

  // defaults round-trip too, and the grid order follows the algorithm
  const ScenarioConfig plain = scenario_from_json(json::object());
  CHECK(plain.algorithm.name == "IAS2D_c");
  CHECK(plain.grid.order == 1);
  const ScenarioConfig flat = scenario_from_json(
      json{{"algorithm", {{"name", "AS1D_c"}}}});
  CHECK(flat.grid.order == 0);
}

TEST_CASE("config mistakes are reported with their dotted path") {
  CHECK_THROWS_WITH_AS(
      scenario_from_json(json{{"geometry", {{"circumfrence", 300.0}}}}),
      "scenario.geometry: unknown key 'circumfrence'", ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_json(json{{"utility", {{"v_star", "fast"}}}}),
      "scenario.utility.v_star: expected a number", ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_json(json{{"horizon", 3.5}}),
      "scenario.horizon: expected an integer", ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_json(json{{"algorithm", {{"name", "AS9D"}}}}),
      "scenario.algorithm: unknown algorithm name: AS9D", ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json{{"noise", {{"seed", -3}}}}),
                  ConfigError);
  CHECK_THROWS_AS(scenario_from_json(json::array()), ConfigError);
  // semantic failures surface as config errors as well
  CHECK_THROWS_AS(scenario_from_json(json{{"duration_s", -5.0}}), ConfigError);
}

TEST_CASE("the payload shape selects the command") {
  CHECK(config_kind(json{{"scenario", json::object()}}) ==
        ConfigKind::simulate);
  CHECK(config_kind(json{{"runs", json::array()}}) == ConfigKind::simulate);
  CHECK(config_kind(json{{"sweep", json::object()}}) == ConfigKind::sweep);
  CHECK(config_kind(json{{"stability", json::object()}}) ==
        ConfigKind::stability);
  CHECK(config_kind(json{{"benchmark", json::object()}}) ==
        ConfigKind::benchmark);
  CHECK_THROWS_AS(config_kind(json::object()), ConfigError);
  CHECK_THROWS_AS(config_kind(json{{"sweep", json::object()},
                                   {"benchmark", json::object()}}),
                  ConfigError);
  CHECK(to_string(ConfigKind::sweep) == "sweep");
}

TEST_CASE("run lists need unique names and a scenario each") {
  json doc;
  doc["runs"] = json::array();
  doc["runs"].push_back({{"name", "a"}, {"scenario", json::object()}});
  doc["runs"].push_back({{"scenario", json{{"horizon", 4}}}});
  const SimulatePlan plan = simulate_plan_from_json(doc);
  REQUIRE(plan.runs.size() == 2);
  CHECK(plan.runs[0].name == "a");
  CHECK(plan.runs[1].name == "run1");
  CHECK(plan.runs[1].scenario.horizon == 4);

  doc["runs"].push_back({{"name", "a"}, {"scenario", json::object()}});
  CHECK_THROWS_AS(simulate_plan_from_json(doc), ConfigError);

  json both;
  both["scenario"] = json::object();
  both["runs"] = json::array();
  CHECK_THROWS_AS(simulate_plan_from_json(both), ConfigError);
}

TEST_CASE("sweep and stability documents parse into full plans") {
  json doc;
  doc["sweep"] = {
      {"scenario", {{"duration_s", 30.0}, {"transient_skip_s", 15.0}}},
      {"algorithms",
       json::array({{{"name", "AS1D_g"}}, {{"name", "IAS2D_c"}, {"iterations", 1}}})},
      {"vehicle_counts", {24, 38}},
      {"v_star", {{"lo", 4.0}, {"hi", 6.0}, {"step", 1.0}}},
      {"amplitude_tol", 0.05},
      {"stop_at_first_feasible", true},
      {"baseline", {{"v_star", 9.75}}}};
  const SweepSpec spec = sweep_from_json(doc);
  CHECK(spec.base.duration_s == 30.0);
  REQUIRE(spec.algorithms.size() == 2);
  CHECK(spec.algorithms[1].iterations == 1);
  CHECK(spec.vehicle_counts == std::vector<int>{24, 38});
  CHECK(spec.v_star.lo == 4.0);
  CHECK(spec.v_star.hi == 6.0);
  CHECK(spec.amplitude_tol == 0.05);
  CHECK(spec.stop_at_first_feasible);
  CHECK(spec.baseline.enabled);
  CHECK(spec.baseline.v_star == 9.75);
  CHECK(spec.baseline.algorithm.name == "AS1D_g");

  json missing;
  missing["sweep"] = {{"vehicle_counts", {24}}};
  CHECK_THROWS_AS(sweep_from_json(missing), ConfigError);

  json st;
  st["stability"] = {
      {"algorithms", json::array({{{"name", "AS1D_c"}}})},
      {"scenario", {{"geometry", {{"vehicle_count", 36}}}}}};
  const StabilityPlan plan = stability_plan_from_json(st);
  REQUIRE(plan.algorithms.size() == 1);
  CHECK(plan.scenario.geometry.vehicle_count == 36);

  json bench;
  bench["benchmark"] = {{"warmup_steps", 7}};
  CHECK(benchmark_plan_from_json(bench).warmup_steps == 7);
  bench["benchmark"]["warmup_steps"] = -1;
  CHECK_THROWS_AS(benchmark_plan_from_json(bench), ConfigError);
}

TEST_CASE("canned experiments resolve to valid runnable documents") {
  const std::vector<std::string>& names = experiment_names();
  CHECK(names.size() >= 10);
  for (const std::string& name : names) {
    CAPTURE(name);
    CHECK(is_experiment(name));
    CHECK_FALSE(experiment_summary(name).empty());
    const json doc = experiment_config(name);
    const ConfigKind kind = config_kind(doc);
    switch (kind) {
      case ConfigKind::simulate:
        CHECK_FALSE(simulate_plan_from_json(doc).runs.empty());
        break;
      case ConfigKind::sweep:
        CHECK_FALSE(sweep_from_json(doc).algorithms.empty());
        break;
      case ConfigKind::stability:
        CHECK_FALSE(stability_plan_from_json(doc).algorithms.empty());
        break;
      case ConfigKind::benchmark:
        CHECK(benchmark_plan_from_json(doc).warmup_steps >= 0);
        break;
    }
  }
  CHECK_FALSE(is_experiment("figure99"));
}

TEST_CASE("dotted overrides rewrite one leaf at a time") {
  json doc;
  doc["sweep"]["scenario"]["duration_s"] = 600.0;

  apply_override(doc, "sweep.scenario.duration_s=120");
  CHECK(doc["sweep"]["scenario"]["duration_s"] == json(120));

  apply_override(doc, "sweep.scenario.kick.enabled=true");
  CHECK(doc["sweep"]["scenario"]["kick"]["enabled"] == json(true));

  apply_override(doc, "sweep.scenario.algorithm.name=AS1D_g");
  CHECK(doc["sweep"]["scenario"]["algorithm"]["name"] == json("AS1D_g"));

  apply_override(doc, "sweep.vehicle_counts=[24,38]");
  CHECK(doc["sweep"]["vehicle_counts"] == json({24, 38}));

  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "=5"), ConfigError);
}

TEST_CASE("a document can borrow a canned experiment and patch it") {
  json raw;
  raw["experiment"] = "benchmark";
  const ResolvedConfig r = resolve_config(
      raw, {"benchmark.scenario.duration_s=60",
            "benchmark.warmup_steps=3"},
      "inline");
  CHECK(r.label == "benchmark");
  CHECK(config_kind(r.doc) == ConfigKind::benchmark);
  const BenchmarkPlan plan = benchmark_plan_from_json(r.doc);
  CHECK(plan.scenario.duration_s == 60.0);
  CHECK(plan.warmup_steps == 3);
  // untouched leaves keep the canned values
  CHECK(plan.scenario.geometry.vehicle_count == 30);

  // sibling keys merge on top of the expansion
  json patched;
  patched["experiment"] = "benchmark";
  patched["benchmark"] = {{"warmup_steps", 5}};
  const ResolvedConfig r2 = resolve_config(patched, {}, "inline");
  CHECK(benchmark_plan_from_json(r2.doc).warmup_steps == 5);
  CHECK(benchmark_plan_from_json(r2.doc).scenario.geometry.vehicle_count ==
        30);

  json inline_doc;
  inline_doc["benchmark"] = {{"warmup_steps", 3}};
  const ResolvedConfig r3 = resolve_config(inline_doc, {}, "inline");
  CHECK(r3.label == "inline");

  json bad;
  bad["experiment"] = "not_a_thing";
  CHECK_THROWS_AS(resolve_config(bad, {}, "inline"), ConfigError);
}
