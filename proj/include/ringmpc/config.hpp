#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringmpc/mechanism.hpp"
#include "ringmpc/simulator.hpp"

namespace ringmpc {

// Anything wrong with user-supplied configuration; the CLI maps it to its
// own exit code, distinct from runtime failures.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  const std::string& where = "scenario");
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

struct NamedRun {
  std::string name;
  ScenarioConfig scenario;
};

struct SimulatePlan {
  std::vector<NamedRun> runs;
};

struct StabilityPlan {
  std::vector<AlgorithmSpec> algorithms;
  ScenarioConfig scenario;
};

struct BenchmarkPlan {
  ScenarioConfig scenario;
  int warmup_steps = 20;
};

// Payload shape decides what a config document drives.
enum class ConfigKind { simulate, sweep, stability, benchmark };
std::string to_string(ConfigKind k);

ConfigKind config_kind(const nlohmann::json& doc);
SimulatePlan simulate_plan_from_json(const nlohmann::json& doc);
SweepSpec sweep_from_json(const nlohmann::json& doc);
StabilityPlan stability_plan_from_json(const nlohmann::json& doc);
BenchmarkPlan benchmark_plan_from_json(const nlohmann::json& doc);

// Canned experiment configurations, runnable by name.
const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);
std::string experiment_summary(const std::string& name);
nlohmann::json experiment_config(const std::string& name);

// "a.b.c=value" with the value parsed as JSON when possible.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Expands an "experiment" reference, merges the remaining keys on top and
// applies dotted-path overrides. label reports what was resolved.
struct ResolvedConfig {
  nlohmann::json doc;
  std::string label;
};
ResolvedConfig resolve_config(nlohmann::json raw,
                              const std::vector<std::string>& overrides,
                              const std::string& fallback_label);

}  // namespace ringmpc
