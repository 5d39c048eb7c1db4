#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ringmpc/coordination.hpp"
#include "ringmpc/core.hpp"
#include "ringmpc/optimizer.hpp"
#include "ringmpc/utility.hpp"

namespace ringmpc {

struct KickSpec {
  bool enabled = false;
  double magnitude = -1.0;  // command override, m/s^2
  double duration_s = 6.0;
  int vehicle = -1;  // -1 selects the last vehicle

  int target(int n) const { return vehicle < 0 ? n - 1 : vehicle; }
  void validate(int n) const;
};

struct ScenarioConfig {
  RingGeometry geometry;
  AlgorithmSpec algorithm;
  UtilityParams utility;
  VehicleParams vehicle;
  GridSpec grid;
  int horizon = 7;
  NoiseSpec noise;
  double duration_s = 600.0;
  double transient_skip_s = -1.0;  // < 0: half the duration
  KickSpec kick;
  bool record_trajectory = false;
  std::vector<int> tau_probes;  // extra committed-action snapshots per step

  double skip_s() const {
    return transient_skip_s < 0.0 ? 0.5 * duration_s : transient_skip_s;
  }
  std::int64_t step_count() const;
  void validate() const;
};

// Evenly spaced fleet rolling slightly below the ideal speed.
std::vector<KinematicState> init_fleet(const ScenarioConfig& cfg);

// Command override while the kick is active and the target still moves.
std::optional<double> kick_override(const KickSpec& kick, double elapsed_s,
                                    double target_velocity);

// Per-vehicle time series, step-major ([step * n + i]).
struct FleetTrajectory {
  int n = 0;
  double dt = 0.0;
  std::int64_t steps = 0;
  std::vector<double> x, v, a, u, gap;
};

struct SafetyEvent {
  std::int64_t step = 0;
  int vehicle = 0;
  double clearance = 0.0;
};

struct OrderParameters {
  double mean_velocity = 0.0;  // V
  double amplitude = 0.0;      // A: time-average spread of fleet speeds
};

struct RunSummary {
  OrderParameters order;
  double min_clearance = 0.0;
  std::int64_t safety_event_count = 0;
  std::optional<SafetyEvent> first_event;
  double final_round_delta_mean = 0.0;  // plan change in the last round
  double final_round_delta_max = 0.0;
  std::int64_t steps = 0;
};

struct RunResult {
  RunSummary summary;
  // Per-step fleet speed aggregates, always recorded.
  std::vector<double> v_mean, v_max, v_min;
  // Per-step, per-round max plan change, flattened [step * rounds + r].
  std::vector<double> round_deltas;
  int rounds_per_step = 0;
  // Committed actions at the probe depths, flattened [step * n + i].
  std::vector<std::vector<double>> probe_actions;
  std::optional<FleetTrajectory> trajectory;
};

RunResult run_scenario(const ScenarioConfig& cfg);

// Time-averaged order parameters from per-step aggregates, discarding the
// first skip_s seconds of transient.
OrderParameters order_parameters(const std::vector<double>& v_mean,
                                 const std::vector<double>& v_max,
                                 const std::vector<double>& v_min, double dt,
                                 double skip_s);

struct BenchmarkResult {
  int n = 0;
  std::int64_t steps = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p90_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
};

// Wall-clock cost per simulated step (plan exchange + dynamics).
BenchmarkResult benchmark_scenario(const ScenarioConfig& cfg, int warmup_steps);

}  // namespace ringmpc
