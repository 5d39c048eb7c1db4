#pragma once

#include <string>
#include <vector>

#include "ringmpc/simulator.hpp"

namespace ringmpc {

struct VStarGrid {
  double lo = 2.0;
  double hi = 12.0;
  double step = 0.5;

  std::vector<double> values_descending() const;
  void validate() const;
};

struct BaselineSpec {
  bool enabled = false;
  AlgorithmSpec algorithm = AlgorithmSpec::from_name("AS1D_g");
  double v_star = 10.49;
};

// Offline search for the ideal-speed setting: per algorithm and fleet size,
// score every candidate v* by closed-loop order parameters and keep the
// fastest flow whose speed spread stays within the bound.
struct SweepSpec {
  ScenarioConfig base;  // per-point runs overwrite N, v*, grid order
  std::vector<AlgorithmSpec> algorithms;
  std::vector<int> vehicle_counts;
  VStarGrid v_star;
  double amplitude_bound = 0.0;
  double amplitude_tol = 0.1;
  // Candidates are scanned from the highest v* down; with this set, a scan
  // stops at its first feasible point (valid selection whenever mean
  // velocity grows with v* on the feasible set).
  bool stop_at_first_feasible = false;
  BaselineSpec baseline;
  int jobs = 1;

  void validate() const;
};

struct SweepPoint {
  std::string algorithm;
  int n = 0;
  double rho = 0.0;
  double v_star = 0.0;
  double mean_velocity = 0.0;
  double amplitude = 0.0;
  bool feasible = false;
};

struct VStarChoice {
  std::string algorithm;
  int n = 0;
  double rho = 0.0;
  bool found = false;
  double v_star = 0.0;
  double mean_velocity = 0.0;
  double amplitude = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<VStarChoice> choices;    // one per (algorithm, n)
  std::vector<SweepPoint> baseline;    // one per n, when enabled
};

// The scenario actually run for one sweep point.
ScenarioConfig sweep_point_config(const SweepSpec& spec,
                                  const AlgorithmSpec& alg, int n,
                                  double v_star);

SweepResult optimize_v_star(const SweepSpec& spec);

}  // namespace ringmpc
