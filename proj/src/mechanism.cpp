#include "ringmpc/mechanism.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ringmpc {

std::vector<double> VStarGrid::values_descending() const {
  validate();
  std::vector<double> v;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) v.push_back(hi - i * step);
  if (!v.empty() && v.back() - lo > 1e-9) v.push_back(lo);
  return v;
}

void VStarGrid::validate() const {
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("ideal-speed grid bounds out of order");
  if (!(step > 0.0))
    throw std::invalid_argument("ideal-speed grid step must be positive");
}

void SweepSpec::validate() const {
  v_star.validate();
  if (algorithms.empty())
    throw std::invalid_argument("sweep needs at least one algorithm");
  if (vehicle_counts.empty())
    throw std::invalid_argument("sweep needs at least one fleet size");
  for (const auto& a : algorithms) a.validate();
  if (!(amplitude_tol >= 0.0))
    throw std::invalid_argument("amplitude tolerance must be non-negative");
  if (jobs < 0) throw std::invalid_argument("jobs must be non-negative");
}

ScenarioConfig sweep_point_config(const SweepSpec& spec,
                                  const AlgorithmSpec& alg, int n,
                                  double v_star) {
  ScenarioConfig cfg = spec.base;
  cfg.algorithm = alg;
  cfg.grid.order = alg.curve_order;
  cfg.geometry.vehicle_count = n;
  cfg.utility.v_star = v_star;
  cfg.record_trajectory = false;
  cfg.tau_probes.clear();
  return cfg;
}

namespace {

SweepPoint evaluate_point(const SweepSpec& spec, const AlgorithmSpec& alg,
                          int n, double v_star) {
  const ScenarioConfig cfg = sweep_point_config(spec, alg, n, v_star);
  const RunResult r = run_scenario(cfg);
  SweepPoint p;
  p.algorithm = alg.name;
  p.n = n;
  p.rho = cfg.geometry.density();
  p.v_star = v_star;
  p.mean_velocity = r.summary.order.mean_velocity;
  p.amplitude = r.summary.order.amplitude;
  p.feasible =
      r.summary.order.amplitude <= spec.amplitude_bound + spec.amplitude_tol;
  return p;
}

struct TaskOut {
  std::vector<SweepPoint> points;
  VStarChoice choice;
};

}  // namespace

SweepResult optimize_v_star(const SweepSpec& spec) {
  spec.validate();
  const std::vector<double> candidates = spec.v_star.values_descending();

  struct Task {
    const AlgorithmSpec* alg;
    int n;
  };
  std::vector<Task> tasks;
  for (const auto& alg : spec.algorithms)
    for (int n : spec.vehicle_counts) tasks.push_back({&alg, n});

  std::vector<TaskOut> outs(tasks.size());
  auto run_task = [&](const Task& t) {
    TaskOut out;
    out.choice.algorithm = t.alg->name;
    out.choice.n = t.n;
    out.choice.rho = t.n / spec.base.geometry.circumference;
    for (double v : candidates) {
      const SweepPoint p = evaluate_point(spec, *t.alg, t.n, v);
      out.points.push_back(p);
      if (p.feasible && (!out.choice.found ||
                         p.mean_velocity > out.choice.mean_velocity)) {
        out.choice.found = true;
        out.choice.v_star = p.v_star;
        out.choice.mean_velocity = p.mean_velocity;
        out.choice.amplitude = p.amplitude;
      }
      if (p.feasible && spec.stop_at_first_feasible) break;
    }
    return out;
  };

  const int jobs =
      std::min<int>(std::max(spec.jobs, 1), static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) outs[t] = run_task(tasks[t]);
  } else {
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      for (std::size_t t; (t = cursor.fetch_add(1)) < tasks.size();)
        outs[t] = run_task(tasks[t]);
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  for (auto& out : outs) {
    result.points.insert(result.points.end(), out.points.begin(),
                         out.points.end());
    result.choices.push_back(out.choice);
  }
  if (spec.baseline.enabled) {
    for (int n : spec.vehicle_counts)
      result.baseline.push_back(evaluate_point(spec, spec.baseline.algorithm,
                                               n, spec.baseline.v_star));
  }
  return result;
}

}  // namespace ringmpc
