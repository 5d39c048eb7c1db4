#include "ringmpc/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ringmpc {

void KickSpec::validate(int n) const {
  if (!enabled) return;
  if (!(std::isfinite(magnitude)) || !(duration_s >= 0.0))
    throw std::invalid_argument("kick magnitude/duration invalid");
  if (vehicle >= n || vehicle < -1)
    throw std::invalid_argument("kick vehicle out of range");
}

std::int64_t ScenarioConfig::step_count() const {
  return static_cast<std::int64_t>(std::llround(duration_s / vehicle.dt));
}

void ScenarioConfig::validate() const {
  geometry.validate();
  algorithm.validate();
  utility.validate();
  vehicle.validate();
  grid.validate();
  noise.validate();
  kick.validate(geometry.vehicle_count);
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  if (!(duration_s > 0.0))
    throw std::invalid_argument("duration must be positive");
  if (skip_s() >= duration_s)
    throw std::invalid_argument("transient skip swallows the whole run");
  for (int d : tau_probes)
    if (d < 0) throw std::invalid_argument("probe depth must be non-negative");
  const double spacing = geometry.circumference / geometry.vehicle_count;
  if (spacing <= vehicle.length)
    throw std::invalid_argument("vehicles do not fit on the ring");
}

std::vector<KinematicState> init_fleet(const ScenarioConfig& cfg) {
  const int n = cfg.geometry.vehicle_count;
  const double spacing = cfg.geometry.circumference / n;
  std::vector<KinematicState> fleet(n);
  for (int i = 0; i < n; ++i) {
    fleet[i].x = wrap_position(i * spacing, cfg.geometry.circumference);
    fleet[i].v = cfg.utility.v_star - 1.0;
    fleet[i].a = 0.0;
  }
  return fleet;
}

std::optional<double> kick_override(const KickSpec& kick, double elapsed_s,
                                    double target_velocity) {
  if (!kick.enabled) return std::nullopt;
  if (elapsed_s >= kick.duration_s) return std::nullopt;
  if (target_velocity <= 0.0) return std::nullopt;
  return kick.magnitude;
}

OrderParameters order_parameters(const std::vector<double>& v_mean,
                                 const std::vector<double>& v_max,
                                 const std::vector<double>& v_min, double dt,
                                 double skip_s) {
  const std::int64_t steps = static_cast<std::int64_t>(v_mean.size());
  std::int64_t first = static_cast<std::int64_t>(std::ceil(skip_s / dt));
  first = std::clamp<std::int64_t>(first, 0, steps);
  if (first >= steps)
    throw std::invalid_argument("no steps left after the transient skip");
  OrderParameters out;
  for (std::int64_t s = first; s < steps; ++s) {
    out.mean_velocity += v_mean[s];
    out.amplitude += v_max[s] - v_min[s];
  }
  const double count = static_cast<double>(steps - first);
  out.mean_velocity /= count;
  out.amplitude /= count;
  return out;
}

namespace {

struct Engine {
  explicit Engine(const ScenarioConfig& cfg)
      : cfg(cfg),
        solver(cfg.algorithm.form, cfg.algorithm.objective, cfg.utility,
               cfg.vehicle, cfg.grid, cfg.horizon,
               cfg.geometry.circumference),
        ws(cfg.geometry.vehicle_count, cfg.horizon),
        fleet(init_fleet(cfg)),
        next(fleet),
        u_prev(cfg.geometry.vehicle_count, 0.0),
        u_now(cfg.geometry.vehicle_count, 0.0) {}

  // Plans, commits and integrates one step; returns the tau-loop result.
  TauLoopResult advance(std::int64_t step) {
    const int n = cfg.geometry.vehicle_count;
    TauLoopResult tl = tau_loop(fleet, cfg.geometry, cfg.algorithm, solver, ws,
                                cfg.tau_probes);
    u_now = tl.executed;
    if (cfg.kick.enabled) {
      const int k = cfg.kick.target(n);
      const auto o =
          kick_override(cfg.kick, step * cfg.vehicle.dt, fleet[k].v);
      if (o.has_value()) u_now[k] = *o;
    }
    for (int i = 0; i < n; ++i) {
      const NoiseDraw nd = sample_noise(cfg.noise, i, step);
      next[i] = step_vehicle(fleet[i], u_now[i], u_prev[i], cfg.vehicle,
                             cfg.geometry.circumference, nd);
    }
    fleet.swap(next);
    u_prev = u_now;  // realized commands, including the kick override
    return tl;
  }

  const ScenarioConfig& cfg;
  ActionSolver solver;
  CoordinationWorkspace ws;
  std::vector<KinematicState> fleet;
  std::vector<KinematicState> next;
  std::vector<double> u_prev, u_now;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const int n = cfg.geometry.vehicle_count;
  const std::int64_t steps = cfg.step_count();
  const double c = cfg.geometry.circumference;

  Engine eng(cfg);
  RunResult out;
  out.v_mean.reserve(steps);
  out.v_max.reserve(steps);
  out.v_min.reserve(steps);
  out.rounds_per_step = cfg.algorithm.iterations + 1;
  for (int d : cfg.tau_probes)
    out.rounds_per_step = std::max(out.rounds_per_step, d + 1);
  out.round_deltas.reserve(steps * out.rounds_per_step);
  out.probe_actions.resize(cfg.tau_probes.size());
  if (cfg.record_trajectory) {
    FleetTrajectory tr;
    tr.n = n;
    tr.dt = cfg.vehicle.dt;
    tr.steps = steps;
    const std::size_t total = static_cast<std::size_t>(steps) * n;
    tr.x.reserve(total);
    tr.v.reserve(total);
    tr.a.reserve(total);
    tr.u.reserve(total);
    tr.gap.reserve(total);
    out.trajectory = std::move(tr);
  }

  RunSummary& sum = out.summary;
  sum.steps = steps;
  sum.min_clearance = std::numeric_limits<double>::infinity();
  double delta_sum = 0.0;

  for (std::int64_t step = 0; step < steps; ++step) {
    // Record the pre-update state so step 0 shows the initial condition.
    double vmin = eng.fleet[0].v, vmax = eng.fleet[0].v, vsum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double vi = eng.fleet[i].v;
      vmin = std::min(vmin, vi);
      vmax = std::max(vmax, vi);
      vsum += vi;
    }
    out.v_mean.push_back(vsum / n);
    out.v_max.push_back(vmax);
    out.v_min.push_back(vmin);

    const std::vector<KinematicState> before =
        cfg.record_trajectory ? eng.fleet : std::vector<KinematicState>{};

    TauLoopResult tl = eng.advance(step);

    for (int r = 0; r < out.rounds_per_step; ++r)
      out.round_deltas.push_back(r < static_cast<int>(tl.round_max_delta.size())
                                     ? tl.round_max_delta[r]
                                     : 0.0);
    const double last_delta = tl.round_max_delta.back();
    delta_sum += last_delta;
    sum.final_round_delta_max = std::max(sum.final_round_delta_max, last_delta);
    for (std::size_t p = 0; p < tl.probes.size(); ++p)
      out.probe_actions[p].insert(out.probe_actions[p].end(),
                                  tl.probes[p].begin(), tl.probes[p].end());

    if (cfg.record_trajectory) {
      FleetTrajectory& tr = *out.trajectory;
      for (int i = 0; i < n; ++i) {
        tr.x.push_back(before[i].x);
        tr.v.push_back(before[i].v);
        tr.a.push_back(before[i].a);
        tr.u.push_back(eng.u_now[i]);
        tr.gap.push_back(
            headway(before[i].x, before[(i + 1) % n].x, c));
      }
    }

    for (int i = 0; i < n; ++i) {
      const double clearance =
          headway(eng.fleet[i].x, eng.fleet[(i + 1) % n].x, c) -
          cfg.vehicle.length;
      sum.min_clearance = std::min(sum.min_clearance, clearance);
      if (clearance < 0.0) {
        ++sum.safety_event_count;
        if (!sum.first_event.has_value())
          sum.first_event = SafetyEvent{step, i, clearance};
      }
    }
  }

  sum.final_round_delta_mean = delta_sum / static_cast<double>(steps);
  sum.order =
      order_parameters(out.v_mean, out.v_max, out.v_min, cfg.vehicle.dt,
                       cfg.skip_s());
  return out;
}

BenchmarkResult benchmark_scenario(const ScenarioConfig& cfg,
                                   int warmup_steps) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  Engine eng(cfg);
  const std::int64_t steps = cfg.step_count();
  std::vector<double> ms;
  ms.reserve(steps);
  for (std::int64_t step = 0; step < steps + warmup_steps; ++step) {
    const auto t0 = clock::now();
    eng.advance(step);
    const auto t1 = clock::now();
    if (step >= warmup_steps)
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  BenchmarkResult r;
  r.n = cfg.geometry.vehicle_count;
  r.steps = static_cast<std::int64_t>(ms.size());
  double total = 0.0;
  for (double m : ms) total += m;
  r.mean_ms = total / ms.size();
  auto pct = [&](double q) {
    const double idx = q * (ms.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, ms.size() - 1);
    return ms[lo] + (ms[hi] - ms[lo]) * (idx - lo);
  };
  r.p50_ms = pct(0.5);
  r.p90_ms = pct(0.9);
  r.p99_ms = pct(0.99);
  r.max_ms = ms.back();
  return r;
}

}  // namespace ringmpc
