#include "ringmpc/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ringmpc {

namespace {

struct NamePreset {
  const char* name;
  UtilityForm form;
  Objective objective;
  int curve_order;
  int default_iterations;
  bool iterated;  // accepts an iteration override
};

constexpr NamePreset kPresets[] = {
    {"AS1D_g", UtilityForm::g_transformed, Objective::own, 0, 0, false},
    {"AS2D_g", UtilityForm::g_transformed, Objective::own, 1, 0, false},
    {"AS1D_c", UtilityForm::cumulative, Objective::own, 0, 0, false},
    {"AS2D_c", UtilityForm::cumulative, Objective::own, 1, 0, false},
    {"IAS1D_c", UtilityForm::cumulative, Objective::own, 0, 2, true},
    {"IAS2D_c", UtilityForm::cumulative, Objective::own, 1, 2, true},
    {"CAS1D_c", UtilityForm::cumulative, Objective::centralized_local, 0, 2,
     true},
    {"CAS2D_c", UtilityForm::cumulative, Objective::centralized_local, 1, 2,
     true},
};

}  // namespace

AlgorithmSpec AlgorithmSpec::from_name(std::string_view name,
                                       std::optional<int> iterations) {
  for (const auto& p : kPresets) {
    if (name != p.name) continue;
    AlgorithmSpec s;
    s.name = p.name;
    s.form = p.form;
    s.objective = p.objective;
    s.curve_order = p.curve_order;
    s.iterations = p.default_iterations;
    if (iterations.has_value()) {
      if (!p.iterated && *iterations != 0)
        throw std::invalid_argument(std::string(name) +
                                    " does not take extra rounds");
      s.iterations = *iterations;
    }
    s.validate();
    return s;
  }
  throw std::invalid_argument("unknown algorithm name: " + std::string(name));
}

const std::vector<std::string>& AlgorithmSpec::known_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& p : kPresets) v.push_back(p.name);
    return v;
  }();
  return names;
}

void AlgorithmSpec::validate() const {
  if (curve_order != 0 && curve_order != 1)
    throw std::invalid_argument("curve order must be 0 or 1");
  if (iterations < 0)
    throw std::invalid_argument("iteration count must be non-negative");
  if (form == UtilityForm::g_transformed) {
    if (objective != Objective::own)
      throw std::invalid_argument(
          "the myopic utility has no centralized variant");
    if (iterations != 0)
      throw std::invalid_argument(
          "the myopic utility does not iterate plan exchange");
  }
}

AttentionRange attention_set(const AlgorithmSpec& spec, int tau) {
  const int reach = std::min(tau + 1, spec.iterations + 1);
  const bool rear = spec.objective == Objective::centralized_local;
  return {reach, rear ? reach : 0};
}

SharedPlans share_plans(const PlanBoard& board, const RingGeometry& geom,
                        int vehicle, const AttentionRange& range) {
  SharedPlans out;
  out.leader = range.ahead >= 1 ? board.plan(geom.leader_of(vehicle))
                                : board.zero_plan();
  out.follower = range.behind >= 1 ? board.plan(geom.follower_of(vehicle))
                                   : board.zero_plan();
  return out;
}

TauLoopResult tau_loop(std::span<const KinematicState> fleet,
                       const RingGeometry& geom, const AlgorithmSpec& spec,
                       const ActionSolver& solver, CoordinationWorkspace& ws,
                       std::span<const int> probe_depths) {
  spec.validate();
  const int n = static_cast<int>(fleet.size());
  if (n != geom.vehicle_count)
    throw std::invalid_argument("fleet size differs from ring geometry");
  if (ws.current.n() != n || ws.current.horizon() != solver.horizon())
    throw std::invalid_argument("workspace shape differs from problem");

  int rounds = spec.iterations + 1;
  for (int d : probe_depths) {
    if (d < 0) throw std::invalid_argument("probe depth must be non-negative");
    rounds = std::max(rounds, d + 1);
  }

  TauLoopResult result;
  result.executed.resize(n);
  result.coeffs.resize(n);
  result.round_max_delta.reserve(rounds);
  result.probes.resize(probe_depths.size());

  ws.current.reset();
  const bool rear = spec.objective == Objective::centralized_local;

  for (int tau = 0; tau < rounds; ++tau) {
    const AttentionRange range = attention_set(spec, tau);
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
      const SharedPlans shared = share_plans(ws.current, geom, i, range);
      DecisionInputs in;
      in.ego = fleet[i];
      in.leader = NeighborView{fleet[geom.leader_of(i)], shared.leader};
      if (rear)
        in.follower =
            NeighborView{fleet[geom.follower_of(i)], shared.follower};
      const BestResponseResult br = solver.best_response(in, ws.scratch);
      auto dst = ws.next.plan_mut(i);
      const auto prev = ws.current.plan(i);
      for (std::size_t h = 0; h < dst.size(); ++h) {
        dst[h] = br.plan[h];
        dmax = std::max(dmax, std::abs(dst[h] - prev[h]));
      }
      if (tau == spec.iterations) result.coeffs[i] = br.coeffs;
    }
    swap_contents(ws.current, ws.next);
    result.round_max_delta.push_back(dmax);

    // ws.current now holds the plans of round tau.
    if (tau == spec.iterations)
      for (int i = 0; i < n; ++i) result.executed[i] = ws.current.plan(i)[0];
    for (std::size_t p = 0; p < probe_depths.size(); ++p) {
      if (probe_depths[p] != tau) continue;
      result.probes[p].resize(n);
      for (int i = 0; i < n; ++i) result.probes[p][i] = ws.current.plan(i)[0];
    }
  }
  return result;
}

}  // namespace ringmpc
