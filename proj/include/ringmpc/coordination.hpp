#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ringmpc/core.hpp"
#include "ringmpc/optimizer.hpp"

namespace ringmpc {

// A named point in the algorithm family: which utility is maximized, over
// which curve family, against whose interests, and how many extra
// best-response rounds are exchanged before committing.
struct AlgorithmSpec {
  std::string name = "IAS2D_c";
  UtilityForm form = UtilityForm::cumulative;
  Objective objective = Objective::own;
  int curve_order = 1;
  int iterations = 2;  // T; the loop always runs at least one round

  static AlgorithmSpec from_name(std::string_view name,
                                 std::optional<int> iterations = {});
  static const std::vector<std::string>& known_names();
  void validate() const;
};

// Neighbors whose plans can carry information to a vehicle by round tau:
// plans propagate one hop per round, capped by the round budget.
struct AttentionRange {
  int ahead = 0;
  int behind = 0;
};
AttentionRange attention_set(const AlgorithmSpec& spec, int tau);

// Fixed-size store of every vehicle's current plan (horizon + 1 commands).
struct PlanBoard {
  PlanBoard(int n, int horizon)
      : n_(n),
        horizon_(horizon),
        data_(static_cast<std::size_t>(n) * (horizon + 1), 0.0),
        zeros_(static_cast<std::size_t>(horizon) + 1, 0.0) {}

  int n() const { return n_; }
  int horizon() const { return horizon_; }
  std::span<const double> plan(int vehicle) const {
    return {data_.data() + static_cast<std::size_t>(vehicle) * (horizon_ + 1),
            static_cast<std::size_t>(horizon_) + 1};
  }
  std::span<double> plan_mut(int vehicle) {
    return {data_.data() + static_cast<std::size_t>(vehicle) * (horizon_ + 1),
            static_cast<std::size_t>(horizon_) + 1};
  }
  std::span<const double> zero_plan() const {
    return {zeros_.data(), zeros_.size()};
  }
  void reset() { std::fill(data_.begin(), data_.end(), 0.0); }
  friend void swap_contents(PlanBoard& a, PlanBoard& b) {
    a.data_.swap(b.data_);
  }

 private:
  int n_;
  int horizon_;
  std::vector<double> data_;
  std::vector<double> zeros_;
};

// Plans a vehicle reads for its neighbors; zeros outside the attention range.
struct SharedPlans {
  std::span<const double> leader;
  std::span<const double> follower;
};
SharedPlans share_plans(const PlanBoard& board, const RingGeometry& geom,
                        int vehicle, const AttentionRange& range);

struct CoordinationWorkspace {
  CoordinationWorkspace(int n, int horizon)
      : current(n, horizon), next(n, horizon) {}
  PlanBoard current;
  PlanBoard next;
  SolverScratch scratch;
};

struct TauLoopResult {
  std::vector<double> executed;  // first command of each final plan
  std::vector<ActionCurve> coeffs;
  std::vector<double> round_max_delta;  // per round, max |plan change|
  // Executed actions the fleet would commit if the loop stopped at each
  // requested depth (depth d = d extra rounds).
  std::vector<std::vector<double>> probes;
};

// Synchronous plan exchange: starting from an all-zero board, every vehicle
// simultaneously replans against the previous round's plans. Runs
// spec.iterations + 1 rounds, extended as needed to cover probe depths;
// the committed action comes from round spec.iterations + 1.
TauLoopResult tau_loop(std::span<const KinematicState> fleet,
                       const RingGeometry& geom, const AlgorithmSpec& spec,
                       const ActionSolver& solver, CoordinationWorkspace& ws,
                       std::span<const int> probe_depths = {});

}  // namespace ringmpc
