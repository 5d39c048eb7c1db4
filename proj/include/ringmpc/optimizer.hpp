#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ringmpc/core.hpp"
#include "ringmpc/utility.hpp"

namespace ringmpc {

enum class UtilityForm { cumulative, g_transformed };
enum class Objective { own, centralized_local };

// Affine command profile over the horizon: u_h = c0 + c1 * (h * dt).
struct ActionCurve {
  double c0 = 0.0;
  double c1 = 0.0;
};

std::vector<double> expand_curve(const ActionCurve& c, int horizon, double dt);

struct GridSpec {
  int order = 1;  // 0: constant profiles only; 1: constant + linear slope
  int c0_count = 41;
  double c0_min = -6.0;
  double c0_max = 4.0;
  int c1_count = 11;
  double c1_min = -1.0;
  double c1_max = 1.0;
  double lambda = 200.0;  // softmax sharpness over candidate utilities
  void validate() const;
};

struct SearchGrid {
  int order = 1;
  int horizon = 7;
  double dt = 1.0 / 6.0;
  double lambda = 200.0;
  std::vector<double> c0;              // axis values
  std::vector<double> c1;              // axis values; {0} when order == 0
  std::vector<std::uint8_t> feasible;  // flat, c0-major

  int point_count() const {
    return static_cast<int>(c0.size() * c1.size());
  }
  int c1_points() const { return static_cast<int>(c1.size()); }
  int flat(int i0, int i1) const {
    return i0 * static_cast<int>(c1.size()) + i1;
  }
  ActionCurve curve_at(int flat_index) const;
};

// Candidate curves with a per-point feasibility mask: a curve is kept only if
// every command along the horizon stays inside [u_min, u_max]. For affine
// curves, checking h = 0 and h = horizon is sufficient.
SearchGrid make_search_grid(const GridSpec& g, const VehicleParams& p,
                            int horizon);

struct NeighborView {
  KinematicState state;
  std::span<const double> plan;
};

struct DecisionInputs {
  KinematicState ego;
  NeighborView leader;
  std::optional<NeighborView> follower;  // used by the centralized objective
};

struct BestResponseResult {
  ActionCurve coeffs;
  std::vector<double> plan;
};

// Sharpness-weighted average of the feasible candidates given their scores.
// Invariant under adding a constant to every score.
BestResponseResult boltzmann_plan(const SearchGrid& grid,
                                  std::span<const double> util, int horizon,
                                  double dt);

// Reusable buffers for the candidate scoring loops; one per thread of use.
struct SolverScratch {
  std::vector<double> util, umax;
  std::vector<double> lead_x, lead_v, lead_a, fol_x, fol_v, fol_a;
  std::vector<double> w_lead, lead_gap0, w_fol, fol_gap0;
  std::vector<double> r0, r1, pow0, pow1, inc1, row_a, row_b, row2;
};

// Scores candidate action curves for one vehicle against fixed neighbor plans
// and returns the softmax-averaged response over the feasible set.
class ActionSolver {
 public:
  ActionSolver(UtilityForm form, Objective objective, const UtilityParams& up,
               const VehicleParams& vp, const GridSpec& grid, int horizon,
               double circumference);

  // Literal utility of one candidate, composed from the rollout and the
  // per-step components. Reference path for the batched scorer.
  double candidate_utility(const DecisionInputs& in, int flat_index) const;

  // Utilities of all candidates; out.size() == grid().point_count().
  // Matches candidate_utility on every feasible index.
  void score_candidates(const DecisionInputs& in, SolverScratch& ws,
                        std::span<double> out) const;

  BestResponseResult best_response(const DecisionInputs& in,
                                   SolverScratch& ws) const;

  const SearchGrid& grid() const { return grid_; }
  int horizon() const { return horizon_; }
  UtilityForm form() const { return form_; }
  Objective objective() const { return objective_; }

 private:
  void prepare(const DecisionInputs& in, SolverScratch& ws) const;
  void score_cumulative(const DecisionInputs& in, SolverScratch& ws,
                        double* util) const;
  void score_g_transformed(const DecisionInputs& in, SolverScratch& ws,
                           double* util) const;

  UtilityForm form_;
  Objective objective_;
  UtilityParams up_;
  VehicleParams vp_;
  SearchGrid grid_;
  int horizon_;
  double circumference_;

  // Candidate-independent factor tables, one row per horizon step.
  int n0_ = 0, n1_ = 0, points_ = 0;
  std::vector<double> pw_, qw_, ppos_, qpos_;     // per h
  std::vector<double> ga_, gb_, g2a_, g2b_, gx_;  // per (h, i0) / (h, i1) / (h, c)
};

}  // namespace ringmpc
