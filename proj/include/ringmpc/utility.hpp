#pragma once

#include <span>
#include <vector>

#include "ringmpc/core.hpp"

namespace ringmpc {

struct UtilityParams {
  double v_star = 10.49;  // ideal speed all vehicles are rewarded for tracking

  // Speed tracking (forward reward).
  double kappa1 = 0.7;
  // Penalty discouraging slow / backward drift.
  double kappa2_v = 10.0;
  double kappa2_0 = 0.25;
  // Collision-risk length scale.
  double kappa3_c = 0.6;
  double kappa3_v = 0.3;
  double kappa3_d = 1.0;

  double w1 = 1.0;
  double w2 = -1.0;
  // Collision-risk weight differs by objective form: the myopic (max over
  // horizon) variant uses w3_g, the horizon-summed variant uses w3_c for
  // both the leader term and the follower term of the shared objective.
  double w3_g = -10.0;
  double w3_c = -20.0;

  void validate() const;
};

// Noise-free forward simulation of one vehicle under a given action sequence.
// Index h holds the state anticipated h steps from now; arrays span
// h = 0 .. horizon + 1 where horizon + 1 == plan.size().
struct AnticipatedState {
  std::vector<double> x;  // wrapped to [0, C)
  std::vector<double> v;
  std::vector<double> a;

  int steps() const { return static_cast<int>(x.size()); }
};

AnticipatedState anticipate(const KinematicState& now,
                            std::span<const double> plan, double dt,
                            double circumference);

// Same rollout into caller-provided storage (x, v, a each sized
// plan.size() + 1); avoids allocation on hot paths.
void anticipate_into(const KinematicState& now, std::span<const double> plan,
                     double dt, double circumference, double* x, double* v,
                     double* a);

// The components below are evaluated at horizon step h on the speed the
// vehicle would reach one step later, w = v_anticipated(h+1) + u_h * dt.

// Reward for driving near the ideal speed.
double forward_reward(double v_next, double u, double dt,
                      const UtilityParams& p);

// Penalty that grows as speed drops toward zero or goes negative.
double backward_penalty(double v_next, double u, double dt,
                        const UtilityParams& p);

// Shape of the collision-risk tail for positive normalized clearance.
double risk_shape(double x);

// Speed-dependent clearance scale for an ordered (rear, front) pair.
double collision_scale(double w_rear, double w_front, const UtilityParams& p);

// Collision risk given bumper-to-bumper clearance and its scale.
double collision_risk(double clearance, double scale);

// Collision risk between a rear/front pair at horizon step h. u_rear / u_front
// are the actions both vehicles take at step h of their plans.
double pair_collision_risk(const AnticipatedState& rear, double u_rear,
                           const AnticipatedState& front, double u_front,
                           int h, double dt, double len_rear, double len_front,
                           double circumference, const UtilityParams& p);

struct ActorInput {
  KinematicState state;
  std::span<const double> plan;
};

struct UtilityContext {
  UtilityParams params;
  VehicleParams vehicle;
  double circumference = 314.0;
};

// Sum over the whole horizon of all weighted components. The follower, when
// present, contributes its own risk of colliding into the ego's candidate
// trajectory (the centralized objective); pass nullptr for the plain one.
double cumulative_utility(const UtilityContext& ctx, const ActorInput& ego,
                          const ActorInput& leader,
                          const ActorInput* follower = nullptr);

// Myopic variant: speed terms at the first step only, collision risk replaced
// by its worst value over the horizon.
double g_transformed_utility(const UtilityContext& ctx, const ActorInput& ego,
                             const ActorInput& leader);

}  // namespace ringmpc
