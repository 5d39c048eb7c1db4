#include "ringmpc/utility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ringmpc {

void UtilityParams::validate() const {
  if (!(std::isfinite(v_star) && v_star > 0.0))
    throw std::invalid_argument("v_star must be positive");
  if (!(kappa1 > 0.0)) throw std::invalid_argument("kappa1 must be positive");
  if (!(kappa3_c > 0.0) || kappa3_v < 0.0 || kappa3_d < 0.0)
    throw std::invalid_argument("collision scale coefficients invalid");
}

AnticipatedState anticipate(const KinematicState& now,
                            std::span<const double> plan, double dt,
                            double circumference) {
  AnticipatedState s;
  const std::size_t n = plan.size() + 1;
  s.x.resize(n);
  s.v.resize(n);
  s.a.resize(n);
  anticipate_into(now, plan, dt, circumference, s.x.data(), s.v.data(),
                  s.a.data());
  return s;
}

void anticipate_into(const KinematicState& now, std::span<const double> plan,
                     double dt, double circumference, double* x, double* v,
                     double* a) {
  x[0] = wrap_position(now.x, circumference);
  v[0] = now.v;
  a[0] = now.a;
  for (std::size_t h = 0; h < plan.size(); ++h) {
    x[h + 1] = wrap_position(x[h] + v[h] * dt, circumference);
    v[h + 1] = v[h] + a[h] * dt;
    a[h + 1] = plan[h];
  }
}

double forward_reward(double v_next, double u, double dt,
                      const UtilityParams& p) {
  const double w = v_next + u * dt;
  const double z = (w - p.v_star) / (p.kappa1 * p.v_star);
  return std::exp(-z * z);
}

double backward_penalty(double v_next, double u, double dt,
                        const UtilityParams& p) {
  const double w = v_next + u * dt;
  return std::exp(-p.kappa2_v * (w + p.kappa2_0));
}

double risk_shape(double x) { return std::exp(-x * x - x); }

double collision_scale(double w_rear, double w_front, const UtilityParams& p) {
  return p.kappa3_c + p.kappa3_v * std::abs(w_rear) +
         p.kappa3_d * std::max(w_rear - w_front, 0.0);
}

double collision_risk(double clearance, double scale) {
  if (clearance <= 0.0) return 1.0;
  return risk_shape(clearance / scale);
}

double pair_collision_risk(const AnticipatedState& rear, double u_rear,
                           const AnticipatedState& front, double u_front,
                           int h, double dt, double len_rear, double len_front,
                           double circumference, const UtilityParams& p) {
  // Projected centers one step past h, matching the speeds used in the scale.
  const double cr = rear.x[h + 1] + rear.v[h + 1] * dt;
  const double cf = front.x[h + 1] + front.v[h + 1] * dt;
  const double gap = wrap_position(cf - cr, circumference);
  const double clearance = gap - 0.5 * (len_rear + len_front);
  const double wr = rear.v[h + 1] + u_rear * dt;
  const double wf = front.v[h + 1] + u_front * dt;
  return collision_risk(clearance, collision_scale(wr, wf, p));
}

namespace {

double horizon_checked(const ActorInput& ego, const ActorInput& leader,
                       const ActorInput* follower) {
  const std::size_t n = ego.plan.size();
  if (n == 0) throw std::invalid_argument("empty action plan");
  if (leader.plan.size() != n ||
      (follower != nullptr && follower->plan.size() != n))
    throw std::invalid_argument("plan lengths differ");
  return static_cast<double>(n);
}

}  // namespace

double cumulative_utility(const UtilityContext& ctx, const ActorInput& ego,
                          const ActorInput& leader,
                          const ActorInput* follower) {
  horizon_checked(ego, leader, follower);
  const double dt = ctx.vehicle.dt;
  const double len = ctx.vehicle.length;
  const AnticipatedState se =
      anticipate(ego.state, ego.plan, dt, ctx.circumference);
  const AnticipatedState sl =
      anticipate(leader.state, leader.plan, dt, ctx.circumference);
  AnticipatedState sf;
  if (follower != nullptr)
    sf = anticipate(follower->state, follower->plan, dt, ctx.circumference);

  double total = 0.0;
  for (std::size_t h = 0; h < ego.plan.size(); ++h) {
    const int hi = static_cast<int>(h);
    const double vn = se.v[h + 1];
    const double u = ego.plan[h];
    total += ctx.params.w1 * forward_reward(vn, u, dt, ctx.params);
    total += ctx.params.w2 * backward_penalty(vn, u, dt, ctx.params);
    total += ctx.params.w3_c *
             pair_collision_risk(se, u, sl, leader.plan[h], hi, dt, len, len,
                                 ctx.circumference, ctx.params);
    if (follower != nullptr) {
      total += ctx.params.w3_c *
               pair_collision_risk(sf, follower->plan[h], se, u, hi, dt, len,
                                   len, ctx.circumference, ctx.params);
    }
  }
  return total;
}

double g_transformed_utility(const UtilityContext& ctx, const ActorInput& ego,
                             const ActorInput& leader) {
  horizon_checked(ego, leader, nullptr);
  const double dt = ctx.vehicle.dt;
  const double len = ctx.vehicle.length;
  const AnticipatedState se =
      anticipate(ego.state, ego.plan, dt, ctx.circumference);
  const AnticipatedState sl =
      anticipate(leader.state, leader.plan, dt, ctx.circumference);

  double worst = 0.0;
  for (std::size_t h = 0; h < ego.plan.size(); ++h) {
    worst = std::max(
        worst, pair_collision_risk(se, ego.plan[h], sl, leader.plan[h],
                                   static_cast<int>(h), dt, len, len,
                                   ctx.circumference, ctx.params));
  }
  return ctx.params.w1 * forward_reward(se.v[1], ego.plan[0], dt, ctx.params) +
         ctx.params.w2 * backward_penalty(se.v[1], ego.plan[0], dt, ctx.params) +
         ctx.params.w3_g * worst;
}

}  // namespace ringmpc
