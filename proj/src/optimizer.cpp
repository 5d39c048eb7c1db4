#include "ringmpc/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace ringmpc {

namespace {

constexpr double kBoundSlack = 1e-9;

std::vector<double> axis_values(int count, double lo, double hi) {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) v[i] = lo + i * step;
  v[count - 1] = hi;
  return v;
}

}  // namespace

std::vector<double> expand_curve(const ActionCurve& c, int horizon, double dt) {
  std::vector<double> u(static_cast<std::size_t>(horizon) + 1);
  for (int h = 0; h <= horizon; ++h) u[h] = c.c0 + c.c1 * (h * dt);
  return u;
}

void GridSpec::validate() const {
  if (order != 0 && order != 1)
    throw std::invalid_argument("grid order must be 0 or 1");
  if (c0_count < 1 || (order == 1 && c1_count < 1))
    throw std::invalid_argument("grid axis needs at least one point");
  if (!(c0_min <= c0_max) || !(c1_min <= c1_max))
    throw std::invalid_argument("grid axis bounds out of order");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

ActionCurve SearchGrid::curve_at(int flat_index) const {
  const int n1 = static_cast<int>(c1.size());
  return {c0[flat_index / n1], c1[flat_index % n1]};
}

SearchGrid make_search_grid(const GridSpec& g, const VehicleParams& p,
                            int horizon) {
  g.validate();
  p.validate();
  SearchGrid grid;
  grid.order = g.order;
  grid.horizon = horizon;
  grid.dt = p.dt;
  grid.lambda = g.lambda;
  grid.c0 = axis_values(g.c0_count, g.c0_min, g.c0_max);
  grid.c1 = g.order == 0 ? std::vector<double>{0.0}
                         : axis_values(g.c1_count, g.c1_min, g.c1_max);
  grid.feasible.resize(grid.point_count());
  const double lo = p.u_min - kBoundSlack;
  const double hi = p.u_max + kBoundSlack;
  int kept = 0;
  for (std::size_t i0 = 0; i0 < grid.c0.size(); ++i0) {
    for (std::size_t i1 = 0; i1 < grid.c1.size(); ++i1) {
      const double u_first = grid.c0[i0];
      const double u_last = grid.c0[i0] + grid.c1[i1] * (horizon * p.dt);
      const bool ok = u_first >= lo && u_first <= hi && u_last >= lo &&
                      u_last <= hi;
      grid.feasible[i0 * grid.c1.size() + i1] = ok ? 1 : 0;
      kept += ok;
    }
  }
  if (kept == 0)
    throw std::invalid_argument("no feasible candidate on the search grid");
  return grid;
}

ActionSolver::ActionSolver(UtilityForm form, Objective objective,
                           const UtilityParams& up, const VehicleParams& vp,
                           const GridSpec& grid, int horizon,
                           double circumference)
    : form_(form),
      objective_(objective),
      up_(up),
      vp_(vp),
      grid_(make_search_grid(grid, vp, horizon)),
      horizon_(horizon),
      circumference_(circumference) {
  up_.validate();
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  if (!(circumference > 0.0))
    throw std::invalid_argument("circumference must be positive");
  if (form_ == UtilityForm::g_transformed &&
      objective_ == Objective::centralized_local)
    throw std::invalid_argument(
        "the myopic utility has no centralized variant");

  n0_ = static_cast<int>(grid_.c0.size());
  n1_ = static_cast<int>(grid_.c1.size());
  points_ = grid_.point_count();
  const int hs = horizon_ + 1;
  const double dt = vp_.dt;
  const double s = up_.kappa1 * up_.v_star;
  const double s2 = s * s;

  pw_.resize(hs);
  qw_.resize(hs);
  ppos_.resize(hs);
  qpos_.resize(hs);
  ga_.resize(static_cast<std::size_t>(hs) * n0_);
  g2a_.resize(static_cast<std::size_t>(hs) * n0_);
  gb_.resize(static_cast<std::size_t>(hs) * n1_);
  g2b_.resize(static_cast<std::size_t>(hs) * n1_);
  gx_.resize(static_cast<std::size_t>(hs) * points_);

  for (int h = 0; h < hs; ++h) {
    // Closed forms for the candidate's effect on its own anticipated motion:
    // two-steps-ahead speed  w = Kw + pw[h] c0 + qw[h] c1  and projected
    // center shift  dc = ppos[h] c0 + qpos[h] c1.
    pw_[h] = dt * (h + 1);
    qw_[h] = dt * dt * (0.5 * h * (h + 1));
    ppos_[h] = dt * dt * (0.5 * h * (h + 1));
    qpos_[h] = dt * dt * dt * ((h - 1.0) * h * (h + 1) / 6.0);
    for (int i = 0; i < n0_; ++i) {
      const double t = pw_[h] * grid_.c0[i];
      ga_[h * n0_ + i] = std::exp(-t * t / s2);
      g2a_[h * n0_ + i] = std::exp(-up_.kappa2_v * t);
    }
    for (int j = 0; j < n1_; ++j) {
      const double t = qw_[h] * grid_.c1[j];
      gb_[h * n1_ + j] = std::exp(-t * t / s2);
      g2b_[h * n1_ + j] = std::exp(-up_.kappa2_v * t);
    }
    for (int i = 0; i < n0_; ++i)
      for (int j = 0; j < n1_; ++j)
        gx_[static_cast<std::size_t>(h) * points_ + i * n1_ + j] = std::exp(
            -2.0 * pw_[h] * grid_.c0[i] * qw_[h] * grid_.c1[j] / s2);
  }
}

double ActionSolver::candidate_utility(const DecisionInputs& in,
                                       int flat_index) const {
  const std::vector<double> plan =
      expand_curve(grid_.curve_at(flat_index), horizon_, vp_.dt);
  const UtilityContext ctx{up_, vp_, circumference_};
  const ActorInput ego{in.ego, plan};
  const ActorInput leader{in.leader.state, in.leader.plan};
  if (form_ == UtilityForm::g_transformed)
    return g_transformed_utility(ctx, ego, leader);
  if (objective_ == Objective::centralized_local) {
    if (!in.follower.has_value())
      throw std::invalid_argument("centralized objective needs the follower");
    const ActorInput rear{in.follower->state, in.follower->plan};
    return cumulative_utility(ctx, ego, leader, &rear);
  }
  return cumulative_utility(ctx, ego, leader);
}

}  // namespace ringmpc
