#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "ringmpc/optimizer.hpp"

// Batched candidate scoring. The speed-tracking and slow-speed terms factor
// into per-axis exponential tables (built once per solver construction plus a
// handful of per-call values), so the inner loop spends its exponentials only
// on the collision term, whose clearance scale is state-dependent.

namespace ringmpc {

namespace {

void resize_rollout(std::vector<double>& x, std::vector<double>& v,
                    std::vector<double>& a, std::size_t n) {
  x.resize(n);
  v.resize(n);
  a.resize(n);
}

inline double rewrap(double g, double circumference) {
  g = g < 0.0 ? g + circumference : g;
  return g >= circumference ? g - circumference : g;
}

inline double risk_term(double clearance, double scale) {
  const double r = clearance / scale;
  const double arg = std::min(r * r + r, 750.0);
  const double tail = std::exp(-arg);
  return clearance <= 0.0 ? 1.0 : tail;
}

}  // namespace

void ActionSolver::prepare(const DecisionInputs& in, SolverScratch& ws) const {
  const int hs = horizon_ + 1;
  const double dt = vp_.dt;
  if (static_cast<int>(in.leader.plan.size()) != hs)
    throw std::invalid_argument("leader plan length differs from horizon");
  const bool rear = objective_ == Objective::centralized_local;
  if (rear && !in.follower.has_value())
    throw std::invalid_argument("centralized objective needs the follower");

  ws.util.resize(points_);
  ws.umax.resize(points_);
  ws.w_lead.resize(hs);
  ws.lead_gap0.resize(hs);
  ws.r0.resize(n0_);
  ws.r1.resize(n1_);
  ws.pow0.resize(n0_);
  ws.pow1.resize(n1_);
  ws.inc1.resize(n1_);
  ws.row_a.resize(n0_);
  ws.row_b.resize(n1_);
  ws.row2.resize(n0_);

  resize_rollout(ws.lead_x, ws.lead_v, ws.lead_a, hs + 1);
  anticipate_into(in.leader.state, in.leader.plan, dt, circumference_,
                  ws.lead_x.data(), ws.lead_v.data(), ws.lead_a.data());
  const double x0 = in.ego.x;
  const double v0 = in.ego.v;
  const double kw = v0 + in.ego.a * dt;
  for (int h = 0; h < hs; ++h) {
    // Candidate-independent part of the ego's projected center.
    const double kpos = x0 + dt * v0 + (h + 1) * dt * kw;
    const double lead_center = ws.lead_x[h + 1] + ws.lead_v[h + 1] * dt;
    ws.w_lead[h] = ws.lead_v[h + 1] + in.leader.plan[h] * dt;
    ws.lead_gap0[h] = wrap_position(lead_center - kpos, circumference_);
    if (rear) {
      if (h == 0) {
        if (static_cast<int>(in.follower->plan.size()) != hs)
          throw std::invalid_argument(
              "follower plan length differs from horizon");
        ws.w_fol.resize(hs);
        ws.fol_gap0.resize(hs);
        resize_rollout(ws.fol_x, ws.fol_v, ws.fol_a, hs + 1);
        anticipate_into(in.follower->state, in.follower->plan, dt,
                        circumference_, ws.fol_x.data(), ws.fol_v.data(),
                        ws.fol_a.data());
      }
      const double fol_center = ws.fol_x[h + 1] + ws.fol_v[h + 1] * dt;
      ws.w_fol[h] = ws.fol_v[h + 1] + in.follower->plan[h] * dt;
      ws.fol_gap0[h] = wrap_position(kpos - fol_center, circumference_);
    }
  }

  // Per-call factors of the speed terms.
  const double s = up_.kappa1 * up_.v_star;
  const double s2 = s * s;
  const double d = kw - up_.v_star;
  for (int i = 0; i < n0_; ++i)
    ws.r0[i] = std::exp(-2.0 * d * dt * grid_.c0[i] / s2);
  for (int j = 0; j < n1_; ++j)
    ws.r1[j] = std::exp(-2.0 * d * dt * dt * grid_.c1[j] / s2);
}

void ActionSolver::score_cumulative(const DecisionInputs& in,
                                    SolverScratch& ws, double* util) const {
  const int hs = horizon_ + 1;
  const double dt = vp_.dt;
  const double c = circumference_;
  const double len = vp_.length;
  const double kw = in.ego.v + in.ego.a * dt;
  const double s = up_.kappa1 * up_.v_star;
  const double e0 = std::exp(-(kw - up_.v_star) * (kw - up_.v_star) / (s * s));
  const double e2 = std::exp(-up_.kappa2_v * (kw + up_.kappa2_0));
  const double w1e0 = up_.w1 * e0;
  const double w2e2 = up_.w2 * e2;
  const double w3g = up_.w3_c;
  const double w3r = up_.w3_c;
  const double kc = up_.kappa3_c;
  const double kv = up_.kappa3_v;
  const double kd = up_.kappa3_d;
  const bool rear = objective_ == Objective::centralized_local;

  std::fill(util, util + points_, 0.0);
  std::fill(ws.pow1.begin(), ws.pow1.end(), 1.0);
  std::copy(ws.r0.begin(), ws.r0.end(), ws.pow0.begin());
  std::copy(ws.r1.begin(), ws.r1.end(), ws.inc1.begin());

  const double* c0v = grid_.c0.data();
  const double* c1v = grid_.c1.data();

  for (int h = 0; h < hs; ++h) {
    for (int i = 0; i < n0_; ++i)
      ws.row_a[i] = w1e0 * ga_[h * n0_ + i] * ws.pow0[i];
    for (int j = 0; j < n1_; ++j)
      ws.row_b[j] = gb_[h * n1_ + j] * ws.pow1[j];
    for (int i = 0; i < n0_; ++i) ws.row2[i] = w2e2 * g2a_[h * n0_ + i];
    const double* g2brow = &g2b_[h * n1_];
    const double* gxrow = &gx_[static_cast<std::size_t>(h) * points_];
    const double pwh = pw_[h], qwh = qw_[h], pph = ppos_[h], qph = qpos_[h];
    const double g0 = ws.lead_gap0[h];
    const double wl = ws.w_lead[h];
    const double gf0 = rear ? ws.fol_gap0[h] : 0.0;
    const double wf = rear ? ws.w_fol[h] : 0.0;

    for (int i = 0; i < n0_; ++i) {
      const double wbase = kw + pwh * c0v[i];
      const double dcbase = pph * c0v[i];
      const double ra = ws.row_a[i];
      const double r2 = ws.row2[i];
      double* urow = util + i * n1_;
      const double* gxc = gxrow + i * n1_;
      for (int j = 0; j < n1_; ++j) {
        const double w = wbase + qwh * c1v[j];
        const double dc = dcbase + qph * c1v[j];
        const double gap = rewrap(g0 - dc, c);
        const double clr = gap - len;
        const double scale = kc + kv * std::abs(w) + kd * std::max(w - wl, 0.0);
        double acc = ra * ws.row_b[j] * gxc[j] + r2 * g2brow[j] +
                     w3g * risk_term(clr, scale);
        if (rear) {
          const double gapf = rewrap(gf0 + dc, c);
          const double scalef =
              kc + kv * std::abs(wf) + kd * std::max(wf - w, 0.0);
          acc += w3r * risk_term(gapf - len, scalef);
        }
        urow[j] += acc;
      }
    }
    for (int i = 0; i < n0_; ++i) ws.pow0[i] *= ws.r0[i];
    for (int j = 0; j < n1_; ++j) {
      ws.pow1[j] *= ws.inc1[j];
      ws.inc1[j] *= ws.r1[j];
    }
  }
}

void ActionSolver::score_g_transformed(const DecisionInputs& in,
                                       SolverScratch& ws, double* util) const {
  const int hs = horizon_ + 1;
  const double dt = vp_.dt;
  const double c = circumference_;
  const double len = vp_.length;
  const double kw = in.ego.v + in.ego.a * dt;
  const double s = up_.kappa1 * up_.v_star;
  const double kc = up_.kappa3_c;
  const double kv = up_.kappa3_v;
  const double kd = up_.kappa3_d;

  // Speed terms at the first step only; they depend on c0 alone there.
  for (int i = 0; i < n0_; ++i) {
    const double w0 = kw + dt * grid_.c0[i];
    const double z = (w0 - up_.v_star) / s;
    const double u1 = std::exp(-z * z);
    const double u2 = std::exp(-up_.kappa2_v * (w0 + up_.kappa2_0));
    const double base = up_.w1 * u1 + up_.w2 * u2;
    for (int j = 0; j < n1_; ++j) util[i * n1_ + j] = base;
  }
  std::fill(ws.umax.begin(), ws.umax.end(), 0.0);

  const double* c0v = grid_.c0.data();
  const double* c1v = grid_.c1.data();
  for (int h = 0; h < hs; ++h) {
    const double pwh = pw_[h], qwh = qw_[h], pph = ppos_[h], qph = qpos_[h];
    const double g0 = ws.lead_gap0[h];
    const double wl = ws.w_lead[h];
    for (int i = 0; i < n0_; ++i) {
      const double wbase = kw + pwh * c0v[i];
      const double dcbase = pph * c0v[i];
      double* mrow = ws.umax.data() + i * n1_;
      for (int j = 0; j < n1_; ++j) {
        const double w = wbase + qwh * c1v[j];
        const double dc = dcbase + qph * c1v[j];
        const double gap = rewrap(g0 - dc, c);
        const double clr = gap - len;
        const double scale = kc + kv * std::abs(w) + kd * std::max(w - wl, 0.0);
        mrow[j] = std::max(mrow[j], risk_term(clr, scale));
      }
    }
  }
  for (int p = 0; p < points_; ++p) util[p] += up_.w3_g * ws.umax[p];
}

void ActionSolver::score_candidates(const DecisionInputs& in,
                                    SolverScratch& ws,
                                    std::span<double> out) const {
  if (static_cast<int>(out.size()) != points_)
    throw std::invalid_argument("output span size differs from grid");
  prepare(in, ws);
  if (form_ == UtilityForm::cumulative)
    score_cumulative(in, ws, out.data());
  else
    score_g_transformed(in, ws, out.data());
}

BestResponseResult boltzmann_plan(const SearchGrid& grid,
                                  std::span<const double> util, int horizon,
                                  double dt) {
  const int n1 = grid.c1_points();
  const double lambda = grid.lambda;
  double top = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < grid.point_count(); ++p)
    if (grid.feasible[p]) top = std::max(top, util[p]);

  double sw = 0.0, s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < static_cast<int>(grid.c0.size()); ++i) {
    for (int j = 0; j < n1; ++j) {
      const int p = i * n1 + j;
      if (!grid.feasible[p]) continue;
      const double w = std::exp(lambda * (util[p] - top));
      sw += w;
      s0 += w * grid.c0[i];
      s1 += w * grid.c1[j];
    }
  }
  BestResponseResult r;
  r.coeffs = ActionCurve{s0 / sw, s1 / sw};
  r.plan = expand_curve(r.coeffs, horizon, dt);
  return r;
}

BestResponseResult ActionSolver::best_response(const DecisionInputs& in,
                                               SolverScratch& ws) const {
  ws.util.resize(points_);
  score_candidates(in, ws, ws.util);
  return boltzmann_plan(grid_, ws.util, horizon_, vp_.dt);
}

}  // namespace ringmpc
