#include "ringmpc/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace ringmpc {

namespace {

struct HomogeneousEvaluator {
  explicit HomogeneousEvaluator(const ScenarioConfig& cfg)
      : cfg(cfg),
        solver(cfg.algorithm.form, cfg.algorithm.objective, cfg.utility,
               cfg.vehicle, cfg.grid, cfg.horizon, cfg.geometry.circumference),
        ws(cfg.geometry.vehicle_count, cfg.horizon),
        fleet(cfg.geometry.vehicle_count) {}

  void set_homogeneous(double velocity) {
    const int n = cfg.geometry.vehicle_count;
    const double spacing = cfg.geometry.circumference / n;
    for (int i = 0; i < n; ++i) {
      fleet[i].x = wrap_position(i * spacing, cfg.geometry.circumference);
      fleet[i].v = velocity;
      fleet[i].a = 0.0;
    }
  }

  std::vector<double> executed() {
    return tau_loop(fleet, cfg.geometry, cfg.algorithm, solver, ws).executed;
  }

  double action_at(double velocity) {
    set_homogeneous(velocity);
    return executed()[0];
  }

  const ScenarioConfig& cfg;
  ActionSolver solver;
  CoordinationWorkspace ws;
  std::vector<KinematicState> fleet;
};

}  // namespace

double homogeneous_action(const ScenarioConfig& cfg, double velocity) {
  HomogeneousEvaluator ev(cfg);
  return ev.action_at(velocity);
}

std::optional<FixedPoint> find_fixed_point(const ScenarioConfig& cfg,
                                           double tolerance,
                                           double velocity_floor) {
  HomogeneousEvaluator ev(cfg);
  double lo = velocity_floor;
  double hi = cfg.utility.v_star;
  double flo = ev.action_at(lo);
  double fhi = ev.action_at(hi);
  const double spacing =
      cfg.geometry.circumference / cfg.geometry.vehicle_count;

  auto accept = [&](double v, double f) -> std::optional<FixedPoint> {
    if (std::abs(f) >= tolerance) return std::nullopt;
    return FixedPoint{v, spacing, f};
  };
  if (auto r = accept(lo, flo)) return r;
  if (auto r = accept(hi, fhi)) return r;
  if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = ev.action_at(mid);
    if (std::abs(fmid) < tolerance) return FixedPoint{mid, spacing, fmid};
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  return std::nullopt;
}

bool PolicyJacobian::any_flag() const {
  for (std::size_t i = 0; i < flag_x.size(); ++i)
    if (flag_x[i] || flag_v[i] || flag_a[i]) return true;
  return false;
}

double PolicyJacobian::beta_x_sum() const {
  double s = 0.0;
  for (double b : bx) s += b;
  return s;
}

PolicyJacobian policy_jacobian(const ScenarioConfig& cfg, const FixedPoint& fp,
                               double step_scale) {
  HomogeneousEvaluator ev(cfg);
  const int n = cfg.geometry.vehicle_count;
  const int reach = cfg.algorithm.iterations + 1;
  if (2 * reach + 1 > n)
    throw std::invalid_argument("ring too small for the sensitivity window");

  PolicyJacobian jac;
  jac.reach = reach;
  const int w = 2 * reach + 1;
  jac.bx.assign(w, 0.0);
  jac.bv.assign(w, 0.0);
  jac.ba.assign(w, 0.0);
  jac.flag_x.assign(w, 0);
  jac.flag_v.assign(w, 0);
  jac.flag_a.assign(w, 0);

  // Sensitivity of every vehicle's command to one perturbed vehicle; one
  // perturbation yields a whole column of offsets at once.
  auto column = [&](int comp, double h) {
    auto perturbed = [&](double delta) {
      ev.set_homogeneous(fp.velocity);
      KinematicState& s = ev.fleet[0];
      if (comp == 0)
        s.x = wrap_position(s.x + delta, cfg.geometry.circumference);
      else if (comp == 1)
        s.v += delta;
      else
        s.a += delta;
      return ev.executed();
    };
    const std::vector<double> up = perturbed(h);
    const std::vector<double> dn = perturbed(-h);
    std::vector<double> beta(w, 0.0);
    for (int i = 0; i < n; ++i) {
      int l = (0 - i) % n;
      if (l < 0) l += n;           // offset of the perturbed vehicle, 0..n-1
      if (l > n / 2) l -= n;       // signed: positive = ahead
      const double d = (up[i] - dn[i]) / (2.0 * h);
      if (std::abs(l) <= reach)
        beta[l + reach] = d;
      else if (std::abs(d) > 1e-9)
        throw std::runtime_error("sensitivity leaked outside the plan reach");
    }
    return beta;
  };

  const double hx = step_scale * fp.spacing;
  const double hv = step_scale * std::max(1.0, fp.velocity);
  const double ha = step_scale * 1.0;
  const double steps[3] = {hx, hv, ha};
  std::vector<double>* outs[3] = {&jac.bx, &jac.bv, &jac.ba};
  std::vector<std::uint8_t>* flags[3] = {&jac.flag_x, &jac.flag_v, &jac.flag_a};

  for (int comp = 0; comp < 3; ++comp) {
    const std::vector<double> full = column(comp, steps[comp]);
    const std::vector<double> half = column(comp, 0.5 * steps[comp]);
    for (int idx = 0; idx < w; ++idx) {
      // Richardson extrapolation cancels the quadratic truncation term of
      // the central differences; the halving mismatch still flags noise.
      (*outs[comp])[idx] = (4.0 * half[idx] - full[idx]) / 3.0;
      const double rel = std::abs(full[idx] - half[idx]) /
                         std::max(std::abs(half[idx]), 1e-8);
      (*flags[comp])[idx] = rel > 1e-3 ? 1 : 0;
    }
  }
  return jac;
}

ModeSpectrum mode_spectrum(const PolicyJacobian& jac, int n, double dt,
                           double gamma) {
  ModeSpectrum sp;
  sp.gamma = gamma;
  sp.dt = dt;
  sp.n = n;
  sp.modes.resize(n);
  const double tau = 2.0 * M_PI / n;
  for (int k = 0; k < n; ++k) {
    ModeRoots m;
    m.k = k;
    for (int l = -jac.reach; l <= jac.reach; ++l) {
      const std::complex<double> ph =
          std::polar(1.0, tau * static_cast<double>(k) * l);
      m.bx += ph * jac.beta_x(l);
      m.bv += ph * jac.beta_v(l);
      m.ba += ph * jac.beta_a(l);
    }
    // z^2 - (2 + c) z + (1 + c - dt^2 Bx), c = dt Bv - dt^2 Bx.
    const std::complex<double> c = dt * m.bv - dt * dt * m.bx;
    const std::complex<double> b = -(2.0 + c);
    const std::complex<double> q = 1.0 + c - dt * dt * m.bx;
    std::complex<double> disc = std::sqrt(b * b - 4.0 * q);
    if (std::real(std::conj(b) * disc) < 0.0) disc = -disc;
    const std::complex<double> t = -0.5 * (b + disc);
    if (std::abs(t) == 0.0) {
      m.z1 = 0.0;
      m.z2 = 0.0;
    } else {
      m.z1 = t;
      m.z2 = q / t;
    }
    sp.modes[k] = m;
  }
  return sp;
}

std::string to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::stable:
      return "stable";
    case StabilityVerdict::marginal:
      return "marginal";
    case StabilityVerdict::unstable:
      return "unstable";
    case StabilityVerdict::no_fixed_point:
      return "no_fixed_point";
  }
  return "unknown";
}

Classification classify(const ModeSpectrum& spectrum, double margin) {
  Classification out;
  if (spectrum.modes.empty()) return out;
  out.max_magnitude = 0.0;
  for (const ModeRoots& m : spectrum.modes) {
    std::complex<double> roots[2] = {m.z1, m.z2};
    int skip = -1;
    if (m.k == 0) {
      // Drop the neutral root from shifting every vehicle equally.
      skip = std::abs(roots[0] - 1.0) <= std::abs(roots[1] - 1.0) ? 0 : 1;
      out.translational_root = roots[skip];
    }
    for (int r = 0; r < 2; ++r) {
      if (r == skip) continue;
      const double mag = std::abs(roots[r]);
      if (mag > out.max_magnitude) {
        out.max_magnitude = mag;
        out.argmax_k = m.k;
      }
    }
  }
  if (out.max_magnitude < 1.0 - margin)
    out.verdict = StabilityVerdict::stable;
  else if (out.max_magnitude > 1.0 + margin)
    out.verdict = StabilityVerdict::unstable;
  else
    out.verdict = StabilityVerdict::marginal;
  return out;
}

StabilityAnalysis analyze_stability(const ScenarioConfig& cfg) {
  StabilityAnalysis a;
  a.algorithm = cfg.algorithm.name;
  a.n = cfg.geometry.vehicle_count;
  a.rho = cfg.geometry.density();
  a.v_star = cfg.utility.v_star;
  a.fixed_point = find_fixed_point(cfg);
  if (!a.fixed_point.has_value()) {
    a.result.verdict = StabilityVerdict::no_fixed_point;
    return a;
  }
  a.jacobian = policy_jacobian(cfg, *a.fixed_point);
  a.spectrum = mode_spectrum(a.jacobian, a.n, cfg.vehicle.dt,
                             cfg.vehicle.gamma);
  a.result = classify(a.spectrum);
  return a;
}

}  // namespace ringmpc
