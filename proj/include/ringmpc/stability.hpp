#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ringmpc/simulator.hpp"

namespace ringmpc {

// Homogeneous flow: equal spacing, common speed, zero acceleration.
struct FixedPoint {
  double velocity = 0.0;
  double spacing = 0.0;
  double action_residual = 0.0;  // committed command at the fixed point
};

// Committed command of a fleet in homogeneous flow at the given speed.
double homogeneous_action(const ScenarioConfig& cfg, double velocity);

// Speed at which the committed command vanishes, found by bisection on
// (velocity_floor, v_star]. Empty when the command does not change sign.
std::optional<FixedPoint> find_fixed_point(const ScenarioConfig& cfg,
                                           double tolerance = 1e-6,
                                           double velocity_floor = 1e-3);

// First-order response of the committed command to per-vehicle state
// perturbations around a fixed point: beta[l] is the sensitivity to the
// vehicle l positions ahead (negative l: behind). Central differences,
// cross-checked at half step width.
struct PolicyJacobian {
  int reach = 0;  // window is l in [-reach, reach]
  std::vector<double> bx, bv, ba;
  std::vector<std::uint8_t> flag_x, flag_v, flag_a;  // step-halving mismatch
  double beta_x(int l) const { return bx[l + reach]; }
  double beta_v(int l) const { return bv[l + reach]; }
  double beta_a(int l) const { return ba[l + reach]; }
  bool any_flag() const;
  double beta_x_sum() const;
};

PolicyJacobian policy_jacobian(const ScenarioConfig& cfg, const FixedPoint& fp,
                               double step_scale = 1e-4);

// Per-wavenumber closed-loop roots of the linearized traffic map. The
// characteristic polynomial factors into z = 0, z = gamma and a quadratic in
// z whose coefficients carry the discrete Fourier transforms of the
// sensitivities; only the quadratic depends on the wavenumber.
struct ModeRoots {
  int k = 0;
  std::complex<double> bx, bv, ba;  // transforms at this wavenumber
  std::complex<double> z1, z2;
};

struct ModeSpectrum {
  std::vector<ModeRoots> modes;  // k = 0 .. n-1
  double gamma = 0.0;
  double dt = 0.0;
  int n = 0;
};

ModeSpectrum mode_spectrum(const PolicyJacobian& jac, int n, double dt,
                           double gamma);

enum class StabilityVerdict { stable, marginal, unstable, no_fixed_point };

std::string to_string(StabilityVerdict v);

struct Classification {
  StabilityVerdict verdict = StabilityVerdict::no_fixed_point;
  double max_magnitude = 0.0;
  int argmax_k = 0;
  // Root dropped at k = 0: rigid rotations of the whole fleet are neutral.
  std::complex<double> translational_root;
};

Classification classify(const ModeSpectrum& spectrum, double margin = 1e-3);

struct StabilityAnalysis {
  std::string algorithm;
  int n = 0;
  double rho = 0.0;
  double v_star = 0.0;
  std::optional<FixedPoint> fixed_point;
  PolicyJacobian jacobian;
  ModeSpectrum spectrum;
  Classification result;
};

StabilityAnalysis analyze_stability(const ScenarioConfig& cfg);

}  // namespace ringmpc
