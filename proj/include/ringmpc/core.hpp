#pragma once

#include <cmath>
#include <cstdint>

namespace ringmpc {

// Single-lane ring road. Vehicle i drives behind vehicle (i+1) % N; positions
// live in [0, C).
struct RingGeometry {
  double circumference = 314.0;
  int vehicle_count = 38;

  double density() const { return vehicle_count / circumference; }
  int leader_of(int i) const { return (i + 1) % vehicle_count; }
  int follower_of(int i) const {
    return (i + vehicle_count - 1) % vehicle_count;
  }
  void validate() const;
};

struct KinematicState {
  double x = 0.0;  // position on the ring
  double v = 0.0;  // velocity
  double a = 0.0;  // realized acceleration
};

inline double default_gamma() { return std::sqrt(0.7); }

struct VehicleParams {
  double length = 3.9;
  double dt = 1.0 / 6.0;
  double gamma = default_gamma();  // persistence of realized acceleration
  double u_min = -6.0;
  double u_max = 4.0;
  void validate() const;
};

struct NoiseSpec {
  double sigma_x = 0.0;
  double sigma_v = 0.0;
  double sigma_a = 0.0;
  std::uint64_t seed = 0;

  bool any() const { return sigma_x != 0.0 || sigma_v != 0.0 || sigma_a != 0.0; }
  void validate() const;
};

struct NoiseDraw {
  double ex = 0.0;
  double ev = 0.0;
  double ea = 0.0;
};

// Wraps x into [0, C).
double wrap_position(double x, double circumference);

// Forward gap from x_ego to x_lead along the driving direction, in [0, C).
double headway(double x_ego, double x_lead, double circumference);

// Gaussian noise for one vehicle at one step. Counter-based: the value is a
// pure function of (seed, vehicle, step), independent of call order, so runs
// are reproducible under any evaluation schedule.
NoiseDraw sample_noise(const NoiseSpec& spec, int vehicle, std::int64_t step);

// One forward-Euler update of a single vehicle. u is the commanded
// acceleration for this step, u_prev the one realized at the previous step.
KinematicState step_vehicle(const KinematicState& s, double u, double u_prev,
                            const VehicleParams& p, double circumference,
                            const NoiseDraw& noise = {});

}  // namespace ringmpc
