#include "ringmpc/core.hpp"

#include <stdexcept>
#include <string>

namespace ringmpc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// splitmix64 finalizer; good avalanche for counter-based streams.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform_open(std::uint64_t bits) {
  // (0, 1]: never 0, so log() below is safe.
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// One standard normal from a counter value.
double gauss(std::uint64_t key) {
  const std::uint64_t b1 = mix64(key);
  const std::uint64_t b2 = mix64(key ^ 0xda942042e4dd58b5ULL);
  const double r = std::sqrt(-2.0 * std::log(uniform_open(b1)));
  const double theta = 2.0 * M_PI * uniform_open(b2);
  return r * std::cos(theta);
}

}  // namespace

void RingGeometry::validate() const {
  require(std::isfinite(circumference) && circumference > 0.0,
          "circumference must be positive");
  require(vehicle_count >= 2, "vehicle_count must be at least 2");
}

void VehicleParams::validate() const {
  require(std::isfinite(length) && length > 0.0, "length must be positive");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0,
          "gamma must lie in [0, 1)");
  require(std::isfinite(u_min) && std::isfinite(u_max) && u_min < u_max,
          "acceleration bounds must satisfy u_min < u_max");
}

void NoiseSpec::validate() const {
  require(sigma_x >= 0.0 && sigma_v >= 0.0 && sigma_a >= 0.0,
          "noise std deviations must be non-negative");
}

double wrap_position(double x, double circumference) {
  double r = std::fmod(x, circumference);
  if (r < 0.0) r += circumference;
  // fmod can land exactly on circumference after the correction above.
  if (r >= circumference) r = 0.0;
  return r;
}

double headway(double x_ego, double x_lead, double circumference) {
  return wrap_position(x_lead - x_ego, circumference);
}

NoiseDraw sample_noise(const NoiseSpec& spec, int vehicle, std::int64_t step) {
  NoiseDraw d;
  if (!spec.any()) return d;
  const std::uint64_t base = mix64(spec.seed) ^
                             mix64(static_cast<std::uint64_t>(vehicle) + 1) ^
                             mix64(static_cast<std::uint64_t>(step) * 3 + 1);
  if (spec.sigma_x != 0.0) d.ex = spec.sigma_x * gauss(mix64(base ^ 0x1111));
  if (spec.sigma_v != 0.0) d.ev = spec.sigma_v * gauss(mix64(base ^ 0x2222));
  if (spec.sigma_a != 0.0) d.ea = spec.sigma_a * gauss(mix64(base ^ 0x3333));
  return d;
}

KinematicState step_vehicle(const KinematicState& s, double u, double u_prev,
                            const VehicleParams& p, double circumference,
                            const NoiseDraw& noise) {
  KinematicState n;
  n.x = wrap_position(s.x + s.v * p.dt + noise.ex, circumference);
  n.v = s.v + s.a * p.dt + noise.ev;
  n.a = p.gamma * s.a + (u - p.gamma * u_prev) + noise.ea;
  return n;
}

}  // namespace ringmpc
