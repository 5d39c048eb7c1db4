#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "oracles.hpp"
#include "ringmpc/core.hpp"

using namespace ringmpc;

TEST_CASE("wrap_position handles plain, zero and negative inputs") {
  CHECK(wrap_position(315.0, 314.0) == doctest::Approx(1.0));
  CHECK(wrap_position(0.0, 314.0) == 0.0);
  CHECK(wrap_position(-1.0, 314.0) == doctest::Approx(313.0));
}

TEST_CASE("wrap_position lands in [0, C) and keeps the residue class") {
  oracle::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double c = rng.uniform(1.0, 500.0);
    const double x = rng.uniform(-10.0 * c, 10.0 * c);
    const double w = wrap_position(x, c);
    CHECK(w >= 0.0);
    CHECK(w < c);
    CHECK(oracle::ring_distance(w, oracle::wrap(x, c), c) < 1e-9);
    // residue class: (w - x) must be an integer multiple of c
    const double k = (w - x) / c;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
}

TEST_CASE("headway measures the forward gap on the ring") {
  CHECK(headway(10.0, 20.0, 314.0) == doctest::Approx(10.0));
  CHECK(headway(300.0, 6.0, 314.0) == doctest::Approx(20.0));
  CHECK(headway(42.0, 42.0, 314.0) == 0.0);

  oracle::Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const double c = rng.uniform(10.0, 400.0);
    const double a = rng.uniform(0.0, c);
    const double b = rng.uniform(0.0, c);
    const double d = headway(a, b, c);
    CHECK(d >= 0.0);
    CHECK(d < c);
    CHECK(d == doctest::Approx(oracle::forward_gap(a, b, c)).epsilon(1e-12));
  }
}

TEST_CASE("step_vehicle fixed point and filter response") {
  VehicleParams p;

  KinematicState zero;
  const KinematicState still = step_vehicle(zero, 0.0, 0.0, p, 314.0);
  CHECK(still.x == 0.0);
  CHECK(still.v == 0.0);
  CHECK(still.a == 0.0);

  KinematicState rolling;
  rolling.a = 1.0;
  const KinematicState next = step_vehicle(rolling, 0.0, 0.0, p, 314.0);
  CHECK(next.a == doctest::Approx(std::sqrt(0.7)));

  KinematicState near_seam;
  near_seam.x = 313.0;
  near_seam.v = 12.0;
  const KinematicState wrapped = step_vehicle(near_seam, 0.0, 0.0, p, 314.0);
  CHECK(wrapped.x == doctest::Approx(1.0));
}

TEST_CASE("step_vehicle matches the longhand update on random inputs") {
  VehicleParams p;
  oracle::Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    KinematicState s;
    s.x = rng.uniform(0.0, 314.0);
    s.v = rng.uniform(-2.0, 15.0);
    s.a = rng.uniform(-6.0, 4.0);
    const double u = rng.uniform(-6.0, 4.0);
    const double u_prev = rng.uniform(-6.0, 4.0);
    NoiseDraw nd;
    nd.ex = rng.uniform(-0.05, 0.05);
    nd.ev = rng.uniform(-0.05, 0.05);
    nd.ea = rng.uniform(-0.05, 0.05);

    const KinematicState got = step_vehicle(s, u, u_prev, p, 314.0, nd);
    const KinematicState want = oracle::step(s, u, u_prev, p, 314.0, nd);
    CHECK(oracle::ring_distance(got.x, want.x, 314.0) < 1e-12);
    CHECK(got.v == doctest::Approx(want.v).epsilon(1e-14));
    CHECK(got.a == doctest::Approx(want.a).epsilon(1e-14));
  }
}

TEST_CASE("constant command pulls the realized acceleration in geometrically") {
  VehicleParams p;
  const double u = 2.0;
  KinematicState s;
  s.a = -1.0;
  const double gap0 = std::abs(s.a - u);
  double u_prev = u;  // command held constant throughout
  for (int t = 1; t <= 25; ++t) {
    s = step_vehicle(s, u, u_prev, p, 314.0);
    CHECK(std::abs(s.a - u) ==
          doctest::Approx(std::pow(p.gamma, t) * gap0).epsilon(1e-10));
  }
}

TEST_CASE("positions stay normalized over a long random walk") {
  VehicleParams p;
  oracle::Rng rng(14);
  KinematicState s;
  s.v = 10.0;
  for (int t = 0; t < 5000; ++t) {
    s = step_vehicle(s, rng.uniform(-6.0, 4.0), rng.uniform(-6.0, 4.0), p,
                     17.0);
    CHECK(s.x >= 0.0);
    CHECK(s.x < 17.0);
    s.v = std::clamp(s.v, -5.0, 20.0);
    s.a = std::clamp(s.a, -8.0, 8.0);
  }
}

TEST_CASE("noise draws are a pure function of seed, vehicle and step") {
  NoiseSpec spec;
  spec.sigma_x = 0.1;
  spec.sigma_v = 0.2;
  spec.sigma_a = 0.3;
  spec.seed = 99;

  const NoiseDraw a = sample_noise(spec, 3, 1000);
  const NoiseDraw b = sample_noise(spec, 3, 1000);
  CHECK(a.ex == b.ex);
  CHECK(a.ev == b.ev);
  CHECK(a.ea == b.ea);

  const NoiseDraw other_step = sample_noise(spec, 3, 1001);
  const NoiseDraw other_vehicle = sample_noise(spec, 4, 1000);
  CHECK(a.ex != other_step.ex);
  CHECK(a.ex != other_vehicle.ex);

  NoiseSpec reseeded = spec;
  reseeded.seed = 100;
  CHECK(a.ex != sample_noise(reseeded, 3, 1000).ex);

  NoiseSpec quiet;
  quiet.seed = 99;
  const NoiseDraw z = sample_noise(quiet, 3, 1000);
  CHECK(z.ex == 0.0);
  CHECK(z.ev == 0.0);
  CHECK(z.ea == 0.0);
}

TEST_CASE("noise draws look like the requested normals") {
  NoiseSpec spec;
  spec.sigma_a = 0.5;
  spec.seed = 7;
  double sum = 0.0, sq = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    const double e = sample_noise(spec, i % 16, i / 16).ea;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("parameter validation rejects broken inputs") {
  RingGeometry geom;
  geom.vehicle_count = 1;
  CHECK_THROWS_AS(geom.validate(), std::invalid_argument);
  geom.vehicle_count = 38;
  geom.circumference = -1.0;
  CHECK_THROWS_AS(geom.validate(), std::invalid_argument);

  VehicleParams vp;
  vp.gamma = 1.0;
  CHECK_THROWS_AS(vp.validate(), std::invalid_argument);
  vp = VehicleParams{};
  vp.dt = 0.0;
  CHECK_THROWS_AS(vp.validate(), std::invalid_argument);
  vp = VehicleParams{};
  vp.u_min = vp.u_max;
  CHECK_THROWS_AS(vp.validate(), std::invalid_argument);

  NoiseSpec ns;
  ns.sigma_v = -0.1;
  CHECK_THROWS_AS(ns.validate(), std::invalid_argument);
}
