#include <doctest.h>

#include <cmath>
#include <random>

#include "wavecrest/error.hpp"
#include "wavecrest/scattering.hpp"
#include "wavecrest/wavemodel.hpp"

using namespace wavecrest;

TEST_CASE("schrodinger dispersion and speeds") {
  Units u;
  u.hbar = 2.0;
  u.mass = 3.0;
  const WaveModel m = WaveModel::make(Family::Schrodinger, u);
  const double k = 0.7;
  CHECK(dispersion_omega(m, k) == doctest::Approx(2.0 * k * k / 6.0).epsilon(1e-15));
  CHECK(group_velocity(m, k) == doctest::Approx(2.0 * k / 3.0).epsilon(1e-15));
  CHECK(phase_velocity(m, k) == doctest::Approx(0.5 * group_velocity(m, k)).epsilon(1e-15));
  CHECK(wavevector_from_group_speed(m, 0.4) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(std::isinf(m.speed_limit()));
}

TEST_CASE("klein-gordon phase and group velocity multiply to c^2") {
  Units u;
  u.c = 5.0;
  const WaveModel m = WaveModel::make(Family::KleinGordon, u);
  for (double vg : {0.1, 1.0, 4.9, -2.0}) {
    const double k = wavevector_from_group_speed(m, vg);
    CHECK(group_velocity(m, k) == doctest::Approx(vg).epsilon(1e-12));
    CHECK(phase_velocity(m, k) * group_velocity(m, k) == doctest::Approx(25.0).epsilon(1e-12));
  }
  CHECK(m.speed_limit() == 5.0);
  CHECK_THROWS_AS(wavevector_from_group_speed(m, 5.0), Error);
}

TEST_CASE("vacuum and acoustic waves are dispersionless") {
  Units u;
  u.c = 3.0;
  u.sound_speed = 0.5;
  const WaveModel em = WaveModel::make(Family::EMVacuum, u);
  const WaveModel ac = WaveModel::make(Family::Acoustic, u);
  for (double k : {0.2, -1.5}) {
    CHECK(std::abs(phase_velocity(em, k)) == doctest::Approx(3.0));
    CHECK(std::abs(group_velocity(ac, k)) == doctest::Approx(0.5));
    CHECK(dispersion_omega(em, k) == doctest::Approx(3.0 * std::abs(k)));
  }
}

TEST_CASE("phase velocity is undefined at k = 0") {
  const WaveModel m = WaveModel::make(Family::Schrodinger);
  try {
    phase_velocity(m, 0.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedPhaseVelocity);
  }
}

TEST_CASE("family names round trip") {
  for (Family f : {Family::Schrodinger, Family::KleinGordon, Family::EMVacuum, Family::Acoustic}) {
    CHECK(family_from_name(family_name(f)) == f);
  }
  CHECK_THROWS_AS(family_from_name("Dirac"), Error);
}

TEST_CASE("galilean boosts preserve dispersion and invert") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  for (int i = 0; i < 100; ++i) {
    Units un;
    un.hbar = pos(rng);
    un.mass = pos(rng);
    const WaveModel m = WaveModel::make(Family::Schrodinger, un);
    const PlaneWave w = plane_wave(m, u(rng));
    const double V = u(rng);
    const PlaneWave b = galilean_boost_plane_wave(m, w, V);
    CHECK(satisfies_dispersion(m, b, 1e-12));
    const PlaneWave back = galilean_boost_plane_wave(m, b, -V);
    CHECK(back.k == doctest::Approx(w.k).epsilon(1e-12).scale(1.0));
    CHECK(back.omega == doctest::Approx(w.omega).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("lorentz boosts preserve the klein-gordon invariant") {
  Units u;
  u.c = 2.0;
  const WaveModel m = WaveModel::make(Family::KleinGordon, u);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.9, 1.9);
  for (int i = 0; i < 50; ++i) {
    const PlaneWave w = plane_wave(m, wavevector_from_group_speed(m, d(rng)));
    const PlaneWave b = lorentz_boost_wave(m, w, d(rng));
    CHECK(satisfies_dispersion(m, b, 1e-10));
  }
}
