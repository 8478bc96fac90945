#include <doctest.h>

#include <cmath>
#include <random>

#include "wavecrest/error.hpp"
#include "wavecrest/scattering.hpp"

using namespace wavecrest;

namespace {
const WaveModel kSch = WaveModel::make(Family::Schrodinger);
}

TEST_CASE("head-on reflection from an approaching splitter") {
  // wave moving up, splitter moving down at V
  for (double V : {0.25, 0.5, 1.0, 2.0, 3.5}) {
    for (double vg : {0.05, 0.2, 0.4, 1.0, 1.6}) {
      const PlaneWave w = plane_wave(kSch, vg);
      const PlaneWave r = reflect_at_moving_bs(kSch, w, -V, SplitterOptics::balanced());
      const double kr = 2.0 * V + vg;
      CHECK(r.k == doctest::Approx(-kr).epsilon(1e-13));
      CHECK(r.omega == doctest::Approx(kr * kr / 2.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("overtaking reflection from a splitter catching up") {
  // wave moving down, splitter moving down faster than the crests
  for (double V : {0.25, 0.5, 1.0, 2.0, 3.5}) {
    for (double vg : {0.05, 0.2, 0.4}) {
      const PlaneWave w = plane_wave(kSch, -vg);
      CHECK(classify_incidence(-V, phase_velocity(kSch, w.k), -vg) == Incidence::Overtake);
      const PlaneWave r = reflect_at_moving_bs(kSch, w, -V, SplitterOptics::balanced());
      const double kr = 2.0 * V - vg;
      CHECK(r.k == doctest::Approx(-kr).epsilon(1e-13));
      CHECK(r.omega == doctest::Approx(kr * kr / 2.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("the two reflection frequencies beat at 4 m V v_g / hbar") {
  const double V = 1.0, vg = 0.2;
  const auto bal = SplitterOptics::balanced();
  const double w2 = reflect_at_moving_bs(kSch, plane_wave(kSch, vg), -V, bal).omega;
  const double w1 = reflect_at_moving_bs(kSch, plane_wave(kSch, -vg), -V, bal).omega;
  CHECK(w2 - w1 == doctest::Approx(4.0 * V * vg).epsilon(1e-13));
}

TEST_CASE("a static mirror only reverses the wave") {
  const PlaneWave w = plane_wave(kSch, 0.7);
  const PlaneWave r = reflect_at_moving_bs(kSch, w, 0.0, SplitterOptics::mirror());
  CHECK(r.k == doctest::Approx(-0.7));
  CHECK(r.omega == doctest::Approx(w.omega));
  CHECK(std::abs(r.amplitude) == doctest::Approx(1.0));
}

TEST_CASE("phase is continuous at the contact point") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    PlaneWave w = plane_wave(kSch, u(rng));
    w.phase0 = u(rng);
    const Contact c{5.0 * u(rng), 10.0 + u(rng)};
    const auto optics = SplitterOptics::from_reflectivity(0.6, 0.3);
    try {
      const PlaneWave r = reflect_at_moving_bs(kSch, w, u(rng), optics, c);
      CHECK(r.phase_at(c.x, c.t) == doctest::Approx(w.phase_at(c.x, c.t) + 0.3).epsilon(1e-12));
      CHECK(std::abs(r.amplitude) == doctest::Approx(0.6));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateIncidence);
    }
  }
}

TEST_CASE("transmission is untouched by the splitter motion") {
  const PlaneWave w = plane_wave(kSch, 0.2, {1.0, 0.0}, 0.4);
  const auto optics = SplitterOptics::from_reflectivity(0.6);
  CHECK(optics.t == doctest::Approx(0.8));
  for (double V : {-1.0, 0.0, 0.05, 3.0}) {
    const PlaneWave t = transmit_at_moving_bs(kSch, w, V, optics);
    CHECK(t.k == w.k);
    CHECK(t.omega == w.omega);
    CHECK(t.phase0 == w.phase0);
    CHECK(std::abs(t.amplitude) == doctest::Approx(0.8));
  }
}

TEST_CASE("wave comoving with the splitter has no incidence") {
  const PlaneWave w = plane_wave(kSch, 0.2);
  try {
    reflect_at_moving_bs(kSch, w, 0.2, SplitterOptics::balanced());
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateIncidence);
  }
}

TEST_CASE("relativistic reflection") {
  Units u;
  u.c = 1.0;
  const WaveModel em = WaveModel::make(Family::EMVacuum, u);
  const PlaneWave w = plane_wave(em, 1.0);
  const double beta = 0.5;
  const PlaneWave r = reflect_at_moving_bs(em, w, -beta, SplitterOptics::mirror());
  // double Doppler factor (1 + beta) / (1 - beta)
  CHECK(r.omega == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.k == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK_THROWS_AS(reflect_at_moving_bs(em, w, 1.0, SplitterOptics::mirror()), Error);
}

TEST_CASE("klein-gordon reflected phase velocity approaches c^2/(2V+v_g)") {
  auto rel = [](double scale) {
    Units u;
    u.c = 100.0;
    const WaveModel kg = WaveModel::make(Family::KleinGordon, u);
    const double vg = 0.5 * scale, V = 1.0 * scale;
    const PlaneWave r = reflect_at_moving_bs(kg, plane_wave(kg, wavevector_from_group_speed(kg, vg)),
                                             -V, SplitterOptics::balanced());
    const double approx = u.c * u.c / (2.0 * V + vg);
    return std::abs(std::abs(phase_velocity(kg, r.k)) - approx) / approx;
  };
  CHECK(rel(1.0) < 4.0 * std::pow(2.5 / 100.0, 2));
  CHECK(rel(1.0) / rel(0.5) == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("acoustic reflection uses the medium frame") {
  Units u;
  u.sound_speed = 1.0;
  const WaveModel ac = WaveModel::make(Family::Acoustic, u);
  const PlaneWave r = reflect_at_moving_bs(ac, plane_wave(ac, 1.0), -0.5, SplitterOptics::mirror());
  CHECK(r.omega == doctest::Approx(3.0));
  CHECK(r.k == doctest::Approx(-3.0));
}

TEST_CASE("comoving sequence chirps with the splitter velocity") {
  const auto tr = Trajectory::make(10.0, 0.0, {TrajectorySegment::ramp(1.0, 0.0, -2.0)});
  const PlaneWave w = plane_wave(kSch, 0.2);
  const auto seq = comoving_reflection_sequence(kSch, w, tr, 0.0, 1.0, 4);
  REQUIRE(seq.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const double V = 2.0 * (i + 0.5) / 4.0;
    CHECK(seq[i].k == doctest::Approx(-(2.0 * V + 0.2)));
  }
  CHECK_THROWS_AS(comoving_reflection_sequence(kSch, w, tr, 0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(comoving_reflection_sequence(kSch, w, tr, 0.0, 2.0, 2), Error);
}

TEST_CASE("incidence classification") {
  CHECK(classify_incidence(0.0, 0.1, 0.2) == Incidence::HeadOn);
  CHECK(classify_incidence(-1.0, 0.1, 0.2) == Incidence::HeadOn);
  CHECK(classify_incidence(-1.0, -0.1, -0.2) == Incidence::Overtake);
  CHECK(classify_incidence(0.05, 0.1, 0.2) == Incidence::HeadOn);
  CHECK(classify_incidence(0.15, 0.1, 0.2) == Incidence::Overtake);
  CHECK(classify_incidence(0.3, 5.0, 0.2) == Incidence::Outrun);
}
