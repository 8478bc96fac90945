#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wavecrest/error.hpp"
#include "wavecrest/trajectory.hpp"

using namespace wavecrest;
using TS = TrajectorySegment;

TEST_CASE("state follows piecewise kinematics") {
  const auto tr = Trajectory::make(10.0, 1.0,
                                   {TS::rest(1.0), TS::ramp(2.0, 0.0, -1.0), TS::coast(3.0, -2.0),
                                    TS::ramp(2.0, -2.0, 1.0), TS::rest(INFINITY)});
  CHECK(tr.state_at(2.0).position == 10.0);
  CHECK(tr.state_at(4.0).position == doctest::Approx(10.0 - 0.5 * 1.0 * 4.0));
  CHECK(tr.state_at(4.0).velocity == doctest::Approx(-2.0));
  CHECK(tr.state_at(7.0).position == doctest::Approx(8.0 - 6.0));
  CHECK(tr.state_at(9.0).position == doctest::Approx(2.0 - 2.0));
  CHECK(tr.state_at(100.0).position == doctest::Approx(0.0));
  CHECK(tr.state_at(100.0).velocity == 0.0);
  CHECK(tr.max_abs_velocity() == 2.0);
  CHECK_FALSE(tr.is_static());
  CHECK(tr.breakpoints().size() == 5);
  CHECK(tr.segment_index(2.0) == 0);
  CHECK(tr.segment_index(2.0000001) == 1);
  CHECK_THROWS_AS(tr.state_at(0.5), Error);
}

TEST_CASE("velocity discontinuity is rejected with the segment index") {
  try {
    Trajectory::make(0.0, 0.0, {TS::rest(1.0), TS::coast(1.0, 0.5)});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
  }
  CHECK_THROWS_AS(Trajectory::make(0.0, 0.0, {TS::rest(-1.0)}), Error);
  CHECK_THROWS_AS(Trajectory::make(0.0, 0.0, {TS::rest(INFINITY), TS::rest(1.0)}), Error);
  CHECK_THROWS_AS(Trajectory::make(0.0, 0.0, {}), Error);
}

TEST_CASE("segment kind names") {
  for (auto k : {SegmentKind::Rest, SegmentKind::ConstVelocity, SegmentKind::ConstAccel}) {
    CHECK(segment_kind_from_name(segment_kind_name(k)) == k);
  }
  CHECK_FALSE(segment_kind_from_name("jerk").has_value());
}

TEST_CASE("ray crossing a static element") {
  const auto tr = Trajectory::stationary(3.0);
  auto t = first_crossing(tr, Ray{0.0, 1.0, 0.5});
  REQUIRE(t);
  CHECK(*t == doctest::Approx(7.0));
  CHECK_FALSE(first_crossing(tr, Ray{0.0, 1.0, -0.5}));
  CHECK_FALSE(first_crossing(tr, Ray{0.0, 1.0, 0.0}));
}

TEST_CASE("parabolic segment gives both roots in order") {
  const auto tr = Trajectory::make(0.0, 0.0, {TS::ramp(10.0, 0.0, 2.0)});
  // x = t^2 against x = 3t - 2: roots 1 and 2
  const auto all = all_crossings(tr, Ray{-2.0, 0.0, 3.0}, 0.0, 10.0);
  REQUIRE(all.size() == 2);
  CHECK(all[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(all[1] == doctest::Approx(2.0).epsilon(1e-14));
  const auto after = first_crossing_in(tr, Ray{-2.0, 0.0, 3.0}, 1.0, 10.0, true);
  REQUIRE(after);
  CHECK(*after == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("tangent ray is a single touch") {
  const auto tr = Trajectory::make(0.0, 0.0, {TS::ramp(10.0, 0.0, 2.0)});
  // x = t^2 against x = 2t - 1 touches at t = 1
  const auto all = all_crossings(tr, Ray{-1.0, 0.0, 2.0}, 0.0, 10.0);
  REQUIRE(all.size() == 1);
  CHECK(all[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("crossings on a shared boundary are reported once") {
  const auto tr = Trajectory::make(0.0, 0.0, {TS::coast(1.0, 1.0), TS::coast(1.0, 1.0)});
  const auto all = all_crossings(tr, Ray{2.0, 0.0, -1.0}, 0.0, 2.0);
  REQUIRE(all.size() == 1);
  CHECK(all[0] == doctest::Approx(1.0));
}

TEST_CASE("first crossing matches a fine time stepper") {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = oracle::random_crossing_case(rng);
    const auto tr = Trajectory::make(c.x0, c.t0, c.segments);
    const auto got = first_crossing(tr, c.ray);
    const auto want = oracle::stepped_first_crossing(c.x0, c.t0, c.segments, c.ray, 1e-6);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(std::abs(*got - *want) < 1e-4);
      ++compared;
    }
  }
  CHECK(compared > 20);
}
