#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "wavecrest/trajectory.hpp"

namespace oracle {

// Explicit time stepping of the worldline kinematics; reports the first step
// on which the ray-minus-trajectory gap changes sign (or vanishes).
inline std::optional<double> stepped_first_crossing(
    double x0, double t0, const std::vector<wavecrest::TrajectorySegment>& segs,
    const wavecrest::Ray& ray, double dt) {
  double t = t0;
  double x = x0;
  const double start = std::max(ray.t, t0);
  double prev_gap = NAN;
  for (const auto& s : segs) {
    const long n = std::lround(s.duration / dt);
    double v = s.velocity0;
    for (long i = 0; i <= n; ++i) {
      const double ti = t + i * dt;
      if (ti >= start) {
        const double gap = ray.position_at(ti) - x;
        if (gap == 0.0) return ti;
        if (!std::isnan(prev_gap) && (gap > 0) != (prev_gap > 0)) {
          // linear interpolation inside the step
          return ti - dt * gap / (gap - prev_gap);
        }
        prev_gap = gap;
      }
      if (i < n) {
        x += v * dt + 0.5 * s.accel * dt * dt;
        v += s.accel * dt;
      }
    }
    t += n * dt;
  }
  return std::nullopt;
}

struct CrossingCase {
  double x0 = 0.0;
  double t0 = 0.0;
  std::vector<wavecrest::TrajectorySegment> segments;
  wavecrest::Ray ray;
};

// Durations are multiples of 1e-3 so the stepper lands on breakpoints.
inline CrossingCase random_crossing_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto dur = [&] { return std::round((0.1 + 0.4 * u(rng)) * 1000.0) / 1000.0; };
  CrossingCase c;
  c.x0 = -1.0 + 2.0 * u(rng);
  c.t0 = std::round(u(rng) * 1000.0) / 1000.0;
  const int n = 1 + static_cast<int>(u(rng) * 4);
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = u(rng);
    const double d = dur();
    if (v == 0.0 && r < 0.25) {
      c.segments.push_back(wavecrest::TrajectorySegment::rest(d));
    } else if (r < 0.5 && v != 0.0) {
      c.segments.push_back(wavecrest::TrajectorySegment::coast(d, v));
    } else {
      const double a = -4.0 + 8.0 * u(rng);
      c.segments.push_back(wavecrest::TrajectorySegment::ramp(d, v, a));
      v += a * d;
    }
  }
  c.ray.t = c.t0 + 0.3 * u(rng);
  c.ray.x = c.x0 - 0.5 + u(rng);
  c.ray.speed = -3.0 + 6.0 * u(rng);
  return c;
}

}  // namespace oracle
