#include "wavecrest/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavecrest/error.hpp"

namespace wavecrest {

std::string_view segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::Rest: return "rest";
    case SegmentKind::ConstVelocity: return "const_velocity";
    case SegmentKind::ConstAccel: return "const_accel";
  }
  return "unknown";
}

std::optional<SegmentKind> segment_kind_from_name(std::string_view name) {
  for (auto k : {SegmentKind::Rest, SegmentKind::ConstVelocity, SegmentKind::ConstAccel}) {
    if (segment_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void bad_segment(std::size_t i, const std::string& why) {
  throw Error(ErrorKind::Validation, "segment " + std::to_string(i) + ": " + why);
}

double displacement(const TrajectorySegment& s, double tau) {
  return s.velocity0 * tau + 0.5 * s.accel * tau * tau;
}

// Roots of a*tau^2 + b*tau + c in [lo, hi], ascending.
void quadratic_roots(double a, double b, double c, double lo, double hi, double slack,
                     std::vector<double>& out) {
  auto accept = [&](double r) {
    if (r >= lo - slack && r <= hi + slack) out.push_back(std::clamp(r, lo, hi));
  };
  if (a == 0.0) {
    if (b == 0.0) {
      if (c == 0.0) out.push_back(lo);  // ray lies on the segment
      return;
    }
    accept(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  const double scale = b * b + std::abs(4.0 * a * c);
  if (std::abs(disc) <= kTangencyEps * scale) {
    accept(-b / (2.0 * a));
    return;
  }
  if (disc < 0.0) return;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = (q != 0.0) ? c / q : -r1;
  if (r1 > r2) std::swap(r1, r2);
  accept(r1);
  accept(r2);
}

}  // namespace

Trajectory Trajectory::make(double x0, double t0, std::vector<TrajectorySegment> segments) {
  if (!std::isfinite(x0) || !std::isfinite(t0)) {
    throw Error(ErrorKind::Validation, "trajectory origin must be finite");
  }
  if (segments.empty()) {
    throw Error(ErrorKind::Validation, "trajectory needs at least one segment");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const bool last = i + 1 == segments.size();
    if (!(s.duration > 0.0) || std::isnan(s.duration) ||
        (!last && !std::isfinite(s.duration))) {
      bad_segment(i, "duration must be positive (only the last may be unbounded)");
    }
    if (!std::isfinite(s.velocity0) || !std::isfinite(s.accel)) {
      bad_segment(i, "velocity and acceleration must be finite");
    }
    if (s.kind == SegmentKind::Rest && (s.velocity0 != 0.0 || s.accel != 0.0)) {
      bad_segment(i, "rest segment requires zero velocity and acceleration");
    }
    if (s.kind == SegmentKind::ConstVelocity && s.accel != 0.0) {
      bad_segment(i, "constant-velocity segment requires zero acceleration");
    }
    if (s.kind == SegmentKind::ConstAccel && !std::isfinite(s.duration)) {
      bad_segment(i, "accelerating segment must have finite duration");
    }
    if (i > 0) {
      const double prev = segments[i - 1].end_velocity();
      const double tol = 1e-9 * std::max({1.0, std::abs(prev), std::abs(s.velocity0)});
      if (std::abs(prev - s.velocity0) > tol) {
        bad_segment(i, "velocity discontinuity (previous segment ends at " +
                           std::to_string(prev) + ", this starts at " +
                           std::to_string(s.velocity0) + ")");
      }
    }
  }
  Trajectory tr;
  tr.x0_ = x0;
  tr.t0_ = t0;
  tr.segments_ = std::move(segments);
  tr.starts_.reserve(tr.segments_.size() + 1);
  tr.positions_.reserve(tr.segments_.size() + 1);
  double t = t0, x = x0;
  for (const auto& s : tr.segments_) {
    tr.starts_.push_back(t);
    tr.positions_.push_back(x);
    if (std::isfinite(s.duration)) x += displacement(s, s.duration);
    t += s.duration;
  }
  tr.starts_.push_back(t);
  tr.positions_.push_back(x);
  return tr;
}

Trajectory Trajectory::stationary(double x, double t0) {
  return make(x, t0, {TrajectorySegment::rest(INFINITY)});
}

std::size_t Trajectory::segment_index(double t) const {
  // first segment whose end is >= t
  auto it = std::lower_bound(starts_.begin() + 1, starts_.end(), t);
  if (it == starts_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

KinematicState Trajectory::state_at(double t) const {
  if (!(t >= t0_) || t > t_end()) {
    throw Error(ErrorKind::OutOfRange,
                "time " + std::to_string(t) + " outside trajectory domain");
  }
  const std::size_t i = segment_index(t);
  const auto& s = segments_[i];
  const double tau = t - starts_[i];
  return {positions_[i] + displacement(s, tau), s.velocity0 + s.accel * tau};
}

double Trajectory::max_abs_velocity() const noexcept {
  double m = 0.0;
  for (const auto& s : segments_) {
    m = std::max(m, std::abs(s.velocity0));
    if (std::isfinite(s.duration)) m = std::max(m, std::abs(s.end_velocity()));
  }
  return m;
}

bool Trajectory::is_static() const noexcept {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const TrajectorySegment& s) { return s.kind == SegmentKind::Rest; });
}

std::vector<double> Trajectory::breakpoints() const {
  std::vector<double> out;
  for (double t : starts_) {
    if (std::isfinite(t)) out.push_back(t);
  }
  return out;
}

std::vector<double> all_crossings(const Trajectory& traj, const Ray& ray, double t_lo,
                                  double t_hi) {
  std::vector<double> out;
  t_lo = std::max(t_lo, traj.t0());
  t_hi = std::min(t_hi, traj.t_end());
  if (!(t_lo <= t_hi) || !std::isfinite(ray.speed)) return out;
  const double slack_scale = 1e-12 * std::max({1.0, std::abs(t_lo),
                                               std::isfinite(t_hi) ? std::abs(t_hi) : 0.0});
  std::vector<double> local;
  for (std::size_t i = traj.segment_index(t_lo); i < traj.segments().size(); ++i) {
    const double ts = traj.segment_start(i);
    const double te = traj.segment_end(i);
    if (ts > t_hi) break;
    const auto& s = traj.segments()[i];
    const double lo = std::max(t_lo, ts) - ts;
    const double hi = std::min(t_hi, te) - ts;
    const double xl0 = ray.position_at(ts);
    local.clear();
    quadratic_roots(0.5 * s.accel, s.velocity0 - ray.speed,
                    traj.segment_start_position(i) - xl0, lo, hi, slack_scale, local);
    for (double tau : local) {
      const double t = ts + tau;
      // a root on a shared boundary belongs to the earlier segment
      if (!out.empty() && std::abs(out.back() - t) <= slack_scale) continue;
      out.push_back(t);
    }
  }
  return out;
}

std::optional<double> first_crossing_in(const Trajectory& traj, const Ray& ray,
                                        double t_lo, double t_hi, bool exclude_start) {
  t_lo = std::max(t_lo, traj.t0());
  t_hi = std::min(t_hi, traj.t_end());
  if (!(t_lo <= t_hi) || !std::isfinite(ray.speed)) return std::nullopt;
  const double skip = 1e-10 * std::max(1.0, std::abs(t_lo));
  const double slack_scale = 1e-12 * std::max(1.0, std::abs(t_lo));
  std::vector<double> local;
  for (std::size_t i = traj.segment_index(t_lo); i < traj.segments().size(); ++i) {
    const double ts = traj.segment_start(i);
    if (ts > t_hi) break;
    const auto& s = traj.segments()[i];
    const double lo = std::max(t_lo, ts) - ts;
    const double hi = std::min(t_hi, traj.segment_end(i)) - ts;
    local.clear();
    quadratic_roots(0.5 * s.accel, s.velocity0 - ray.speed,
                    traj.segment_start_position(i) - ray.position_at(ts), lo, hi,
                    slack_scale, local);
    for (double tau : local) {
      const double t = ts + tau;
      if (exclude_start && t - t_lo <= skip) continue;
      return t;
    }
  }
  return std::nullopt;
}

std::optional<double> first_crossing(const Trajectory& traj, const Ray& ray) {
  return first_crossing_in(traj, ray, std::max(ray.t, traj.t0()), INFINITY);
}

}  // namespace wavecrest
