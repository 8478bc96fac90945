#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wavecrest {

enum class SegmentKind { Rest, ConstVelocity, ConstAccel };

std::string_view segment_kind_name(SegmentKind k);
std::optional<SegmentKind> segment_kind_from_name(std::string_view name);

struct TrajectorySegment {
  SegmentKind kind = SegmentKind::Rest;
  double duration = 0.0;  // > 0; the last segment may be +inf
  double velocity0 = 0.0;
  double accel = 0.0;

  static TrajectorySegment rest(double duration) {
    return {SegmentKind::Rest, duration, 0.0, 0.0};
  }
  static TrajectorySegment coast(double duration, double velocity) {
    return {SegmentKind::ConstVelocity, duration, velocity, 0.0};
  }
  static TrajectorySegment ramp(double duration, double velocity0, double accel) {
    return {SegmentKind::ConstAccel, duration, velocity0, accel};
  }

  double end_velocity() const noexcept { return velocity0 + accel * duration; }
};

struct KinematicState {
  double position = 0.0;
  double velocity = 0.0;
};

/// Straight worldline x(t) = x + speed * (t - t_ref).
struct Ray {
  double x = 0.0;
  double t = 0.0;
  double speed = 0.0;

  double position_at(double time) const noexcept { return x + speed * (time - t); }
};

/// Piecewise rest / constant-velocity / constant-acceleration worldline with
/// continuous position and velocity.
class Trajectory {
 public:
  /// Validates segment invariants and velocity continuity; throws
  /// Error(Validation) naming the offending segment index.
  static Trajectory make(double x0, double t0, std::vector<TrajectorySegment> segments);
  static Trajectory stationary(double x, double t0 = 0.0);

  double x0() const noexcept { return x0_; }
  double t0() const noexcept { return t0_; }
  double t_end() const noexcept { return starts_.back(); }
  std::span<const TrajectorySegment> segments() const noexcept { return segments_; }

  double segment_start(std::size_t i) const { return starts_[i]; }
  double segment_end(std::size_t i) const { return starts_[i + 1]; }
  double segment_start_position(std::size_t i) const { return positions_[i]; }

  /// Index of the segment containing t; a boundary instant belongs to the
  /// earlier segment.
  std::size_t segment_index(double t) const;

  KinematicState state_at(double t) const;
  double max_abs_velocity() const noexcept;
  bool is_static() const noexcept;

  /// Segment boundary instants including t0 and (if finite) t_end.
  std::vector<double> breakpoints() const;

 private:
  double x0_ = 0.0;
  double t0_ = 0.0;
  std::vector<TrajectorySegment> segments_;
  std::vector<double> starts_;     // size n+1
  std::vector<double> positions_;  // size n+1
};

/// Relative discriminant tolerance below which a ray grazing a parabolic
/// segment is reported as one touch.
inline constexpr double kTangencyEps = 1e-12;

/// Smallest t >= max(ray.t, t0) at which the ray meets the trajectory.
std::optional<double> first_crossing(const Trajectory& traj, const Ray& ray);

/// Like first_crossing but searches [t_lo, t_hi]; with exclude_start, a root
/// within a relative 1e-10 of t_lo is skipped (ray born on the worldline).
std::optional<double> first_crossing_in(const Trajectory& traj, const Ray& ray,
                                        double t_lo, double t_hi,
                                        bool exclude_start = false);

/// All crossing instants in [t_lo, t_hi], ascending.
std::vector<double> all_crossings(const Trajectory& traj, const Ray& ray, double t_lo,
                                  double t_hi);

}  // namespace wavecrest
