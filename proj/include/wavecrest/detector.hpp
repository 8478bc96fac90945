#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavecrest/tracer.hpp"
#include "wavecrest/trajectory.hpp"

namespace wavecrest {

struct DetectorTrace {
  double position = 0.0;
  std::vector<double> times;
  std::vector<std::complex<double>> amplitude;
  std::vector<double> pdf;  // |amplitude|^2
  std::vector<WaveSegment> segments;
};

/// Sum of the active segments' plane waves at x_D; a segment is active on
/// [t_in, t_out). Parallel over the grid.
DetectorTrace superpose(const std::vector<WaveSegment>& segments, double x_d,
                        const std::vector<double>& t_grid);

/// Single-threaded reference for superpose; identical results.
DetectorTrace superpose_serial(const std::vector<WaveSegment>& segments, double x_d,
                               const std::vector<double>& t_grid);

/// Uniform grid over the union of segment windows with `sample_rate` points
/// per shortest beat period among overlapping segments. Capped at
/// `max_samples` points.
std::vector<double> default_time_grid(const std::vector<WaveSegment>& segments,
                                      double sample_rate, double t_max = INFINITY,
                                      std::size_t max_samples = 200'000);

struct WindowReport {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<std::int64_t> participants;  // segment ids
  std::size_t distinct_frequencies = 0;
  std::optional<double> beat_frequency;
  double visibility = 0.0;
  std::optional<double> stationary_phase_difference;  // in [0, 2pi)
  bool low_confidence = false;
  std::vector<std::string> flags;
};

struct BeatFit {
  double omega = 0.0;
  double offset = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double rms_residual = 0.0;
};

/// Beat between two overlapping segments of different frequency, fitted
/// over their whole common interval (other arrivals included).
struct PairBeat {
  std::int64_t first = 0;   // segment ids
  std::int64_t second = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double expected = 0.0;  // |omega_1 - omega_2|
  BeatFit fit;
  bool low_confidence = false;
};

struct InterferenceReport {
  std::vector<WindowReport> windows;
  std::vector<PairBeat> pairs;  // pairs overlapping for at least one beat period

  /// Equal-frequency window with the most participants (longest on ties).
  const WindowReport* stationary_window() const;
  /// Latest window whose participants carry distinct frequencies.
  const WindowReport* last_beat_window() const;
  /// Pair beat with the longest common interval.
  const PairBeat* dominant_pair() const;
};

/// Splits the trace into windows of constant participation and fits each.
InterferenceReport analyze(const DetectorTrace& trace);

/// Least-squares fit of y(t) = A + B cos(Omega t + phi), seeded by the
/// strongest discrete-spectrum peak.
BeatFit fit_beat(const std::vector<double>& t, const std::vector<double>& y);

/// Relative frequency tolerance for "same omega".
inline constexpr double kSameOmegaTol = 1e-9;

// ---------------------------------------------------------- retarded phase

/// Straight propagation over `length` at `phase_speed`.
struct StaticLeg {
  double length = 0.0;
  double phase_speed = 0.0;
};

/// Out from `x_from` at `speed_in` to a reflector moving along `reflector`,
/// then back to `x_to` at `speed_out`. The reflection instant is searched
/// in [t_lo, t_hi].
struct MovingReflectorLeg {
  double x_from = 0.0;
  double speed_in = 0.0;
  Trajectory reflector = Trajectory::stationary(0.0);
  double speed_out = 0.0;
  double x_to = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

using PathLeg = std::variant<StaticLeg, MovingReflectorLeg>;

struct RetardedPhase {
  double t_ret = 0.0;
  double phase = 0.0;  // -omega0 * t_ret
};

/// Walks the path backwards from the arrival time t. Throws
/// Error(UnreachablePath) when a moving-reflector leg has no root.
RetardedPhase retarded_phase(const std::vector<PathLeg>& path, double omega0, double t);

}  // namespace wavecrest
