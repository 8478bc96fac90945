#pragma once

#include <vector>

#include "wavecrest/trajectory.hpp"
#include "wavecrest/wavemodel.hpp"

namespace wavecrest {

/// Rest-frame amplitudes of a zero-thickness beamsplitter. r and t are real;
/// interface_phase is an extra phase added on reflection (0 for an ideal
/// splitter).
struct SplitterOptics {
  double r = 0.70710678118654752;
  double t = 0.70710678118654752;
  double interface_phase = 0.0;

  /// t is derived from r so that r^2 + t^2 = 1.
  static SplitterOptics from_reflectivity(double r, double interface_phase = 0.0);
  static SplitterOptics balanced() { return from_reflectivity(0.70710678118654752); }
  static SplitterOptics mirror() { return {1.0, 0.0, 0.0}; }
  static SplitterOptics transparent() { return {0.0, 1.0, 0.0}; }

  bool is_transparent() const noexcept { return r == 0.0; }
};

/// Frame change x' = x - V t for a Schrodinger plane wave:
/// k' = k - mV/hbar, omega' = omega - kV + mV^2/(2 hbar).
PlaneWave galilean_boost_plane_wave(const WaveModel& model, const PlaneWave& wave, double V);

/// Lorentz frame change for Klein-Gordon or vacuum EM waves:
/// omega' = gamma(omega - V k), k' = gamma(k - V omega / c^2).
PlaneWave lorentz_boost_wave(const WaveModel& model, const PlaneWave& wave, double V);

/// A point on the splitter worldline where incident and reflected phases
/// are matched.
struct Contact {
  double x = 0.0;
  double t = 0.0;
};

/// Reflection from a splitter moving at V: boost to its rest frame, mirror
/// k' -> -k', boost back. Amplitude gains r, phase is continuous at contact.
PlaneWave reflect_at_moving_bs(const WaveModel& model, const PlaneWave& wave, double V,
                               const SplitterOptics& optics, Contact contact = {});

/// Transmission leaves (k, omega, phase0) untouched and scales the amplitude by t.
PlaneWave transmit_at_moving_bs(const WaveModel& model, const PlaneWave& wave, double V,
                                const SplitterOptics& optics);

/// Splits [t_a, t_b] into `substeps` equal pieces and reflects with the
/// splitter velocity at each midpoint (momentarily comoving frames).
std::vector<PlaneWave> comoving_reflection_sequence(const WaveModel& model,
                                                    const PlaneWave& wave,
                                                    const Trajectory& traj, double t_a,
                                                    double t_b, int substeps,
                                                    const SplitterOptics& optics = {});

/// How wave crests meet a boundary moving at V.
enum class Incidence {
  HeadOn,    // crests hit the face (opposite motion, static boundary, or crests catching up)
  Overtake,  // boundary passes crests from behind (|V| > |crest speed|, same direction)
  Outrun,    // boundary sweeps the envelope but crests keep ahead of it
};

Incidence classify_incidence(double V, double crest_speed, double group_speed) noexcept;

}  // namespace wavecrest
