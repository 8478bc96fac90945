#pragma once

#include <complex>
#include <string_view>

namespace wavecrest {

enum class Family { Schrodinger, KleinGordon, EMVacuum, Acoustic };

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);

/// Physical constants. Natural units (hbar = m = c = 1) by default.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;
  double c = 1.0;
  double sound_speed = 1.0;
};

/// Dispersion family plus the constants it needs. Construct through make()
/// so the family/units consistency is checked once.
class WaveModel {
 public:
  static WaveModel make(Family family, const Units& units = {});

  Family family() const noexcept { return family_; }
  const Units& units() const noexcept { return units_; }

  /// Speed limit for boundaries moving through this model's waves:
  /// c for KleinGordon/EMVacuum, sound speed for Acoustic, none otherwise.
  double speed_limit() const noexcept;

  bool is_relativistic() const noexcept {
    return family_ == Family::KleinGordon || family_ == Family::EMVacuum;
  }

 private:
  WaveModel(Family f, const Units& u) : family_(f), units_(u) {}
  Family family_;
  Units units_;
};

/// One homogeneous piece of a wave train: exp(i(kx - wt + phase0)) * amplitude.
/// omega is non-negative; direction lives in sign(k).
struct PlaneWave {
  double k = 0.0;
  double omega = 0.0;
  std::complex<double> amplitude{1.0, 0.0};
  double phase0 = 0.0;

  double phase_at(double x, double t) const noexcept {
    return k * x - omega * t + phase0;
  }
};

double dispersion_omega(const WaveModel& model, double k);
double phase_velocity(const WaveModel& model, double k);
double group_velocity(const WaveModel& model, double k);
double wavevector_from_group_speed(const WaveModel& model, double v_g);

/// Plane wave of the model with the given wavevector, amplitude 1.
PlaneWave plane_wave(const WaveModel& model, double k,
                     std::complex<double> amplitude = {1.0, 0.0},
                     double phase0 = 0.0);

/// True if (k, omega) satisfies the model dispersion to relative tolerance.
bool satisfies_dispersion(const WaveModel& model, const PlaneWave& w,
                          double rel_tol = 1e-12);

}  // namespace wavecrest
