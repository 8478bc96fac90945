#include "wavecrest/wavemodel.hpp"

#include <array>
#include <cmath>
#include <string>

#include "wavecrest/error.hpp"

namespace wavecrest {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::UndefinedPhaseVelocity: return "undefined-phase-velocity";
    case ErrorKind::Superluminal: return "superluminal";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::WrongModel: return "wrong-model";
    case ErrorKind::DegenerateIncidence: return "degenerate-incidence";
    case ErrorKind::UnreachablePath: return "unreachable-path";
    case ErrorKind::NoTransit: return "no-transit";
    case ErrorKind::InvalidIndex: return "invalid-index";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Explosion: return "explosion";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 4> kFamilyNames{{
    {Family::Schrodinger, "schrodinger"},
    {Family::KleinGordon, "klein_gordon"},
    {Family::EMVacuum, "em_vacuum"},
    {Family::Acoustic, "acoustic"},
}};

void require_finite(double k) {
  if (!std::isfinite(k)) {
    throw Error(ErrorKind::InvalidInput, "wavevector must be finite");
  }
}

}  // namespace

std::string_view family_name(Family f) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (fam == f) return name;
  }
  return "unknown";
}

Family family_from_name(std::string_view name) {
  for (const auto& [fam, n] : kFamilyNames) {
    if (n == name) return fam;
  }
  throw Error(ErrorKind::InvalidInput,
              "unknown wave family '" + std::string(name) + "'");
}

WaveModel WaveModel::make(Family family, const Units& units) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(units.hbar) || !positive(units.mass)) {
    throw Error(ErrorKind::InvalidInput, "hbar and mass must be positive and finite");
  }
  if ((family == Family::KleinGordon || family == Family::EMVacuum) &&
      !positive(units.c)) {
    throw Error(ErrorKind::InvalidInput, "light speed must be positive and finite");
  }
  if (family == Family::Acoustic && !positive(units.sound_speed)) {
    throw Error(ErrorKind::InvalidInput, "sound speed must be positive and finite");
  }
  return WaveModel(family, units);
}

double WaveModel::speed_limit() const noexcept {
  switch (family_) {
    case Family::KleinGordon:
    case Family::EMVacuum: return units_.c;
    case Family::Acoustic: return units_.sound_speed;
    case Family::Schrodinger: break;
  }
  return INFINITY;
}

double dispersion_omega(const WaveModel& model, double k) {
  require_finite(k);
  const Units& u = model.units();
  switch (model.family()) {
    case Family::Schrodinger: return u.hbar * k * k / (2.0 * u.mass);
    case Family::KleinGordon: return u.c * std::hypot(k, u.mass * u.c / u.hbar);
    case Family::EMVacuum: return u.c * std::abs(k);
    case Family::Acoustic: return u.sound_speed * std::abs(k);
  }
  return 0.0;
}

double phase_velocity(const WaveModel& model, double k) {
  require_finite(k);
  if (k == 0.0) {
    throw Error(ErrorKind::UndefinedPhaseVelocity, "phase velocity undefined at k = 0");
  }
  if (model.family() == Family::Schrodinger) {
    // hbar k / 2m: exactly half the group velocity
    return group_velocity(model, k) / 2.0;
  }
  return dispersion_omega(model, k) / k;
}

double group_velocity(const WaveModel& model, double k) {
  require_finite(k);
  const Units& u = model.units();
  switch (model.family()) {
    case Family::Schrodinger: return u.hbar * k / u.mass;
    case Family::KleinGordon: return u.c * u.c * k / dispersion_omega(model, k);
    case Family::EMVacuum:
    case Family::Acoustic:
      if (k == 0.0) {
        throw Error(ErrorKind::InvalidInput,
                    "group velocity direction undefined at k = 0 for a linear dispersion");
      }
      return std::copysign(model.speed_limit(), k);
  }
  return 0.0;
}

double wavevector_from_group_speed(const WaveModel& model, double v_g) {
  if (!std::isfinite(v_g)) {
    throw Error(ErrorKind::InvalidInput, "group speed must be finite");
  }
  const Units& u = model.units();
  switch (model.family()) {
    case Family::Schrodinger: return u.mass * v_g / u.hbar;
    case Family::KleinGordon: {
      const double beta = v_g / u.c;
      if (std::abs(beta) >= 1.0) {
        throw Error(ErrorKind::Superluminal,
                    "Klein-Gordon group speed must satisfy |v_g| < c");
      }
      const double gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
      return gamma * u.mass * v_g / u.hbar;
    }
    case Family::EMVacuum:
    case Family::Acoustic: break;
  }
  throw Error(ErrorKind::WrongModel,
              "group speed does not determine the wavevector for a linear dispersion");
}

PlaneWave plane_wave(const WaveModel& model, double k, std::complex<double> amplitude,
                     double phase0) {
  return PlaneWave{k, dispersion_omega(model, k), amplitude, phase0};
}

bool satisfies_dispersion(const WaveModel& model, const PlaneWave& w, double rel_tol) {
  const double expected = dispersion_omega(model, w.k);
  const double scale = std::max(std::abs(expected), std::abs(w.omega));
  if (scale == 0.0) return true;
  return std::abs(w.omega - expected) <= rel_tol * scale;
}

}  // namespace wavecrest
