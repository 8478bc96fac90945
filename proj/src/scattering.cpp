#include "wavecrest/scattering.hpp"

#include <cmath>
#include <string>

#include "wavecrest/error.hpp"

namespace wavecrest {

SplitterOptics SplitterOptics::from_reflectivity(double r, double interface_phase) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "reflectivity must lie in [0, 1]");
  }
  return {r, std::sqrt((1.0 - r) * (1.0 + r)), interface_phase};
}

PlaneWave galilean_boost_plane_wave(const WaveModel& model, const PlaneWave& wave, double V) {
  if (model.family() != Family::Schrodinger) {
    throw Error(ErrorKind::WrongModel, "Galilean boost applies to Schrodinger waves only");
  }
  const Units& u = model.units();
  PlaneWave out = wave;
  out.k = wave.k - u.mass * V / u.hbar;
  // omega - kV + mV^2/2hbar, evaluated as hbar k'^2/2m to stay on the
  // dispersion curve without cancellation
  out.omega = dispersion_omega(model, out.k);
  return out;
}

PlaneWave lorentz_boost_wave(const WaveModel& model, const PlaneWave& wave, double V) {
  if (!model.is_relativistic()) {
    throw Error(ErrorKind::WrongModel,
                "Lorentz boost applies to Klein-Gordon or vacuum EM waves only");
  }
  const double c = model.units().c;
  const double beta = V / c;
  if (!(std::abs(beta) < 1.0)) {
    throw Error(ErrorKind::Superluminal, "boost speed must satisfy |V| < c");
  }
  const double gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
  PlaneWave out = wave;
  out.omega = gamma * (wave.omega - V * wave.k);
  out.k = gamma * (wave.k - V * wave.omega / (c * c));
  return out;
}

namespace {

void check_incidence(double k_rest, double k_scale) {
  if (std::abs(k_rest) <= 1e-14 * k_scale) {
    throw Error(ErrorKind::DegenerateIncidence,
                "wave is at rest relative to the splitter; no incidence");
  }
}

double rest_frame_k(const WaveModel& model, const PlaneWave& wave, double V) {
  switch (model.family()) {
    case Family::Schrodinger:
      return galilean_boost_plane_wave(model, wave, V).k;
    case Family::KleinGordon:
    case Family::EMVacuum:
      return lorentz_boost_wave(model, wave, V).k;
    case Family::Acoustic:
      // medium frame is the lab
      return wave.k * (model.units().sound_speed - std::copysign(1.0, wave.k) * V);
  }
  return wave.k;
}

double k_scale(const WaveModel& model, const PlaneWave& wave, double V) {
  const Units& u = model.units();
  double s = std::abs(wave.k);
  if (model.family() == Family::Schrodinger) s = std::max(s, std::abs(u.mass * V / u.hbar));
  if (model.is_relativistic()) s = std::max(s, std::abs(V * wave.omega) / (u.c * u.c));
  return std::max(s, 1e-300);
}

}  // namespace

PlaneWave reflect_at_moving_bs(const WaveModel& model, const PlaneWave& wave, double V,
                               const SplitterOptics& optics, Contact contact) {
  const double limit = model.speed_limit();
  if (!(std::abs(V) < limit)) {
    throw Error(ErrorKind::Superluminal, "splitter speed must stay below the wave speed limit");
  }
  check_incidence(rest_frame_k(model, wave, V), k_scale(model, wave, V));

  PlaneWave out = wave;
  switch (model.family()) {
    case Family::Schrodinger: {
      PlaneWave rest = galilean_boost_plane_wave(model, wave, V);
      rest.k = -rest.k;
      out = galilean_boost_plane_wave(model, rest, -V);
      break;
    }
    case Family::KleinGordon:
    case Family::EMVacuum: {
      PlaneWave rest = lorentz_boost_wave(model, wave, V);
      rest.k = -rest.k;
      out = lorentz_boost_wave(model, rest, -V);
      break;
    }
    case Family::Acoustic: {
      const double cs = model.units().sound_speed;
      const double s = std::copysign(1.0, wave.k);
      const double mag = (cs * std::abs(wave.k) - wave.k * V) / (cs + s * V);
      out.k = -s * mag;
      out.omega = cs * mag;
      break;
    }
  }
  out.amplitude = wave.amplitude * optics.r;
  out.phase0 = wave.phase_at(contact.x, contact.t) - (out.k * contact.x - out.omega * contact.t) +
               optics.interface_phase;
  return out;
}

PlaneWave transmit_at_moving_bs(const WaveModel& model, const PlaneWave& wave, double V,
                                const SplitterOptics& optics) {
  check_incidence(rest_frame_k(model, wave, V), k_scale(model, wave, V));
  PlaneWave out = wave;
  out.amplitude = wave.amplitude * optics.t;
  return out;
}

std::vector<PlaneWave> comoving_reflection_sequence(const WaveModel& model,
                                                    const PlaneWave& wave,
                                                    const Trajectory& traj, double t_a,
                                                    double t_b, int substeps,
                                                    const SplitterOptics& optics) {
  if (substeps < 1) {
    throw Error(ErrorKind::InvalidInput, "substeps must be at least 1");
  }
  if (!(t_a <= t_b) || t_a < traj.t0() || t_b > traj.t_end()) {
    throw Error(ErrorKind::OutOfRange, "interval outside trajectory domain");
  }
  std::vector<PlaneWave> out;
  out.reserve(static_cast<std::size_t>(substeps));
  const double dt = (t_b - t_a) / substeps;
  for (int i = 0; i < substeps; ++i) {
    const double tm = t_a + (i + 0.5) * dt;
    const KinematicState st = traj.state_at(tm);
    try {
      out.push_back(reflect_at_moving_bs(model, wave, st.velocity, optics, {st.position, tm}));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateIncidence) throw;
      throw Error(ErrorKind::DegenerateIncidence,
                  "sub-interval " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Incidence classify_incidence(double V, double crest_speed, double group_speed) noexcept {
  if (V == 0.0 || std::signbit(V) != std::signbit(crest_speed)) return Incidence::HeadOn;
  if (std::abs(V) > std::abs(crest_speed)) return Incidence::Overtake;
  if (std::abs(group_speed) > std::abs(V)) return Incidence::HeadOn;
  return Incidence::Outrun;
}

}  // namespace wavecrest
