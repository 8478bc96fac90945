#include "wavecrest/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavecrest/error.hpp"

namespace wavecrest {

OverlapWindow shutter_overlap_window(const ShutterPair& p) {
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must lie in [0, 1]");
  if (!(p.L > 0.0)) throw Error(ErrorKind::InvalidInput, "shutter separation must be positive");
  if (p.v_g == 0.0) throw Error(ErrorKind::NoTransit, "zero group velocity: no transit between shutters");
  const double tau = p.L / std::abs(p.v_g);
  return {p.t1 + p.alpha * tau, tau * (1.0 - p.alpha)};
}

bool em_shutter_overlap(double t1, double t2, double L, double c) {
  if (!(L > 0.0)) throw Error(ErrorKind::InvalidInput, "shutter separation must be positive");
  return t2 - t1 < L / c;
}

double slab_transmission_shift(const SlabParams& p) {
  if (!(p.n > 0.0)) throw Error(ErrorKind::InvalidIndex, "index of refraction must be positive");
  return p.m * p.g * p.L * (1.0 - p.n) / (p.n * p.hbar);
}

bool crests_recede(double v_g, double V) noexcept { return v_g / 2.0 > V; }

double grating_phase_difference(double k, double L) noexcept { return 2.0 * k * L; }

namespace {

double source_wavevector(const WaveModel& model, double v_g, double em_k) {
  switch (model.family()) {
    case Family::Schrodinger:
    case Family::KleinGordon:
      return wavevector_from_group_speed(model, v_g);
    case Family::EMVacuum:
    case Family::Acoustic:
      return em_k;
  }
  return em_k;
}

double crest_spacing_for(const WaveModel& model, double k, double length, double span) {
  const double period = 2.0 * std::numbers::pi / dispersion_omega(model, k);
  double s = period;
  if (length > 0.0) s = std::min(s, length / (8.0 * std::abs(phase_velocity(model, k))));
  return std::max(s, span / 20000.0);
}

}  // namespace

Fig1Build build_fig1(const Fig1Params& p) {
  const double V = std::abs(p.coast_speed);
  const double L = p.displacement;
  if (!(p.v_g > 0.0)) throw Error(ErrorKind::InvalidInput, "fig1: v_g must be positive");
  if (!(L >= 0.0)) throw Error(ErrorKind::InvalidInput, "fig1: displacement must be non-negative");
  if (L > 0.0 && !(V > 0.0)) throw Error(ErrorKind::InvalidInput, "fig1: coast speed must be positive");

  Fig1Build b;
  b.x_top = p.x_top > 0.0 ? p.x_top : 2.0 * L + 2.0;
  b.x_bottom = b.x_top - L;
  b.x_detector = p.x_detector > 0.0 ? p.x_detector : 0.5 * b.x_bottom;
  if (!(b.x_detector > 0.0 && b.x_detector < b.x_bottom)) {
    throw Error(ErrorKind::InvalidInput, "fig1: detector must sit between the source and the lower BS position");
  }

  const double t_top = b.x_top / p.v_g;
  const double sweep_gap = V > p.v_g ? L * (1.0 / p.v_g - 1.0 / V) : 0.0;
  b.bs_start = sweep_gap > 0.0 ? t_top + p.lead_fraction * sweep_gap : t_top + 1.1 * L / p.v_g;
  std::vector<TrajectorySegment> segs;
  if (L > 0.0) {
    const double a = p.accel > 0.0 ? p.accel : 20.0 * V * V / L;
    if (!(a * L >= V * V)) throw Error(ErrorKind::InvalidInput, "fig1: acceleration too small to reach the coast speed");
    const double t_ramp = V / a;
    const double t_coast = L / V - V / a;
    segs.push_back(TrajectorySegment::rest(b.bs_start));
    segs.push_back(TrajectorySegment::ramp(t_ramp, 0.0, -a));
    if (t_coast > 0.0) segs.push_back(TrajectorySegment::coast(t_coast, -V));
    segs.push_back(TrajectorySegment::ramp(t_ramp, -V, a));
    segs.push_back(TrajectorySegment::rest(INFINITY));
    b.rest_time = b.bs_start + 2.0 * t_ramp + std::max(0.0, t_coast);
  } else {
    segs.push_back(TrajectorySegment::rest(INFINITY));
    b.rest_time = b.bs_start;
  }

  Scenario& sc = b.scenario;
  sc.model = p.model;
  const double k = source_wavevector(p.model, p.v_g, p.em_wavevector);
  sc.source.position = 0.0;
  sc.source.wave = plane_wave(p.model, k);
  sc.source.t_on = 0.0;
  sc.source.t_off = b.rest_time + 2.0 * (b.x_top + L) / p.v_g;
  sc.source.crest_spacing = crest_spacing_for(p.model, k, L, sc.source.t_off);

  Element bs;
  bs.name = "bs";
  bs.trajectory = Trajectory::make(b.x_top, 0.0, std::move(segs));
  bs.optics.initial = p.optics;
  sc.elements.push_back(std::move(bs));

  sc.detector.position = b.x_detector;
  sc.detector.direction = -1;
  sc.run.t_max = p.t_max > 0.0 ? p.t_max : sc.source.t_off;
  sc.run.x_min = -(0.1 * b.x_top + 1.0);
  sc.run.x_max = 1.1 * b.x_top + 1.0;

  if (p.model.family() == Family::Schrodinger && L > 0.0 &&
      !(V > std::abs(phase_velocity(p.model, k)))) {
    b.warnings.push_back("coast speed does not exceed the crest speed v_g/2: no overtaking occurs");
  }
  return b;
}

Scenario build_fig1_scenario(double v_g, double coast_speed, double displacement, double accel,
                             const WaveModel& model, const SplitterOptics& optics) {
  Fig1Params p;
  p.v_g = v_g;
  p.coast_speed = coast_speed;
  p.displacement = displacement;
  p.accel = accel;
  p.model = model;
  p.optics = optics;
  return build_fig1(p).scenario;
}

Scenario build_shutter_scenario(double t1, double t2, double L, const WaveModel& model, double k,
                                const SplitterOptics& lower) {
  if (!(L > 0.0)) throw Error(ErrorKind::InvalidInput, "shutter separation must be positive");
  if (!(t2 >= t1)) throw Error(ErrorKind::InvalidInput, "lower shutter must activate after the upper opens");
  const double v_g = std::abs(group_velocity(model, k));
  const double x_lower = L, x_upper = 2.0 * L;

  Scenario sc;
  sc.model = model;
  sc.source.position = 0.0;
  sc.source.wave = plane_wave(model, std::abs(k));
  sc.source.t_on = t1 - 4.0 * x_upper / v_g;
  sc.source.t_off = t2 + 8.0 * L / v_g;
  sc.source.crest_spacing =
      crest_spacing_for(model, std::abs(k), L, sc.source.t_off - sc.source.t_on);

  Element upper;
  upper.name = "upper";
  upper.trajectory = Trajectory::stationary(x_upper, sc.source.t_on);
  upper.optics.initial = SplitterOptics::mirror();
  upper.optics.changes.emplace_back(t1, SplitterOptics::transparent());
  Element low;
  low.name = "lower";
  low.trajectory = Trajectory::stationary(x_lower, sc.source.t_on);
  low.optics.initial = SplitterOptics::transparent();
  low.optics.changes.emplace_back(t2, lower);
  sc.elements.push_back(std::move(upper));
  sc.elements.push_back(std::move(low));

  sc.detector.position = 0.5 * L;
  sc.detector.direction = -1;
  sc.run.t_max = sc.source.t_off + 4.0 * L / v_g;
  sc.run.x_min = -L;
  sc.run.x_max = 3.0 * L;
  return sc;
}

Scenario build_shutter_scenario(const ShutterPair& p, const WaveModel& model, double em_wavevector) {
  const double k = source_wavevector(model, p.v_g, em_wavevector);
  ShutterPair q = p;
  q.v_g = group_velocity(model, k);
  const OverlapWindow w = shutter_overlap_window(q);
  return build_shutter_scenario(p.t1, w.t2, p.L, model, k);
}

}  // namespace wavecrest
