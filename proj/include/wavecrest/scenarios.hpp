#pragma once

#include <string>
#include <vector>

#include "wavecrest/scattering.hpp"
#include "wavecrest/tracer.hpp"
#include "wavecrest/wavemodel.hpp"

namespace wavecrest {

// ------------------------------------------------------------- shutters

struct ShutterPair {
  double t1 = 0.0;     // upper shutter opens
  double alpha = 0.0;  // lower shutter activates at t1 + alpha * tau
  double L = 1.0;      // shutter separation
  double v_g = 1.0;
};

struct OverlapWindow {
  double t2 = 0.0;
  double duration = 0.0;
};

/// tau = L / v_g, t2 = t1 + alpha tau, duration tau (1 - alpha).
/// Throws NoTransit for v_g = 0 and InvalidInput for alpha outside [0, 1]
/// or L <= 0.
OverlapWindow shutter_overlap_window(const ShutterPair& p);

/// Light-speed shutters overlap iff t2 - t1 < L / c (the boundary does not).
bool em_shutter_overlap(double t1, double t2, double L, double c);

// ----------------------------------------------------------------- slab

struct SlabParams {
  double m = 1.0;
  double g = 1.0;
  double L = 1.0;
  double n = 1.0;
  double hbar = 1.0;
};

/// m g L (1 - n) / (n hbar), in the units of the supplied hbar.
double slab_transmission_shift(const SlabParams& p);

/// Transmitted crests recede from a slab moving at V when v_g / 2 > V.
bool crests_recede(double v_g, double V) noexcept;

double grating_phase_difference(double k, double L) noexcept;

// ---------------------------------------------------------- moving splitter

struct Fig1Params {
  double v_g = 0.2;
  double coast_speed = 1.0;   // V, the BS moves toward the source
  double displacement = 5.0;  // L
  double accel = 0.0;         // 0 selects 20 V^2 / L
  WaveModel model = WaveModel::make(Family::Schrodinger);
  SplitterOptics optics = SplitterOptics::balanced();
  double em_wavevector = 0.2;  // used when the model has no v_g -> k map
  double x_top = 0.0;          // initial BS position, 0 selects 2 L + 2
  double x_detector = 0.0;     // 0 selects halfway between source and x_top - L
  double t_max = 0.0;          // 0 selects a horizon past the final window
  // The BS leaves the top after the reflected train has grown for this
  // fraction of L (1/v_g - 1/V), so the whole train is later swept by the BS.
  double lead_fraction = 0.9;
};

struct Fig1Build {
  Scenario scenario;
  double bs_start = 0.0;  // BS leaves the upper position
  double rest_time = 0.0; // BS comes to rest at the lower position
  double x_top = 0.0;
  double x_bottom = 0.0;
  double x_detector = 0.0;
  std::vector<std::string> warnings;
};

/// Source at x = 0 emitting upward; BS at x_top moving down by L through
/// rest, -a ramp, coast at -V, +a ramp, rest. The trajectory depends only on
/// (v_g, V, L, a) so it is shared across models.
Fig1Build build_fig1(const Fig1Params& p);
Scenario build_fig1_scenario(double v_g, double coast_speed, double displacement, double accel,
                             const WaveModel& model,
                             const SplitterOptics& optics = SplitterOptics::balanced());

/// Static upper mirror switching to transparent at t1 and a lower shutter,
/// transparent until t2 and then `lower`; source below, detector between
/// source and lower shutter.
Scenario build_shutter_scenario(double t1, double t2, double L, const WaveModel& model, double k,
                                const SplitterOptics& lower = SplitterOptics::balanced());

/// As above with t2 from shutter_overlap_window. Under EM the wavevector is
/// taken from em_wavevector and v_g from the model.
Scenario build_shutter_scenario(const ShutterPair& p, const WaveModel& model,
                                double em_wavevector = 1.0);

}  // namespace wavecrest
