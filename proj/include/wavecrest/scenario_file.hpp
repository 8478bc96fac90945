#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavecrest/tracer.hpp"

namespace wavecrest {

/// In-memory form of the line-oriented scenario format:
///
///   [section]
///   key = value
///   segment = kind,duration,velocity0,accel   (repeated, beamsplitter only)
///
/// Blank lines and lines starting with '#' are ignored.
struct ScenarioFile {
  struct Units {
    double hbar = 1.0;
    double m = 1.0;
    double c = 1.0;
    std::optional<double> sound_speed;
  } units;
  Family family = Family::Schrodinger;
  struct SourceSection {
    double position = 0.0;
    std::optional<double> v_g;
    std::optional<double> omega0;
    double t_on = 0.0;
    double t_off = 0.0;
    double crest_spacing = 1.0;
  } source;
  struct Beamsplitter {
    double reflectivity = 0.70710678118654752;
    std::optional<double> interface_phase;
    double x0 = 0.0;
    double t0 = 0.0;
    std::vector<TrajectorySegment> segments;
  } beamsplitter;
  struct DetectorSection {
    double position = 0.0;
  } detector;
  struct RunSection {
    double t_max = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    int substeps = 16;
    double sample_rate = 64.0;
  } run;
};

/// Throws Error(Parse) with "line N" and the offending token, or
/// Error(Validation) for an inconsistent segment list.
ScenarioFile parse_scenario(std::string_view text);

/// Canonical text; numbers in shortest round-trip form.
std::string emit_scenario(const ScenarioFile& f);

/// Builds the run-ready scenario; throws Error(Validation).
Scenario to_scenario(const ScenarioFile& f);

/// Inverse of to_scenario for single-element scenarios with fixed optics.
ScenarioFile from_scenario(const Scenario& sc);

/// Sets a numeric field by dotted key, e.g. "source.v_g" or
/// "beamsplitter.segment.2.duration". Throws Error(InvalidInput) for keys
/// that do not name a numeric field.
void set_numeric(ScenarioFile& f, std::string_view key, double value);

}  // namespace wavecrest
