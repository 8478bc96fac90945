#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavecrest/scattering.hpp"
#include "wavecrest/trajectory.hpp"
#include "wavecrest/wavemodel.hpp"

namespace wavecrest {

// ---------------------------------------------------------------- scenario

/// Piecewise-constant optics of one element: `initial` until the first
/// change, then each change from its time onward.
struct OpticsSchedule {
  SplitterOptics initial = SplitterOptics::balanced();
  std::vector<std::pair<double, SplitterOptics>> changes;  // ascending times

  const SplitterOptics& at(double t) const noexcept;
  std::size_t epoch(double t) const noexcept;
};

struct Element {
  std::string name;
  Trajectory trajectory = Trajectory::stationary(0.0);
  OpticsSchedule optics;
};

struct Source {
  double position = 0.0;
  PlaneWave wave;
  double t_on = 0.0;
  double t_off = 0.0;
  double crest_spacing = 1.0;  // time between sampled crests
};

struct Detector {
  double position = 0.0;
  int direction = -1;  // taps trains whose group velocity has this sign
};

struct RunConfig {
  double t_max = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  int substeps = 16;           // minimum comoving sub-intervals per accelerating segment
  double sample_rate = 64.0;   // detector samples per shortest beat period
  double amplitude_floor = 1e-4;
  int max_depth = 32;
  std::size_t max_events = 2'000'000;
};

struct Scenario {
  WaveModel model = WaveModel::make(Family::Schrodinger);
  Source source;
  std::vector<Element> elements;
  Detector detector;
  RunConfig run;
};

/// Human-readable violations; empty when the scenario can be run.
std::vector<std::string> validate(const Scenario& sc);

/// Number of comoving sub-intervals used for an accelerating segment:
/// at least run.substeps and fine enough that the velocity change per
/// sub-interval is at most 1% of the trajectory's peak speed.
int substeps_for(const TrajectorySegment& seg, double peak_speed, int min_substeps);

// ------------------------------------------------------------------ result

enum class EventKind {
  ReflectHeadOn,
  ReflectOvertake,
  TransmitHeadOn,
  TransmitOvertake,
  ShutterOpen,
  ShutterActivate,
  DetectorArrival,
};

std::string_view event_kind_name(EventKind k);
bool is_overtake(EventKind k) noexcept;

struct Event {
  std::int64_t id = 0;
  double time = 0.0;
  double position = 0.0;
  EventKind kind = EventKind::ReflectHeadOn;
  std::int64_t incident = -1;            // object id (crest, train or element)
  std::vector<std::int64_t> products;   // object ids
  double amplitude_abs = 0.0;            // |amplitude| of the product (or incident)
};

/// A sampled constant-phase line; straight from birth to end.
struct Crest {
  std::int64_t id = 0;
  double birth_x = 0.0;
  double birth_t = 0.0;
  double speed = 0.0;
  PlaneWave wave;
  std::optional<std::int64_t> parent_event;
  double end_t = 0.0;
  int depth = 0;

  double position_at(double t) const noexcept { return birth_x + speed * (t - birth_t); }
};

enum class EdgeKind { Front, Back };

/// Boundary characteristic of a train, moving at the group velocity.
struct EnvelopeEdge {
  std::int64_t id = 0;
  std::int64_t train = 0;
  double birth_x = 0.0;
  double birth_t = 0.0;
  double speed = 0.0;
  EdgeKind kind = EdgeKind::Front;
  double end_t = 0.0;

  double position_at(double t) const noexcept { return birth_x + speed * (t - birth_t); }
};

/// Homogeneous wave train launched from a worldline (source or element)
/// over a birth interval; its characteristics move at the group velocity.
struct Train {
  std::int64_t id = 0;
  PlaneWave wave;
  double group_speed = 0.0;
  double crest_speed = 0.0;
  int generator = -1;  // -1 source, otherwise element index
  double birth_lo = 0.0;
  double birth_hi = 0.0;
  int depth = 0;
  std::optional<std::int64_t> parent;
  std::vector<std::int64_t> provenance;  // event ids, oldest first
  std::optional<EventKind> origin;       // kind of the event that created it
};

struct WaveSegment {
  std::int64_t id = 0;
  std::int64_t train = 0;
  PlaneWave wave;
  double t_in = 0.0;
  double t_out = 0.0;
  std::vector<std::int64_t> provenance;
};

struct DetectorArrival {
  std::int64_t crest = 0;
  double time = 0.0;
  double phase = 0.0;  // wave phase of the crest at the detector
};

struct Diagnostics {
  double source_weight = 0.0;
  double pruned_weight = 0.0;    // below amplitude floor or depth cap
  double shadowed_weight = 0.0;  // swept by an element its crests outrun
  int max_depth_reached = 0;
  std::size_t crest_count = 0;
  std::size_t train_count = 0;
};

struct SimulationResult {
  Scenario scenario;
  std::vector<Event> events;
  std::vector<Crest> crests;
  std::vector<EnvelopeEdge> edges;
  std::vector<Train> trains;
  std::vector<WaveSegment> segments;
  std::vector<DetectorArrival> arrivals;
  Diagnostics diagnostics;

  const Train* find_train(std::int64_t id) const;
};

/// Object ids reserved for the fixed components.
inline constexpr std::int64_t kSourceObject = 0;
inline constexpr std::int64_t kDetectorObject = 1;
inline constexpr std::int64_t element_object(std::size_t i) {
  return 2 + static_cast<std::int64_t>(i);
}

/// Event-driven propagation of crests and trains through the scenario.
/// Throws Error(Validation) for an invalid scenario and Error(Explosion)
/// when the event cap is exceeded.
SimulationResult run(const Scenario& sc);

// ------------------------------------------------------------------ export

struct Polyline {
  std::int64_t object_id = 0;
  std::string kind;  // crest | edge | element | source | detector
  std::vector<std::pair<double, double>> points;  // (t, x)
};

/// Polylines for a spacetime diagram; every event vertex is included and
/// curved/straight pieces are sampled every dt.
std::vector<Polyline> export_worldlines(const SimulationResult& result, double dt);

}  // namespace wavecrest
