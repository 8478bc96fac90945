#include "wavecrest/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "wavecrest/error.hpp"

namespace wavecrest {

// ------------------------------------------------------------ small helpers

const SplitterOptics& OpticsSchedule::at(double t) const noexcept {
  const SplitterOptics* cur = &initial;
  for (const auto& [ts, o] : changes) {
    if (t >= ts) cur = &o;
    else break;
  }
  return *cur;
}

std::size_t OpticsSchedule::epoch(double t) const noexcept {
  std::size_t e = 0;
  for (const auto& ch : changes) {
    if (t >= ch.first) ++e;
    else break;
  }
  return e;
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ReflectHeadOn: return "ReflectHeadOn";
    case EventKind::ReflectOvertake: return "ReflectOvertake";
    case EventKind::TransmitHeadOn: return "TransmitHeadOn";
    case EventKind::TransmitOvertake: return "TransmitOvertake";
    case EventKind::ShutterOpen: return "ShutterOpen";
    case EventKind::ShutterActivate: return "ShutterActivate";
    case EventKind::DetectorArrival: return "DetectorArrival";
  }
  return "Unknown";
}

bool is_overtake(EventKind k) noexcept {
  return k == EventKind::ReflectOvertake || k == EventKind::TransmitOvertake;
}

const Train* SimulationResult::find_train(std::int64_t id) const {
  auto it = std::lower_bound(trains.begin(), trains.end(), id,
                             [](const Train& t, std::int64_t v) { return t.id < v; });
  return (it != trains.end() && it->id == id) ? &*it : nullptr;
}

int substeps_for(const TrajectorySegment& seg, double peak_speed, int min_substeps) {
  if (seg.kind != SegmentKind::ConstAccel) return 1;
  const double dv = std::abs(seg.accel * seg.duration);
  int n = std::max(1, min_substeps);
  if (peak_speed > 0.0) {
    n = std::max(n, static_cast<int>(std::ceil(dv / (0.01 * peak_speed) - 1e-9)));
  }
  return n;
}

std::vector<std::string> validate(const Scenario& sc) {
  std::vector<std::string> v;
  auto err = [&v](const std::string& s) { v.push_back(s); };
  const double limit = sc.model.speed_limit();

  const Source& src = sc.source;
  if (!std::isfinite(src.t_on) || !std::isfinite(src.t_off) || !(src.t_on < src.t_off)) {
    err("source: emission window must be finite with t_on < t_off");
  }
  if (!(src.crest_spacing > 0.0)) {
    err("source: crest_spacing must be positive");
  } else if ((src.t_off - src.t_on) / src.crest_spacing > 1e5) {
    err("source: crest_spacing yields more than 100000 crests");
  }
  if (src.wave.k == 0.0) err("source: wavevector must be nonzero");
  if (!satisfies_dispersion(sc.model, src.wave)) err("source: wave violates the model dispersion");
  if (std::abs(src.wave.amplitude) > 1.0 + 1e-15) err("source: |amplitude| must not exceed 1");

  const RunConfig& r = sc.run;
  if (!(r.x_min < r.x_max)) err("run: x_min must be below x_max");
  if (!(r.t_max > src.t_on) || !std::isfinite(r.t_max)) err("run: t_max must be finite and after t_on");
  if (!(src.position > r.x_min && src.position < r.x_max)) err("source: position outside the domain");
  if (!(sc.detector.position > r.x_min && sc.detector.position < r.x_max)) {
    err("detector: position outside the domain");
  }
  if (sc.detector.direction != 1 && sc.detector.direction != -1) err("detector: direction must be +1 or -1");
  if (r.substeps < 1) err("run: substeps must be at least 1");
  if (!(r.sample_rate > 0.0)) err("run: sample_rate must be positive");
  if (r.max_depth < 1) err("run: max_depth must be at least 1");

  for (std::size_t e = 0; e < sc.elements.size(); ++e) {
    const Element& el = sc.elements[e];
    const std::string who = "element '" + el.name + "'";
    const auto segs = el.trajectory.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      double vmax = std::abs(segs[i].velocity0);
      if (std::isfinite(segs[i].duration)) vmax = std::max(vmax, std::abs(segs[i].end_velocity()));
      if (!(vmax < limit)) {
        std::ostringstream os;
        os << who << " segment " << i << ": speed " << vmax
           << " reaches the wave speed limit " << limit;
        err(os.str());
      }
    }
    double prev = -INFINITY;
    for (const auto& [t, o] : el.optics.changes) {
      if (!(t > prev)) err(who + ": optics changes must be strictly ascending");
      prev = t;
      if (std::abs(o.r * o.r + o.t * o.t - 1.0) > 1e-12) err(who + ": optics violate r^2 + t^2 = 1");
    }
    const auto& o = el.optics.initial;
    if (std::abs(o.r * o.r + o.t * o.t - 1.0) > 1e-12) err(who + ": optics violate r^2 + t^2 = 1");
  }
  return v;
}

// ------------------------------------------------------------------ tracer

namespace {

struct Hit {
  int element = -1;
  double t = 0.0;
};

struct PieceKey {
  int element = -1;
  std::size_t segment = 0;
  int substep = 0;
  std::size_t epoch = 0;
  Incidence incidence = Incidence::HeadOn;
  bool at_detector = false;

  bool operator==(const PieceKey&) const = default;
};

struct Piece {
  double lo, hi;
  PieceKey key;
};

struct PendingProduct {
  int element;
  EventKind kind;
  PlaneWave wave;
  double lo, hi;
};

bool same_wave(const PlaneWave& a, const PlaneWave& b) {
  return a.k == b.k && a.omega == b.omega && a.amplitude == b.amplitude && a.phase0 == b.phase0;
}

EventKind reflect_kind(Incidence i) {
  return i == Incidence::Overtake ? EventKind::ReflectOvertake : EventKind::ReflectHeadOn;
}
EventKind transmit_kind(Incidence i) {
  return i == Incidence::Overtake ? EventKind::TransmitOvertake : EventKind::TransmitHeadOn;
}

class Tracer {
 public:
  explicit Tracer(const Scenario& sc)
      : sc_(sc), source_traj_(Trajectory::stationary(sc.source.position, sc.source.t_on)) {
    next_object_ = element_object(sc.elements.size());
    for (const Element& el : sc.elements) {
      breaks_.push_back(element_breaks(el));
      peak_.push_back(el.trajectory.max_abs_velocity());
    }
    speed_scale_ = std::abs(group_velocity(sc.model, sc.source.wave.k));
    for (double v : peak_) speed_scale_ = std::max(speed_scale_, v);
  }

  SimulationResult run() {
    res_.scenario = sc_;
    emit_switch_events();
    trace_crests();
    trace_trains();
    finalize();
    return std::move(res_);
  }

 private:
  const Scenario& sc_;
  Trajectory source_traj_;
  std::vector<std::vector<double>> breaks_;
  std::vector<double> peak_;
  double speed_scale_ = 0.0;
  std::int64_t next_object_ = 0;
  SimulationResult res_;
  std::int64_t next_event_ = 0;

  const Trajectory& generator_traj(int g) const {
    return g < 0 ? source_traj_ : sc_.elements[static_cast<std::size_t>(g)].trajectory;
  }

  std::vector<double> element_breaks(const Element& el) const {
    std::vector<double> b = el.trajectory.breakpoints();
    const double peak = el.trajectory.max_abs_velocity();
    const auto segs = el.trajectory.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const int n = substeps_for(segs[i], peak, sc_.run.substeps);
      const double ts = el.trajectory.segment_start(i);
      const double dt = segs[i].duration / n;
      for (int j = 1; j < n; ++j) b.push_back(ts + j * dt);
    }
    for (const auto& ch : el.optics.changes) b.push_back(ch.first);
    b.push_back(sc_.run.t_max);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  // substep index and the velocity/contact used for scattering at time t
  struct Scatter {
    std::size_t segment;
    int substep;
    double velocity;
    Contact contact;
  };

  Scatter scatter_at(int e, double t) const {
    const Element& el = sc_.elements[static_cast<std::size_t>(e)];
    const Trajectory& tr = el.trajectory;
    const std::size_t i = tr.segment_index(t);
    const auto& seg = tr.segments()[i];
    const double ts = tr.segment_start(i);
    if (seg.kind != SegmentKind::ConstAccel) {
      return {i, 0, seg.velocity0, {tr.segment_start_position(i), ts}};
    }
    const int n = substeps_for(seg, peak_[static_cast<std::size_t>(e)], sc_.run.substeps);
    const double dt = seg.duration / n;
    int j = static_cast<int>(std::floor((t - ts) / dt));
    j = std::clamp(j, 0, n - 1);
    const double tm = ts + (j + 0.5) * dt;
    const KinematicState st = tr.state_at(tm);
    return {i, j, st.velocity, {st.position, tm}};
  }

  double domain_exit(double x, double t, double v) const {
    if (v > 0.0) return t + (sc_.run.x_max - x) / v;
    if (v < 0.0) return t + (sc_.run.x_min - x) / v;
    return INFINITY;
  }

  std::optional<Hit> first_hit(double x, double t, double v, int born_on) const {
    const double t_hi = std::min(sc_.run.t_max, domain_exit(x, t, v));
    std::optional<Hit> best;
    const Ray ray{x, t, v};
    for (std::size_t e = 0; e < sc_.elements.size(); ++e) {
      const Element& el = sc_.elements[e];
      double lo = t;
      bool exclude = static_cast<int>(e) == born_on;
      for (int guard = 0; guard < 64; ++guard) {
        auto c = first_crossing_in(el.trajectory, ray, lo, t_hi, exclude);
        if (!c) break;
        if (el.optics.at(*c).is_transparent()) {
          lo = *c;
          exclude = true;
          continue;
        }
        if (!best || *c < best->t) best = Hit{static_cast<int>(e), *c};
        break;
      }
    }
    return best;
  }

  bool reaches_detector(double x, double t, double v, std::optional<Hit> hit,
                        double* t_det = nullptr) const {
    const Detector& d = sc_.detector;
    if (v == 0.0 || (v > 0.0) != (d.direction > 0)) return false;
    const double dt = (d.position - x) / v;
    if (dt < 0.0) return false;
    const double td = t + dt;
    if (hit && hit->t <= td) return false;
    if (t_det) *t_det = td;
    return true;
  }

  std::int64_t add_event(double t, double x, EventKind k, std::int64_t incident,
                         std::vector<std::int64_t> products, double amp) {
    Event ev;
    ev.id = next_event_++;
    ev.time = t;
    ev.position = x;
    ev.kind = k;
    ev.incident = incident;
    ev.products = std::move(products);
    ev.amplitude_abs = amp;
    res_.events.push_back(std::move(ev));
    if (res_.events.size() > sc_.run.max_events) {
      throw Error(ErrorKind::Explosion,
                  "event count exceeded cap " + std::to_string(sc_.run.max_events) +
                      " (max depth reached " + std::to_string(res_.diagnostics.max_depth_reached) + ")");
    }
    return ev.id;
  }

  void emit_switch_events() {
    for (std::size_t e = 0; e < sc_.elements.size(); ++e) {
      const Element& el = sc_.elements[e];
      bool was_transparent = el.optics.initial.is_transparent();
      for (const auto& [t, o] : el.optics.changes) {
        if (t < el.trajectory.t0() || t > el.trajectory.t_end()) continue;
        const EventKind k = (o.is_transparent() && !was_transparent) ? EventKind::ShutterOpen
                                                                       : EventKind::ShutterActivate;
        add_event(t, el.trajectory.state_at(t).position, k, element_object(e), {}, o.r);
        was_transparent = o.is_transparent();
      }
    }
  }

  // -------------------------------------------------------------- crests

  struct CrestJob {
    Crest crest;
    int born_on;
  };

  void trace_crests() {
    const Source& src = sc_.source;
    std::deque<CrestJob> queue;
    const auto n = static_cast<std::int64_t>(std::floor((src.t_off - src.t_on) / src.crest_spacing + 1e-9));
    const double speed = phase_velocity(sc_.model, src.wave.k);
    for (std::int64_t i = 0; i <= n; ++i) {
      const double tb = src.t_on + static_cast<double>(i) * src.crest_spacing;
      if (tb > sc_.run.t_max) break;
      Crest c;
      c.id = next_object_++;
      c.birth_x = src.position;
      c.birth_t = tb;
      c.speed = speed;
      c.wave = src.wave;
      queue.push_back({c, -1});
    }
    while (!queue.empty()) {
      CrestJob job = std::move(queue.front());
      queue.pop_front();
      Crest& c = job.crest;
      const double t_hi = std::min(sc_.run.t_max, domain_exit(c.birth_x, c.birth_t, c.speed));
      const auto hit = first_hit(c.birth_x, c.birth_t, c.speed, job.born_on);
      double td = 0.0;
      if (reaches_detector(c.birth_x, c.birth_t, c.speed, hit, &td) && td <= t_hi) {
        c.end_t = td;
        add_event(td, sc_.detector.position, EventKind::DetectorArrival, c.id, {},
                  std::abs(c.wave.amplitude));
        res_.arrivals.push_back({c.id, td, c.wave.phase_at(sc_.detector.position, td)});
      } else if (hit) {
        c.end_t = hit->t;
        scatter_crest(c, *hit, queue);
      } else {
        c.end_t = t_hi;
      }
      res_.crests.push_back(c);
    }
  }

  void scatter_crest(const Crest& c, const Hit& hit, std::deque<CrestJob>& queue) {
    const Element& el = sc_.elements[static_cast<std::size_t>(hit.element)];
    const KinematicState st = el.trajectory.state_at(hit.t);
    const SplitterOptics& optics = el.optics.at(hit.t);
    const double vg = group_velocity(sc_.model, c.wave.k);
    const Incidence inc = classify_incidence(st.velocity, c.speed, vg);
    if (inc == Incidence::Outrun) return;
    const int depth = c.depth + 1;
    res_.diagnostics.max_depth_reached = std::max(res_.diagnostics.max_depth_reached, depth);

    auto spawn = [&](const PlaneWave& w, EventKind kind) {
      std::vector<std::int64_t> products;
      const bool keep = std::abs(w.amplitude) >= sc_.run.amplitude_floor && depth <= sc_.run.max_depth &&
                        propagates(w);
      Crest p;
      if (keep) {
        p.id = next_object_++;
        p.birth_x = st.position;
        p.birth_t = hit.t;
        p.speed = phase_velocity(sc_.model, w.k);
        p.wave = w;
        p.depth = depth;
        products.push_back(p.id);
      }
      const auto ev = add_event(hit.t, st.position, kind, c.id, products, std::abs(w.amplitude));
      if (keep) {
        p.parent_event = ev;
        queue.push_back({p, hit.element});
      }
    };

    if (optics.r > 0.0) {
      try {
        spawn(reflect_at_moving_bs(sc_.model, c.wave, st.velocity, optics, {st.position, hit.t}),
              reflect_kind(inc));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateIncidence) throw;
      }
    }
    if (optics.t > 0.0) {
      PlaneWave w = c.wave;
      w.amplitude *= optics.t;
      spawn(w, transmit_kind(inc));
    }
  }

  // A product (nearly) at rest in the lab never separates from its
  // generator within floating-point resolution.
  bool propagates(const PlaneWave& w) const {
    return w.k != 0.0 && std::abs(group_velocity(sc_.model, w.k)) > 1e-9 * speed_scale_;
  }

  // -------------------------------------------------------------- trains

  double train_weight(const Train& tr, double lo, double hi) const {
    const Trajectory& g = generator_traj(tr.generator);
    const double len = std::abs(tr.group_speed * (hi - lo) -
                                (g.state_at(hi).position - g.state_at(lo).position));
    return std::norm(tr.wave.amplitude) * len;
  }

  PieceKey key_at(const Train& tr, double tau) const {
    const Trajectory& g = generator_traj(tr.generator);
    const double x = g.state_at(tau).position;
    const auto hit = first_hit(x, tau, tr.group_speed, tr.generator);
    PieceKey k;
    k.at_detector = reaches_detector(x, tau, tr.group_speed, hit);
    if (hit) {
      const Scatter s = scatter_at(hit->element, hit->t);
      k.element = hit->element;
      k.segment = s.segment;
      k.substep = s.substep;
      k.epoch = sc_.elements[static_cast<std::size_t>(hit->element)].optics.epoch(hit->t);
      k.incidence = classify_incidence(s.velocity, tr.crest_speed, tr.group_speed);
    }
    return k;
  }

  std::vector<double> candidates(const Train& tr) const {
    const Trajectory& g = generator_traj(tr.generator);
    std::vector<double> c{tr.birth_lo, tr.birth_hi};
    for (std::size_t e = 0; e < sc_.elements.size(); ++e) {
      const Trajectory& et = sc_.elements[e].trajectory;
      for (double tb : breaks_[e]) {
        if (tb < et.t0() || tb > et.t_end() || tb < tr.birth_lo) continue;
        const Ray back{et.state_at(tb).position, tb, tr.group_speed};
        for (double tau : all_crossings(g, back, tr.birth_lo, std::min(tr.birth_hi, tb))) {
          c.push_back(tau);
        }
      }
    }
    // the ray through the detector at t_max bounds the observed window
    const Ray det{sc_.detector.position, sc_.run.t_max, tr.group_speed};
    for (double tau : all_crossings(g, det, tr.birth_lo, tr.birth_hi)) c.push_back(tau);
    std::sort(c.begin(), c.end());
    const double tol = 1e-13 * std::max({1.0, std::abs(tr.birth_lo), std::abs(tr.birth_hi)});
    std::vector<double> out;
    for (double v : c) {
      if (v < tr.birth_lo || v > tr.birth_hi) continue;
      if (out.empty() || v - out.back() > tol) out.push_back(v);
    }
    if (out.back() < tr.birth_hi) out.push_back(tr.birth_hi);
    return out;
  }

  std::vector<Piece> pieces(const Train& tr) const {
    const auto cand = candidates(tr);
    std::vector<Piece> out;
    constexpr int kSamples = 4;
    auto push = [&out](double lo, double hi, const PieceKey& k) {
      if (!(hi > lo)) return;
      if (!out.empty() && out.back().key == k && out.back().hi == lo) {
        out.back().hi = hi;
      } else {
        out.push_back({lo, hi, k});
      }
    };
    for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
      const double a = cand[i], b = cand[i + 1];
      double seg_lo = a;
      double prev_t = a + (b - a) * (0.5 / kSamples);
      PieceKey prev_k = key_at(tr, prev_t);
      for (int s = 1; s < kSamples; ++s) {
        const double t = a + (b - a) * ((s + 0.5) / kSamples);
        const PieceKey k = key_at(tr, t);
        if (!(k == prev_k)) {
          double l = prev_t, h = t;
          for (int it = 0; it < 200 && h - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
            const double m = 0.5 * (l + h);
            if (key_at(tr, m) == prev_k) l = m;
            else h = m;
          }
          const double cut = 0.5 * (l + h);
          push(seg_lo, cut, prev_k);
          seg_lo = cut;
        }
        prev_k = k;
        prev_t = t;
      }
      push(seg_lo, b, prev_k);
    }
    return out;
  }

  double hit_time(const Train& tr, int element, double tau, double toward) const {
    const Trajectory& g = generator_traj(tr.generator);
    const Element& el = sc_.elements[static_cast<std::size_t>(element)];
    const double t_hi = sc_.run.t_max;
    double probe = tau;
    for (int attempt = 0; attempt < 10; ++attempt) {
      const double x = g.state_at(probe).position;
      const Ray ray{x, probe, tr.group_speed};
      const auto c = first_crossing_in(el.trajectory, ray, probe,
                                       std::min(t_hi, domain_exit(x, probe, tr.group_speed)),
                                       element == tr.generator);
      if (c) return *c;
      probe = tau + (toward - tau) * 0.5 * std::pow(10.0, attempt - 9);
    }
    std::ostringstream os;
    os.precision(17);
    os << "train " << tr.id << ": characteristic born at t=" << tau << " lost its crossing with element "
       << element;
    throw Error(ErrorKind::OutOfRange, os.str());
  }

  double detector_time(const Train& tr, double tau) const {
    const double x = generator_traj(tr.generator).state_at(tau).position;
    return tau + (sc_.detector.position - x) / tr.group_speed;
  }

  void detector_extent(const Train& tr, double lo, double hi, double& t_in, double& t_out) const {
    const Trajectory& g = generator_traj(tr.generator);
    std::vector<double> probes{lo, hi};
    for (std::size_t i = 0; i < g.segments().size(); ++i) {
      const double ts = g.segment_start(i), te = g.segment_end(i);
      if (ts > lo && ts < hi) probes.push_back(ts);
      const auto& s = g.segments()[i];
      if (s.accel != 0.0) {
        const double tc = ts + (tr.group_speed - s.velocity0) / s.accel;
        if (tc > std::max(lo, ts) && tc < std::min(hi, te)) probes.push_back(tc);
      }
    }
    t_in = INFINITY;
    t_out = -INFINITY;
    for (double p : probes) {
      const double td = detector_time(tr, p);
      t_in = std::min(t_in, td);
      t_out = std::max(t_out, td);
    }
  }

  void trace_trains() {
    std::deque<Train> queue;
    {
      const Source& src = sc_.source;
      Train t;
      t.id = next_object_++;
      t.wave = src.wave;
      t.group_speed = group_velocity(sc_.model, src.wave.k);
      t.crest_speed = phase_velocity(sc_.model, src.wave.k);
      t.generator = -1;
      t.birth_lo = src.t_on;
      t.birth_hi = std::min(src.t_off, sc_.run.t_max);
      res_.diagnostics.source_weight = train_weight(t, t.birth_lo, t.birth_hi);
      queue.push_back(std::move(t));
    }
    while (!queue.empty()) {
      Train tr = std::move(queue.front());
      queue.pop_front();
      process_train(tr, queue);
      res_.trains.push_back(std::move(tr));
    }
    std::sort(res_.trains.begin(), res_.trains.end(),
              [](const Train& a, const Train& b) { return a.id < b.id; });
  }

  void process_train(const Train& tr, std::deque<Train>& queue) {
    const auto ps = pieces(tr);
    std::vector<PendingProduct> pending;
    auto add_product = [&pending](const PendingProduct& p) {
      const double tol = 1e-12 * std::max({1.0, std::abs(p.lo), std::abs(p.hi)});
      for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
        if (it->element == p.element && it->kind == p.kind && same_wave(it->wave, p.wave) &&
            (std::abs(it->hi - p.lo) <= tol || std::abs(p.hi - it->lo) <= tol)) {
          it->lo = std::min(it->lo, p.lo);
          it->hi = std::max(it->hi, p.hi);
          return;
        }
      }
      pending.push_back(p);
    };

    // detector windows: merge tau-contiguous observed pieces
    bool open = false;
    double w_in = 0.0, w_out = 0.0, last_hi = 0.0;
    auto flush = [&]() {
      if (!open) return;
      open = false;
      const double t_in = std::max(w_in, tr.birth_lo);
      const double t_out = std::min(w_out, sc_.run.t_max);
      if (!(t_out > t_in)) return;
      WaveSegment s;
      s.id = next_object_++;
      s.train = tr.id;
      s.wave = tr.wave;
      s.t_in = t_in;
      s.t_out = t_out;
      s.provenance = tr.provenance;
      res_.segments.push_back(std::move(s));
    };

    for (const Piece& p : ps) {
      if (p.key.at_detector) {
        double a, b;
        detector_extent(tr, p.lo, p.hi, a, b);
        if (open && p.lo == last_hi) {
          w_in = std::min(w_in, a);
          w_out = std::max(w_out, b);
        } else {
          flush();
          open = true;
          w_in = a;
          w_out = b;
        }
        last_hi = p.hi;
      } else {
        flush();
      }
      if (p.key.element < 0) continue;
      if (p.key.incidence == Incidence::Outrun) {
        res_.diagnostics.shadowed_weight += train_weight(tr, p.lo, p.hi);
        continue;
      }
      const double ha = hit_time(tr, p.key.element, p.lo, p.hi);
      const double hb = hit_time(tr, p.key.element, p.hi, p.lo);
      const double lo = std::min(ha, hb), hi = std::max(ha, hb);
      const Element& el = sc_.elements[static_cast<std::size_t>(p.key.element)];
      const Scatter sc = scatter_at(p.key.element, 0.5 * (lo + hi));
      const SplitterOptics& optics = el.optics.at(0.5 * (lo + hi));
      if (optics.r > 0.0) {
        add_product({p.key.element, reflect_kind(p.key.incidence),
                     reflect_at_moving_bs(sc_.model, tr.wave, sc.velocity, optics, sc.contact), lo, hi});
      }
      if (optics.t > 0.0) {
        PlaneWave w = tr.wave;
        w.amplitude *= optics.t;
        add_product({p.key.element, transmit_kind(p.key.incidence), w, lo, hi});
      }
    }
    flush();
    add_edges(tr);

    std::sort(pending.begin(), pending.end(),
              [](const PendingProduct& a, const PendingProduct& b) { return a.lo < b.lo; });
    const int depth = tr.depth + 1;
    for (const PendingProduct& p : pending) {
      Train child;
      child.wave = p.wave;
      child.generator = p.element;
      child.birth_lo = p.lo;
      child.birth_hi = p.hi;
      child.depth = depth;
      child.parent = tr.id;
      child.origin = p.kind;
      const bool keep = std::abs(p.wave.amplitude) >= sc_.run.amplitude_floor &&
                        depth <= sc_.run.max_depth && propagates(p.wave) && p.hi > p.lo;
      const double x = sc_.elements[static_cast<std::size_t>(p.element)].trajectory.state_at(p.lo).position;
      if (!keep) {
        if (p.wave.k != 0.0) {
          child.group_speed = group_velocity(sc_.model, p.wave.k);
          res_.diagnostics.pruned_weight += train_weight(child, p.lo, p.hi);
        }
        add_event(p.lo, x, p.kind, tr.id, {}, std::abs(p.wave.amplitude));
        continue;
      }
      child.id = next_object_++;
      child.group_speed = group_velocity(sc_.model, p.wave.k);
      child.crest_speed = phase_velocity(sc_.model, p.wave.k);
      child.provenance = tr.provenance;
      child.provenance.push_back(add_event(p.lo, x, p.kind, tr.id, {child.id}, std::abs(p.wave.amplitude)));
      res_.diagnostics.max_depth_reached = std::max(res_.diagnostics.max_depth_reached, depth);
      queue.push_back(std::move(child));
    }
  }

  void add_edges(const Train& tr) {
    const Trajectory& g = generator_traj(tr.generator);
    const double v = tr.group_speed;
    const double x_lo = g.state_at(tr.birth_lo).position;
    const double x_hi = g.state_at(tr.birth_hi).position;
    // compare both characteristics at birth_hi
    const double lead_lo = (x_lo + v * (tr.birth_hi - tr.birth_lo)) * (v >= 0 ? 1 : -1);
    const double lead_hi = x_hi * (v >= 0 ? 1 : -1);
    const bool lo_is_front = lead_lo >= lead_hi;
    for (int which = 0; which < 2; ++which) {
      EnvelopeEdge e;
      e.id = next_object_++;
      e.train = tr.id;
      e.birth_t = which == 0 ? tr.birth_lo : tr.birth_hi;
      e.birth_x = which == 0 ? x_lo : x_hi;
      e.speed = v;
      e.kind = ((which == 0) == lo_is_front) ? EdgeKind::Front : EdgeKind::Back;
      const auto hit = first_hit(e.birth_x, e.birth_t, v, tr.generator);
      e.end_t = hit ? hit->t : std::min(sc_.run.t_max, domain_exit(e.birth_x, e.birth_t, v));
      res_.edges.push_back(e);
    }
  }

  // ------------------------------------------------------------ finalize

  void finalize() {
    auto& ev = res_.events;
    std::stable_sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
      if (a.time != b.time) return a.time < b.time;
      return a.id < b.id;
    });
    std::unordered_map<std::int64_t, std::int64_t> remap;
    remap.reserve(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
      remap[ev[i].id] = static_cast<std::int64_t>(i);
      ev[i].id = static_cast<std::int64_t>(i);
    }
    auto fix = [&remap](std::vector<std::int64_t>& v) {
      for (auto& id : v) id = remap.at(id);
    };
    for (auto& t : res_.trains) fix(t.provenance);
    for (auto& s : res_.segments) fix(s.provenance);
    for (auto& c : res_.crests) {
      if (c.parent_event) c.parent_event = remap.at(*c.parent_event);
    }
    std::sort(res_.crests.begin(), res_.crests.end(),
              [](const Crest& a, const Crest& b) { return a.id < b.id; });
    std::sort(res_.segments.begin(), res_.segments.end(), [](const WaveSegment& a, const WaveSegment& b) {
      if (a.t_in != b.t_in) return a.t_in < b.t_in;
      return a.id < b.id;
    });
    res_.diagnostics.crest_count = res_.crests.size();
    res_.diagnostics.train_count = res_.trains.size();
  }
};

}  // namespace

SimulationResult run(const Scenario& sc) {
  const auto violations = validate(sc);
  if (!violations.empty()) {
    std::string msg = "scenario validation failed:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(ErrorKind::Validation, msg);
  }
  return Tracer(sc).run();
}

// ------------------------------------------------------------------ export

std::vector<Polyline> export_worldlines(const SimulationResult& result, double dt) {
  const Scenario& sc = result.scenario;
  const double t_end = sc.run.t_max;
  if (!(dt > 0.0)) dt = (t_end - sc.source.t_on) / 200.0;
  std::vector<Polyline> out;

  auto straight = [dt](double x0, double t0, double v, double t1) {
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(t0, x0);
    for (double t = t0 + dt; t < t1; t += dt) pts.emplace_back(t, x0 + v * (t - t0));
    if (t1 > t0) pts.emplace_back(t1, x0 + v * (t1 - t0));
    return pts;
  };

  out.push_back({kSourceObject, "source",
                 straight(sc.source.position, sc.source.t_on, 0.0, t_end)});
  out.push_back({kDetectorObject, "detector",
                 straight(sc.detector.position, sc.source.t_on, 0.0, t_end)});
  for (std::size_t e = 0; e < sc.elements.size(); ++e) {
    const Trajectory& tr = sc.elements[e].trajectory;
    const double t1 = std::min(t_end, tr.t_end());
    std::vector<double> ts;
    for (double t = tr.t0(); t < t1; t += dt) ts.push_back(t);
    for (double b : tr.breakpoints()) {
      if (b <= t1) ts.push_back(b);
    }
    ts.push_back(t1);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    Polyline pl{element_object(e), "element", {}};
    for (double t : ts) pl.points.emplace_back(t, tr.state_at(t).position);
    out.push_back(std::move(pl));
  }
  for (const Crest& c : result.crests) {
    out.push_back({c.id, "crest", straight(c.birth_x, c.birth_t, c.speed, c.end_t)});
  }
  for (const EnvelopeEdge& e : result.edges) {
    out.push_back({e.id, "edge", straight(e.birth_x, e.birth_t, e.speed, e.end_t)});
  }
  return out;
}

}  // namespace wavecrest
