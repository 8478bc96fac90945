#include "wavecrest/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavecrest/error.hpp"

namespace wavecrest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool same_omega(double a, double b) {
  return std::abs(a - b) <= kSameOmegaTol * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::complex<double> segment_value(const WaveSegment& s, double x_d, double t) {
  return s.wave.amplitude * std::polar(1.0, s.wave.k * x_d - s.wave.omega * t + s.wave.phase0);
}

void check_grid(const std::vector<double>& t_grid) {
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw Error(ErrorKind::InvalidInput, "time grid must be strictly increasing");
    }
  }
}

DetectorTrace make_trace(const std::vector<WaveSegment>& segments, double x_d,
                         const std::vector<double>& t_grid) {
  DetectorTrace tr;
  tr.position = x_d;
  tr.times = t_grid;
  tr.amplitude.assign(t_grid.size(), {0.0, 0.0});
  tr.pdf.assign(t_grid.size(), 0.0);
  tr.segments = segments;
  return tr;
}

double wrap_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

DetectorTrace superpose(const std::vector<WaveSegment>& segments, double x_d,
                        const std::vector<double>& t_grid) {
  check_grid(t_grid);
  DetectorTrace tr = make_trace(segments, x_d, t_grid);
  const auto n = static_cast<std::ptrdiff_t>(t_grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double t = t_grid[static_cast<std::size_t>(i)];
    std::complex<double> a{0.0, 0.0};
    for (const WaveSegment& s : segments) {
      if (t >= s.t_in && t < s.t_out) a += segment_value(s, x_d, t);
    }
    tr.amplitude[static_cast<std::size_t>(i)] = a;
    tr.pdf[static_cast<std::size_t>(i)] = std::norm(a);
  }
  return tr;
}

DetectorTrace superpose_serial(const std::vector<WaveSegment>& segments, double x_d,
                               const std::vector<double>& t_grid) {
  check_grid(t_grid);
  DetectorTrace tr = make_trace(segments, x_d, t_grid);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    std::complex<double> a{0.0, 0.0};
    for (const WaveSegment& s : segments) {
      if (t >= s.t_in && t < s.t_out) a += segment_value(s, x_d, t);
    }
    tr.amplitude[i] = a;
    tr.pdf[i] = std::norm(a);
  }
  return tr;
}

std::vector<double> default_time_grid(const std::vector<WaveSegment>& segments,
                                      double sample_rate, double t_max,
                                      std::size_t max_samples) {
  if (segments.empty()) return {};
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : segments) {
    lo = std::min(lo, s.t_in);
    hi = std::max(hi, s.t_out);
  }
  hi = std::min(hi, t_max);
  if (!(hi > lo)) return {lo};
  double max_dw = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const auto& a = segments[i];
      const auto& b = segments[j];
      if (std::min(a.t_out, b.t_out) <= std::max(a.t_in, b.t_in)) continue;
      if (same_omega(a.wave.omega, b.wave.omega)) continue;
      max_dw = std::max(max_dw, std::abs(a.wave.omega - b.wave.omega));
    }
  }
  const double span = hi - lo;
  const double dt = max_dw > 0.0 ? kTwoPi / max_dw / sample_rate : span / 4096.0;
  std::size_t n = static_cast<std::size_t>(std::ceil(span / dt)) + 1;
  n = std::clamp<std::size_t>(n, 2, std::max<std::size_t>(2, max_samples));
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + span * (static_cast<double>(i) / (n - 1));
  g.back() = hi;
  return g;
}

// ------------------------------------------------------------------ fitting

namespace {

struct LinearFit {
  double a = 0.0, c = 0.0, s = 0.0, sse = INFINITY;
};

LinearFit project(const std::vector<double>& t, const std::vector<double>& y, double t0,
                  double omega) {
  // normal equations for y ~ a + c cos + s sin
  double m[3][3] = {};
  double r[3] = {};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ph = omega * (t[i] - t0);
    const double b[3] = {1.0, std::cos(ph), std::sin(ph)};
    for (int p = 0; p < 3; ++p) {
      r[p] += b[p] * y[i];
      for (int q = 0; q < 3; ++q) m[p][q] += b[p] * b[q];
    }
  }
  // Gaussian elimination with partial pivoting
  double aug[3][4];
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) aug[p][q] = m[p][q];
    aug[p][3] = r[p];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(aug[row][col]) > std::abs(aug[piv][col])) piv = row;
    }
    if (std::abs(aug[piv][col]) < 1e-300) return {};
    std::swap(aug[piv], aug[col]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = aug[row][col] / aug[col][col];
      for (int q = col; q < 4; ++q) aug[row][q] -= f * aug[col][q];
    }
  }
  double x[3];
  for (int p = 2; p >= 0; --p) {
    double v = aug[p][3];
    for (int q = p + 1; q < 3; ++q) v -= aug[p][q] * x[q];
    x[p] = v / aug[p][p];
  }
  LinearFit f{x[0], x[1], x[2], 0.0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ph = omega * (t[i] - t0);
    const double e = y[i] - f.a - f.c * std::cos(ph) - f.s * std::sin(ph);
    f.sse += e * e;
  }
  return f;
}

double spectral_peak(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 4096);
  std::vector<double> ts, ys;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; i += stride) {
    ts.push_back(t[i]);
    ys.push_back(y[i]);
    mean += y[i];
  }
  mean /= static_cast<double>(ys.size());
  const double span = ts.back() - ts.front();
  const double dt = span / static_cast<double>(ts.size() - 1);
  const double step = kTwoPi / (4.0 * span);
  const double nyquist = std::numbers::pi / dt;
  std::size_t count = static_cast<std::size_t>(nyquist / step);
  count = std::min<std::size_t>(count, std::max<std::size_t>(64, 30'000'000 / ts.size()));
  double best_w = step, best_p = -1.0;
  for (std::size_t j = 1; j <= count; ++j) {
    const double w = step * static_cast<double>(j);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < ts.size(); ++i) {
      acc += (ys[i] - mean) * std::polar(1.0, -w * (ts[i] - ts.front()));
    }
    const double p = std::norm(acc);
    if (p > best_p) {
      best_p = p;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace

BeatFit fit_beat(const std::vector<double>& t, const std::vector<double>& y) {
  BeatFit out;
  if (t.size() != y.size()) throw Error(ErrorKind::InvalidInput, "fit_beat: size mismatch");
  if (t.empty()) return out;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  out.offset = mean;
  if (t.size() < 4 || !(t.back() > t.front())) return out;

  const double t0 = t.front();
  const double span = t.back() - t0;
  const double seed = spectral_peak(t, y);
  auto sse = [&](double w) { return project(t, y, t0, w).sse; };

  const double half = kTwoPi / span;
  const int scan = 40;
  const double w_lo = std::max(1e-3 * seed, seed - half);
  const double w_hi = seed + half;
  double best = seed, best_e = sse(seed);
  for (int i = 0; i <= scan; ++i) {
    const double w = w_lo + (w_hi - w_lo) * i / scan;
    const double e = sse(w);
    if (e < best_e) {
      best_e = e;
      best = w;
    }
  }
  const double h = (w_hi - w_lo) / scan;
  double a = std::max(w_lo, best - h), b = std::min(w_hi, best + h);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = sse(x1), f2 = sse(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = sse(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = sse(x2);
    }
  }
  const double w = 0.5 * (a + b);
  const LinearFit f = project(t, y, t0, w);
  out.omega = w;
  out.offset = f.a;
  out.amplitude = std::hypot(f.c, f.s);
  out.phase = std::atan2(-f.s, f.c) - w * t0;
  out.rms_residual = std::sqrt(f.sse / static_cast<double>(t.size()));
  return out;
}

// ----------------------------------------------------------------- analysis

const WindowReport* InterferenceReport::stationary_window() const {
  const WindowReport* best = nullptr;
  for (const auto& w : windows) {
    if (w.distinct_frequencies != 1) continue;
    if (!best || w.participants.size() > best->participants.size() ||
        (w.participants.size() == best->participants.size() &&
         w.t_end - w.t_start > best->t_end - best->t_start)) {
      best = &w;
    }
  }
  return best;
}

const WindowReport* InterferenceReport::last_beat_window() const {
  const WindowReport* best = nullptr;
  for (const auto& w : windows) {
    if (w.distinct_frequencies >= 2) best = &w;
  }
  return best;
}

const PairBeat* InterferenceReport::dominant_pair() const {
  const PairBeat* best = nullptr;
  for (const auto& p : pairs) {
    if (!best || p.t_end - p.t_start > best->t_end - best->t_start) best = &p;
  }
  return best;
}

namespace {

double time_visibility(const std::vector<double>& pdf) {
  if (pdf.empty()) return 0.0;
  const auto [mn, mx] = std::minmax_element(pdf.begin(), pdf.end());
  const double s = *mx + *mn;
  return s > 0.0 ? (*mx - *mn) / s : 0.0;
}

void fill_stationary(WindowReport& w, const std::vector<const WaveSegment*>& act, double x_d) {
  double sum = 0.0, peak = 0.0;
  for (const auto* s : act) {
    const double m = std::abs(s->wave.amplitude);
    sum += m;
    peak = std::max(peak, m);
  }
  const double mx = sum * sum;
  const double mn = std::pow(std::max(0.0, 2.0 * peak - sum), 2);
  w.visibility = (mx + mn) > 0.0 ? (mx - mn) / (mx + mn) : 0.0;

  auto longer = [](const WaveSegment* a, const WaveSegment* b) {
    if (a->provenance.size() != b->provenance.size()) return a->provenance.size() > b->provenance.size();
    return a->id > b->id;
  };
  const WaveSegment* hi = act.front();
  const WaveSegment* lo = act.front();
  for (const auto* s : act) {
    if (longer(s, hi)) hi = s;
    if (longer(lo, s)) lo = s;
  }
  auto phase = [x_d](const WaveSegment* s) {
    return std::arg(s->wave.amplitude) + s->wave.k * x_d + s->wave.phase0;
  };
  w.stationary_phase_difference = wrap_two_pi(phase(hi) - phase(lo));
}

}  // namespace

InterferenceReport analyze(const DetectorTrace& trace) {
  if (trace.times.empty()) throw Error(ErrorKind::InvalidInput, "analyze: empty trace");
  InterferenceReport rep;
  const double t_first = trace.times.front();
  const double t_last = trace.times.back();
  std::vector<double> cuts{t_first, t_last};
  for (const auto& s : trace.segments) {
    if (s.t_in > t_first && s.t_in < t_last) cuts.push_back(s.t_in);
    if (s.t_out > t_first && s.t_out < t_last) cuts.push_back(s.t_out);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    const double mid = 0.5 * (a + b);
    std::vector<const WaveSegment*> act;
    for (const auto& s : trace.segments) {
      if (mid >= s.t_in && mid < s.t_out) act.push_back(&s);
    }
    if (act.empty()) continue;
    WindowReport w;
    w.t_start = a;
    w.t_end = b;
    for (const auto* s : act) w.participants.push_back(s->id);
    std::vector<double> omegas;
    for (const auto* s : act) {
      if (std::none_of(omegas.begin(), omegas.end(),
                       [&](double o) { return same_omega(o, s->wave.omega); })) {
        omegas.push_back(s->wave.omega);
      }
    }
    w.distinct_frequencies = omegas.size();

    if (act.size() == 1) {
      w.visibility = 0.0;
      w.stationary_phase_difference = 0.0;
      w.flags.push_back("single_segment");
    } else if (omegas.size() == 1) {
      fill_stationary(w, act, trace.position);
    } else if (b - a <= 1e-9 * std::max(1.0, std::abs(a))) {
      w.low_confidence = true;
      w.flags.push_back("degenerate_window");
    } else {
      std::vector<double> ts, ys;
      const auto first = std::lower_bound(trace.times.begin(), trace.times.end(), a);
      for (auto it = first; it != trace.times.end() && *it < b; ++it) {
        ts.push_back(*it);
        ys.push_back(trace.pdf[static_cast<std::size_t>(it - trace.times.begin())]);
      }
      if (ts.size() < 16) {
        w.flags.push_back("resampled");
        std::vector<WaveSegment> local;
        for (const auto* s : act) local.push_back(*s);
        std::vector<double> g(256);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = a + (b - a) * (static_cast<double>(i) / g.size());
        const DetectorTrace lt = superpose_serial(local, trace.position, g);
        ts = lt.times;
        ys = lt.pdf;
      }
      w.visibility = time_visibility(ys);
      const BeatFit fit = fit_beat(ts, ys);
      w.beat_frequency = fit.omega;
      if (!(fit.omega > 0.0) || (b - a) < kTwoPi / fit.omega) {
        w.low_confidence = true;
        w.flags.push_back("short_window");
      }
      if (omegas.size() > 2) w.flags.push_back("multi_tone");
    }
    rep.windows.push_back(std::move(w));
  }

  const auto& segs = trace.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const double dw = std::abs(segs[i].wave.omega - segs[j].wave.omega);
      if (same_omega(segs[i].wave.omega, segs[j].wave.omega)) continue;
      const double a = std::max({segs[i].t_in, segs[j].t_in, t_first});
      const double b = std::min({segs[i].t_out, segs[j].t_out, t_last});
      if (!(b - a >= kTwoPi / dw)) continue;
      std::vector<double> ts, ys;
      const auto first = std::lower_bound(trace.times.begin(), trace.times.end(), a);
      for (auto it = first; it != trace.times.end() && *it < b; ++it) {
        ts.push_back(*it);
        ys.push_back(trace.pdf[static_cast<std::size_t>(it - trace.times.begin())]);
      }
      if (ts.size() < 16) continue;
      PairBeat pb;
      pb.first = std::min(segs[i].id, segs[j].id);
      pb.second = std::max(segs[i].id, segs[j].id);
      pb.t_start = a;
      pb.t_end = b;
      pb.expected = dw;
      pb.fit = fit_beat(ts, ys);
      pb.low_confidence = !(pb.fit.omega > 0.0) || (b - a) < kTwoPi / pb.fit.omega;
      rep.pairs.push_back(pb);
    }
  }
  return rep;
}

// ----------------------------------------------------------- retarded phase

namespace {

double reflection_time(const MovingReflectorLeg& leg, double t_arrive) {
  const double lo = leg.t_lo;
  const double hi = std::min(leg.t_hi, t_arrive);
  if (!(hi >= lo)) throw Error(ErrorKind::UnreachablePath, "moving-reflector leg: empty search domain");
  auto f = [&](double tr) {
    return leg.reflector.state_at(tr).position + leg.speed_out * (t_arrive - tr) - leg.x_to;
  };
  const double horizon = std::max(1.0, std::abs(hi - lo));
  const double tol = 1e-12 * horizon;
  constexpr int kScan = 4096;
  double b = hi;
  double fb = f(b);
  if (std::abs(fb) <= tol) return b;
  for (int i = 1; i <= kScan; ++i) {
    const double a = hi - (hi - lo) * i / kScan;
    const double fa = f(a);
    if (std::abs(fa) <= tol) return a;
    if (std::signbit(fa) != std::signbit(fb)) {
      double l = a, h = b, fl = fa;
      for (int it = 0; it < 300; ++it) {
        const double m = 0.5 * (l + h);
        const double fm = f(m);
        if (std::abs(fm) <= tol || h - l <= 1e-16 * std::max(1.0, std::abs(m))) return m;
        if (std::signbit(fm) == std::signbit(fl)) {
          l = m;
          fl = fm;
        } else {
          h = m;
        }
      }
      return 0.5 * (l + h);
    }
    b = a;
    fb = fa;
  }
  throw Error(ErrorKind::UnreachablePath, "moving-reflector leg: no reflection instant in domain");
}

}  // namespace

RetardedPhase retarded_phase(const std::vector<PathLeg>& path, double omega0, double t) {
  double tc = t;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (const auto* s = std::get_if<StaticLeg>(&*it)) {
      if (s->phase_speed == 0.0) throw Error(ErrorKind::InvalidInput, "leg with zero phase speed");
      tc -= s->length / std::abs(s->phase_speed);
    } else {
      const auto& m = std::get<MovingReflectorLeg>(*it);
      if (m.speed_in == 0.0 || m.speed_out == 0.0) {
        throw Error(ErrorKind::InvalidInput, "leg with zero phase speed");
      }
      const double tr = reflection_time(m, tc);
      const double back = (m.reflector.state_at(tr).position - m.x_from) / m.speed_in;
      if (back < 0.0) throw Error(ErrorKind::UnreachablePath, "reflector lies behind the incoming leg");
      tc = tr - back;
    }
  }
  return {tc, -omega0 * tc};
}

}  // namespace wavecrest
