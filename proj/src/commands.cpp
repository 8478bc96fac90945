#include "wavecrest/commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "wavecrest/csv.hpp"
#include "wavecrest/error.hpp"
#include "wavecrest/scattering.hpp"
#include "wavecrest/scenario_file.hpp"
#include "wavecrest/scenarios.hpp"

namespace wavecrest {

// ------------------------------------------------------------------ render

std::string events_csv(const SimulationResult& r) {
  CsvWriter w({"id", "time", "position", "kind", "incident_id", "product_ids", "amplitude_abs"});
  for (const Event& e : r.events) {
    w.field(e.id).field(e.time).field(e.position).field(event_kind_name(e.kind)).field(e.incident);
    w.field(join_ids(e.products)).field(e.amplitude_abs);
    w.end_row();
  }
  return w.text();
}

std::string worldlines_csv(const SimulationResult& r) {
  const auto& sc = r.scenario;
  const double dt = (sc.run.t_max - sc.source.t_on) / 1000.0;
  CsvWriter w({"object_id", "object_kind", "t", "x"});
  for (const Polyline& p : export_worldlines(r, dt)) {
    for (const auto& [t, x] : p.points) {
      w.field(p.object_id).field(p.kind).field(t).field(x);
      w.end_row();
    }
  }
  return w.text();
}

std::string segments_csv(const SimulationResult& r) {
  CsvWriter w({"segment_id", "omega", "k", "amp_re", "amp_im", "phase0", "t_in", "t_out", "provenance"});
  for (const WaveSegment& s : r.segments) {
    w.field(s.id).field(s.wave.omega).field(s.wave.k).field(s.wave.amplitude.real());
    w.field(s.wave.amplitude.imag()).field(s.wave.phase0).field(s.t_in).field(s.t_out);
    w.field(join_ids(s.provenance));
    w.end_row();
  }
  return w.text();
}

std::string trace_csv(const DetectorTrace& tr) {
  CsvWriter w({"t", "amp_re", "amp_im", "pdf"});
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    w.field(tr.times[i]).field(tr.amplitude[i].real()).field(tr.amplitude[i].imag()).field(tr.pdf[i]);
    w.end_row();
  }
  return w.text();
}

std::string report_csv(const InterferenceReport& rep) {
  CsvWriter w({"window_start", "window_end", "beat_frequency", "visibility", "stationary_phase_diff", "flags"});
  for (const WindowReport& win : rep.windows) {
    w.field(win.t_start).field(win.t_end);
    w.field(win.beat_frequency ? format_double(*win.beat_frequency) : std::string());
    w.field(win.visibility);
    w.field(win.stationary_phase_difference ? format_double(*win.stationary_phase_difference) : std::string());
    std::string flags;
    for (const auto& f : win.flags) {
      if (!flags.empty()) flags += ';';
      flags += f;
    }
    w.field(flags);
    w.end_row();
  }
  return w.text();
}

RunOutputs render_outputs(const SimulationResult& r) {
  RunOutputs o;
  o.events_csv = events_csv(r);
  o.worldlines_csv = worldlines_csv(r);
  o.segments_csv = segments_csv(r);
  const auto grid = default_time_grid(r.segments, r.scenario.run.sample_rate, r.scenario.run.t_max);
  if (!grid.empty()) {
    const DetectorTrace tr = superpose(r.segments, r.scenario.detector.position, grid);
    o.report = analyze(tr);
    o.trace_csv = trace_csv(tr);
  } else {
    o.trace_csv = trace_csv(DetectorTrace{});
  }
  o.report_csv = report_csv(o.report);
  return o;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidInput, "sha256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

// ---------------------------------------------------------------- simulate

namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse:
    case ErrorKind::Validation:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

struct RunSummary {
  std::optional<double> beat_frequency;
  std::optional<double> visibility;
  std::optional<double> phase;
};

RunSummary summarize(const InterferenceReport& rep) {
  RunSummary s;
  if (const PairBeat* beat = rep.dominant_pair()) s.beat_frequency = beat->fit.omega;
  if (const WindowReport* st = rep.stationary_window()) {
    s.visibility = st->visibility;
    s.phase = st->stationary_phase_difference;
  }
  return s;
}

void write_run(const SimulationResult& result, const std::string& scenario_text,
               const std::filesystem::path& out_dir, RunSummary* summary) {
  std::filesystem::create_directories(out_dir);
  const RunOutputs o = render_outputs(result);
  const std::vector<std::pair<std::string, const std::string*>> files{
      {"events.csv", &o.events_csv},     {"worldlines.csv", &o.worldlines_csv},
      {"segments.csv", &o.segments_csv}, {"trace.csv", &o.trace_csv},
      {"report.csv", &o.report_csv},
  };
  nlohmann::ordered_json m;
  m["tool"] = "wavecrest";
  m["version"] = std::string(kToolVersion);
  m["scenario_digest"] = "sha256:" + sha256_hex(scenario_text);
  auto outputs = nlohmann::ordered_json::array();
  for (const auto& [name, text] : files) {
    write_file_atomic(out_dir / name, *text);
    outputs.push_back({{"file", name}, {"sha256", sha256_hex(*text)}});
  }
  m["outputs"] = outputs;
  const auto& d = result.diagnostics;
  m["diagnostics"] = {{"events", result.events.size()},
                      {"crests", d.crest_count},
                      {"trains", d.train_count},
                      {"segments", result.segments.size()},
                      {"max_depth", d.max_depth_reached},
                      {"source_weight", d.source_weight},
                      {"pruned_weight", d.pruned_weight},
                      {"shadowed_weight", d.shadowed_weight}};
  write_file_atomic(out_dir / "manifest.json", m.dump(2) + "\n");
  if (summary) *summary = summarize(o.report);
}

int simulate_text(const std::string& text, const std::filesystem::path& out_dir,
                  const SimulateOptions& opts, std::ostream& log, RunSummary* summary,
                  const std::function<void(ScenarioFile&)>& edit = {}) {
  try {
    ScenarioFile f = parse_scenario(text);
    if (edit) edit(f);
    if (opts.substeps) f.run.substeps = *opts.substeps;
    if (opts.sample_rate) f.run.sample_rate = *opts.sample_rate;
    const Scenario sc = to_scenario(f);
    const SimulationResult result = run(sc);
    write_run(result, text, out_dir, summary);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
                 const SimulateOptions& opts, std::ostream& log) {
  std::string text;
  try {
    text = read_file(scenario);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return simulate_text(text, out_dir, opts, log, nullptr);
}

// ------------------------------------------------------------------- sweep

int cmd_sweep(const std::filesystem::path& scenario, std::string_view param, std::string_view range,
              const std::filesystem::path& out_dir, std::ostream& log) {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  {
    const auto c1 = range.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : range.find(':', c1 + 1);
    bool ok = c2 != std::string_view::npos;
    if (ok) {
      const auto a = range.substr(0, c1), b = range.substr(c1 + 1, c2 - c1 - 1), n = range.substr(c2 + 1);
      auto num = [](std::string_view s, auto& v) {
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        return !s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size();
      };
      ok = num(a, lo) && num(b, hi) && num(n, count) && count >= 1;
    }
    if (!ok) {
      log << "error: range must be start:stop:count with count >= 1, got '" << range << "'\n";
      return kExitValidation;
    }
  }
  std::string text;
  try {
    text = read_file(scenario);
    ScenarioFile probe = parse_scenario(text);
    set_numeric(probe, param, lo);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidInput && !text.empty() ? kExitValidation : exit_code_for(e);
  }

  std::vector<double> values(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    values[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * (static_cast<double>(i) / (count - 1));
  }
  std::vector<RunSummary> sums(values.size());
  std::vector<int> codes(values.size(), kExitOk);
  std::vector<std::string> logs(values.size());
  const std::string key(param);
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    std::ostringstream sub_log;
    char name[32];
    std::snprintf(name, sizeof name, "run_%04zu", u);
    codes[u] = simulate_text(text, out_dir / name, {}, sub_log, &sums[u],
                             [&](ScenarioFile& f) { set_numeric(f, key, values[u]); });
    logs[u] = sub_log.str();
  }
  int worst = kExitOk;
  CsvWriter w({"value", "beat_frequency", "visibility", "stationary_phase_diff"});
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!logs[i].empty()) log << "run " << i << " (" << key << " = " << format_double(values[i]) << "): " << logs[i];
    worst = std::max(worst, codes[i]);
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    w.field(values[i]).field(opt(sums[i].beat_frequency)).field(opt(sums[i].visibility)).field(opt(sums[i].phase));
    w.end_row();
  }
  try {
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / "sweep.csv", w.text());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return worst;
}

// ------------------------------------------------------------------- check

namespace {

struct CheckRow {
  std::string name;
  double expected;
  double got;
  double tol;  // relative unless abs_tol
  bool abs_tol = false;

  bool pass() const {
    const double err = std::abs(got - expected);
    return abs_tol ? err <= tol : err <= tol * std::max(1.0, std::abs(expected));
  }
};

double wrap(double x) {
  const double tp = 2.0 * std::numbers::pi;
  double r = std::fmod(x, tp);
  return r < 0.0 ? r + tp : r;
}

}  // namespace

int cmd_check(std::ostream& out) {
  std::vector<CheckRow> rows;
  const WaveModel sch = WaveModel::make(Family::Schrodinger);
  const double m = 1.0, hbar = 1.0, V = 1.0, vg = 0.2;
  const SplitterOptics bal = SplitterOptics::balanced();

  const PlaneWave up = plane_wave(sch, m * vg / hbar);
  const PlaneWave down = plane_wave(sch, -m * vg / hbar);
  const PlaneWave r2 = reflect_at_moving_bs(sch, up, -V, bal);
  const PlaneWave r1 = reflect_at_moving_bs(sch, down, -V, bal);
  rows.push_back({"case II reflected frequency m(2V+v_g)^2/2hbar", m * std::pow(2 * V + vg, 2) / (2 * hbar), r2.omega, 1e-12});
  rows.push_back({"case II reflected wavevector m(2V+v_g)/hbar", m * (2 * V + vg) / hbar, std::abs(r2.k), 1e-12});
  rows.push_back({"case I reflected frequency m(2V-v_g)^2/2hbar", m * std::pow(2 * V - vg, 2) / (2 * hbar), r1.omega, 1e-12});
  rows.push_back({"case I reflected wavevector m(2V-v_g)/hbar", m * (2 * V - vg) / hbar, std::abs(r1.k), 1e-12});
  rows.push_back({"beat frequency 4mVv_g/hbar", 4 * m * V * vg / hbar, r2.omega - r1.omega, 1e-12});
  {
    const PlaneWave t = transmit_at_moving_bs(sch, up, -V, bal);
    rows.push_back({"transmitted frequency unchanged", up.omega, t.omega, 0.0});
  }
  rows.push_back({"Schrodinger phase velocity v_g/2", vg / 2, phase_velocity(sch, up.k), 1e-15});
  {
    const PlaneWave b = galilean_boost_plane_wave(sch, galilean_boost_plane_wave(sch, up, 0.37), -0.37);
    rows.push_back({"Galilean boost round trip", up.omega, b.omega, 1e-12});
  }
  {
    Units u;
    u.c = 100.0;
    const WaveModel kg = WaveModel::make(Family::KleinGordon, u);
    const PlaneWave w = plane_wave(kg, wavevector_from_group_speed(kg, 0.5));
    const PlaneWave r = reflect_at_moving_bs(kg, w, -1.0, bal);
    const double approx = u.c * u.c / (2 * 1.0 + 0.5);
    const double rel = std::abs(std::abs(phase_velocity(kg, r.k)) - approx) / approx;
    rows.push_back({"KG reflected phase velocity c^2/(2V+v_g) to O((v/c)^2)", 0.0, rel,
                    4.0 * std::pow(2.5 / u.c, 2), true});
  }
  rows.push_back({"grating phase difference 2kL", 2.0, grating_phase_difference(0.2, 5.0), 1e-15});
  {
    const OverlapWindow w = shutter_overlap_window({0.0, 0.25, 1.0, 0.5});
    rows.push_back({"shutter start t2 = t1 + alpha tau", 0.5, w.t2, 1e-15});
    rows.push_back({"shutter duration tau(1-alpha)", 1.5, w.duration, 1e-15});
  }
  rows.push_back({"EM shutter overlap t2-t1<L/c (0.5 < 1)", 1.0, em_shutter_overlap(0, 0.5, 1, 1) ? 1.0 : 0.0, 0.0});
  rows.push_back({"EM shutter no overlap t2-t1>L/c (2 > 1)", 0.0, em_shutter_overlap(0, 2, 1, 1) ? 1.0 : 0.0, 0.0});
  rows.push_back({"slab shift mgL(1-n)/n hbar", 6.0, slab_transmission_shift({1, 2, 3, 0.5, 1}), 1e-15});
  rows.push_back({"slab shift vanishes at n=1", 0.0, slab_transmission_shift({1, 2, 3, 1.0, 1}), 0.0, true});

  try {
    const Scenario s = build_fig1_scenario(vg, V, 5.0, 0.0, sch);
    const SimulationResult r = run(s);
    const auto grid = default_time_grid(r.segments, s.run.sample_rate, s.run.t_max);
    const InterferenceReport rep = analyze(superpose(r.segments, s.detector.position, grid));
    const WindowReport* st = rep.stationary_window();
    const double got = st && st->stationary_phase_difference ? *st->stationary_phase_difference : NAN;
    rows.push_back({"final phase difference m v_g 2L/hbar (mod 2pi)", wrap(2.0 * m * vg * 5.0 / hbar), got, 1e-6, true});

    Units u;
    u.c = 10.0;
    const WaveModel kg = WaveModel::make(Family::KleinGordon, u);
    const SimulationResult rk = run(build_fig1_scenario(vg, V, 5.0, 0.0, kg));
    const auto overtakes = std::count_if(rk.events.begin(), rk.events.end(),
                                         [](const Event& e) { return is_overtake(e.kind); });
    rows.push_back({"KG no-overtake (overtake events)", 0.0, static_cast<double>(overtakes), 0.0, true});
  } catch (const std::exception& e) {
    rows.push_back({std::string("moving-splitter run failed: ") + e.what(), 0.0, 1.0, 0.0, true});
  }

  bool all = true;
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  for (const auto& r : rows) {
    const bool ok = r.pass();
    all = all && ok;
    out << (ok ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name
        << "  expected " << format_double(r.expected) << "  got " << format_double(r.got) << '\n';
  }
  out << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace wavecrest
