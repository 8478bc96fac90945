#include "wavecrest/scenario_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "wavecrest/csv.hpp"
#include "wavecrest/error.hpp"

namespace wavecrest {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry, std::less<>> keys;
  std::vector<Entry> segments;
};

const std::map<std::string, std::set<std::string, std::less<>>, std::less<>>& schema() {
  static const std::map<std::string, std::set<std::string, std::less<>>, std::less<>> s{
      {"units", {"hbar", "m", "c", "sound_speed"}},
      {"model", {"family"}},
      {"source", {"position", "v_g", "omega0", "t_on", "t_off", "crest_spacing"}},
      {"beamsplitter", {"reflectivity", "interface_phase", "x0", "t0", "segment"}},
      {"detector", {"position"}},
      {"run", {"t_max", "x_min", "x_max", "substeps", "sample_rate"}},
  };
  return s;
}

[[noreturn]] void parse_error(int line, const std::string& what, std::string_view token) {
  throw Error(ErrorKind::Parse,
              "line " + std::to_string(line) + ": " + what + " '" + std::string(token) + "'");
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

double to_double(std::string_view tok, int line) {
  tok = trim(tok);
  double v = 0.0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
    parse_error(line, "invalid number", tok);
  }
  return v;
}

int to_int(std::string_view tok, int line) {
  tok = trim(tok);
  int v = 0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
    parse_error(line, "invalid integer", tok);
  }
  return v;
}

const Entry& need(const std::map<std::string, Section, std::less<>>& secs, std::string_view sec,
                  std::string_view key) {
  const auto s = secs.find(sec);
  if (s == secs.end()) {
    throw Error(ErrorKind::Parse, "missing section [" + std::string(sec) + "]");
  }
  const auto k = s->second.keys.find(key);
  if (k == s->second.keys.end()) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(s->second.line) + ": section [" +
                                      std::string(sec) + "] is missing key '" + std::string(key) + "'");
  }
  return k->second;
}

const Entry* maybe(const std::map<std::string, Section, std::less<>>& secs, std::string_view sec,
                   std::string_view key) {
  const auto s = secs.find(sec);
  if (s == secs.end()) return nullptr;
  const auto k = s->second.keys.find(key);
  return k == s->second.keys.end() ? nullptr : &k->second;
}

TrajectorySegment parse_segment(const Entry& e) {
  std::vector<std::string_view> parts;
  std::string_view rest = e.value;
  while (true) {
    const auto p = rest.find(',');
    parts.push_back(trim(rest.substr(0, p)));
    if (p == std::string_view::npos) break;
    rest = rest.substr(p + 1);
  }
  if (parts.size() != 4) parse_error(e.line, "segment needs kind,duration,velocity0,accel, got", e.value);
  const auto kind = segment_kind_from_name(parts[0]);
  if (!kind) parse_error(e.line, "unknown segment kind", parts[0]);
  TrajectorySegment s;
  s.kind = *kind;
  s.duration = to_double(parts[1], e.line);
  s.velocity0 = to_double(parts[2], e.line);
  s.accel = to_double(parts[3], e.line);
  return s;
}

void line(std::string& out, std::string_view key, double v) {
  out += key;
  out += " = ";
  out += format_double(v);
  out += '\n';
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text) {
  std::map<std::string, Section, std::less<>> secs;
  Section* cur = nullptr;
  std::string cur_name;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const std::string_view ln = trim(raw);
    if (ln.empty() || ln.front() == '#') continue;
    if (ln.front() == '[') {
      if (ln.back() != ']') parse_error(lineno, "malformed section header", ln);
      const std::string name(trim(ln.substr(1, ln.size() - 2)));
      if (!schema().contains(name)) parse_error(lineno, "unknown section", name);
      if (secs.contains(name)) parse_error(lineno, "duplicate section", name);
      cur = &secs[name];
      cur->line = lineno;
      cur_name = name;
      continue;
    }
    const auto eq = ln.find('=');
    if (eq == std::string_view::npos) parse_error(lineno, "expected key = value, got", ln);
    const std::string key(trim(ln.substr(0, eq)));
    const std::string value(trim(ln.substr(eq + 1)));
    if (!cur) parse_error(lineno, "key outside any section", key);
    if (!schema().at(cur_name).contains(key)) parse_error(lineno, "unknown key in [" + cur_name + "]", key);
    if (value.empty()) parse_error(lineno, "empty value for key", key);
    if (key == "segment") {
      cur->segments.push_back({value, lineno});
      continue;
    }
    if (cur->keys.contains(key)) parse_error(lineno, "duplicate key", key);
    cur->keys[key] = {value, lineno};
  }

  ScenarioFile f;
  auto num = [&](std::string_view s, std::string_view k) {
    const Entry& e = need(secs, s, k);
    return to_double(e.value, e.line);
  };
  auto opt = [&](std::string_view s, std::string_view k) -> std::optional<double> {
    const Entry* e = maybe(secs, s, k);
    if (!e) return std::nullopt;
    return to_double(e->value, e->line);
  };

  f.units.hbar = num("units", "hbar");
  f.units.m = num("units", "m");
  f.units.c = num("units", "c");
  f.units.sound_speed = opt("units", "sound_speed");
  {
    const Entry& e = need(secs, "model", "family");
    try {
      f.family = family_from_name(e.value);
    } catch (const Error&) {
      parse_error(e.line, "unknown model family", e.value);
    }
  }
  f.source.position = num("source", "position");
  f.source.v_g = opt("source", "v_g");
  f.source.omega0 = opt("source", "omega0");
  if (f.source.v_g.has_value() == f.source.omega0.has_value()) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(secs.at("source").line) +
                                      ": [source] needs exactly one of 'v_g' or 'omega0'");
  }
  f.source.t_on = num("source", "t_on");
  f.source.t_off = num("source", "t_off");
  f.source.crest_spacing = num("source", "crest_spacing");

  f.beamsplitter.reflectivity = num("beamsplitter", "reflectivity");
  f.beamsplitter.interface_phase = opt("beamsplitter", "interface_phase");
  f.beamsplitter.x0 = num("beamsplitter", "x0");
  f.beamsplitter.t0 = num("beamsplitter", "t0");
  const Section& bs = secs.at("beamsplitter");
  if (bs.segments.empty()) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(bs.line) + ": [beamsplitter] has no segment lines");
  }
  for (const Entry& e : bs.segments) f.beamsplitter.segments.push_back(parse_segment(e));
  try {
    (void)Trajectory::make(f.beamsplitter.x0, f.beamsplitter.t0, f.beamsplitter.segments);
  } catch (const Error& err) {
    // map "segment i: ..." back to the line that declared it
    std::string msg = err.what();
    int line = bs.line;
    if (msg.rfind("segment ", 0) == 0) {
      const std::size_t idx = std::strtoul(msg.c_str() + 8, nullptr, 10);
      if (idx < bs.segments.size()) line = bs.segments[idx].line;
    }
    throw Error(ErrorKind::Validation, "line " + std::to_string(line) + ": " + msg);
  }

  f.detector.position = num("detector", "position");
  f.run.t_max = num("run", "t_max");
  f.run.x_min = num("run", "x_min");
  f.run.x_max = num("run", "x_max");
  {
    const Entry& e = need(secs, "run", "substeps");
    f.run.substeps = to_int(e.value, e.line);
  }
  f.run.sample_rate = num("run", "sample_rate");
  return f;
}

std::string emit_scenario(const ScenarioFile& f) {
  std::string out;
  out += "[units]\n";
  line(out, "hbar", f.units.hbar);
  line(out, "m", f.units.m);
  line(out, "c", f.units.c);
  if (f.units.sound_speed) line(out, "sound_speed", *f.units.sound_speed);
  out += "\n[model]\nfamily = ";
  out += family_name(f.family);
  out += "\n\n[source]\n";
  line(out, "position", f.source.position);
  if (f.source.v_g) line(out, "v_g", *f.source.v_g);
  if (f.source.omega0) line(out, "omega0", *f.source.omega0);
  line(out, "t_on", f.source.t_on);
  line(out, "t_off", f.source.t_off);
  line(out, "crest_spacing", f.source.crest_spacing);
  out += "\n[beamsplitter]\n";
  line(out, "reflectivity", f.beamsplitter.reflectivity);
  if (f.beamsplitter.interface_phase) line(out, "interface_phase", *f.beamsplitter.interface_phase);
  line(out, "x0", f.beamsplitter.x0);
  line(out, "t0", f.beamsplitter.t0);
  for (const auto& s : f.beamsplitter.segments) {
    out += "segment = ";
    out += segment_kind_name(s.kind);
    out += ',' + format_double(s.duration) + ',' + format_double(s.velocity0) + ',' + format_double(s.accel) + '\n';
  }
  out += "\n[detector]\n";
  line(out, "position", f.detector.position);
  out += "\n[run]\n";
  line(out, "t_max", f.run.t_max);
  line(out, "x_min", f.run.x_min);
  line(out, "x_max", f.run.x_max);
  out += "substeps = " + std::to_string(f.run.substeps) + '\n';
  line(out, "sample_rate", f.run.sample_rate);
  return out;
}

namespace {

double wavevector_from_omega(const WaveModel& model, double omega) {
  const Units& u = model.units();
  switch (model.family()) {
    case Family::Schrodinger:
      if (!(omega > 0.0)) break;
      return std::sqrt(2.0 * u.mass * omega / u.hbar);
    case Family::KleinGordon: {
      const double w0 = u.mass * u.c * u.c / u.hbar;
      if (!(omega > w0)) break;
      return std::sqrt((omega - w0) * (omega + w0)) / u.c;
    }
    case Family::EMVacuum:
      if (!(omega > 0.0)) break;
      return omega / u.c;
    case Family::Acoustic:
      if (!(omega > 0.0)) break;
      return omega / u.sound_speed;
  }
  throw Error(ErrorKind::Validation, "source: omega0 is below the dispersion branch minimum");
}

}  // namespace

Scenario to_scenario(const ScenarioFile& f) {
  Scenario sc;
  Units u;
  u.hbar = f.units.hbar;
  u.mass = f.units.m;
  u.c = f.units.c;
  if (f.family == Family::Acoustic && !f.units.sound_speed) {
    throw Error(ErrorKind::Validation, "units: acoustic family requires sound_speed");
  }
  if (f.units.sound_speed) u.sound_speed = *f.units.sound_speed;
  try {
    sc.model = WaveModel::make(f.family, u);
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, std::string("units: ") + e.what());
  }

  double k = 0.0;
  if (f.source.v_g) {
    if (f.family == Family::EMVacuum || f.family == Family::Acoustic) {
      throw Error(ErrorKind::Validation, "source: v_g does not select a wavevector for this family; use omega0");
    }
    try {
      k = wavevector_from_group_speed(sc.model, *f.source.v_g);
    } catch (const Error& e) {
      throw Error(ErrorKind::Validation, std::string("source: ") + e.what());
    }
  } else {
    k = wavevector_from_omega(sc.model, *f.source.omega0);
  }
  sc.source.position = f.source.position;
  sc.source.wave = plane_wave(sc.model, k);
  sc.source.t_on = f.source.t_on;
  sc.source.t_off = f.source.t_off;
  sc.source.crest_spacing = f.source.crest_spacing;

  Element bs;
  bs.name = "beamsplitter";
  try {
    bs.trajectory = Trajectory::make(f.beamsplitter.x0, f.beamsplitter.t0, f.beamsplitter.segments);
    bs.optics.initial = SplitterOptics::from_reflectivity(f.beamsplitter.reflectivity,
                                                          f.beamsplitter.interface_phase.value_or(0.0));
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, std::string("beamsplitter: ") + e.what());
  }
  sc.elements.push_back(std::move(bs));

  sc.detector.position = f.detector.position;
  sc.run.t_max = f.run.t_max;
  sc.run.x_min = f.run.x_min;
  sc.run.x_max = f.run.x_max;
  sc.run.substeps = f.run.substeps;
  sc.run.sample_rate = f.run.sample_rate;
  return sc;
}

ScenarioFile from_scenario(const Scenario& sc) {
  if (sc.elements.size() != 1 || !sc.elements.front().optics.changes.empty()) {
    throw Error(ErrorKind::InvalidInput, "scenario files hold exactly one beamsplitter with fixed optics");
  }
  ScenarioFile f;
  const Units& u = sc.model.units();
  f.units.hbar = u.hbar;
  f.units.m = u.mass;
  f.units.c = u.c;
  if (sc.model.family() == Family::Acoustic) f.units.sound_speed = u.sound_speed;
  f.family = sc.model.family();
  f.source.position = sc.source.position;
  if (f.family == Family::Schrodinger || f.family == Family::KleinGordon) {
    f.source.v_g = group_velocity(sc.model, sc.source.wave.k);
  } else {
    f.source.omega0 = sc.source.wave.omega;
  }
  f.source.t_on = sc.source.t_on;
  f.source.t_off = sc.source.t_off;
  f.source.crest_spacing = sc.source.crest_spacing;
  const Element& el = sc.elements.front();
  f.beamsplitter.reflectivity = el.optics.initial.r;
  if (el.optics.initial.interface_phase != 0.0) f.beamsplitter.interface_phase = el.optics.initial.interface_phase;
  f.beamsplitter.x0 = el.trajectory.x0();
  f.beamsplitter.t0 = el.trajectory.t0();
  f.beamsplitter.segments.assign(el.trajectory.segments().begin(), el.trajectory.segments().end());
  f.detector.position = sc.detector.position;
  f.run.t_max = sc.run.t_max;
  f.run.x_min = sc.run.x_min;
  f.run.x_max = sc.run.x_max;
  f.run.substeps = sc.run.substeps;
  f.run.sample_rate = sc.run.sample_rate;
  return f;
}

void set_numeric(ScenarioFile& f, std::string_view key, double value) {
  auto bad = [&]() {
    throw Error(ErrorKind::InvalidInput, "'" + std::string(key) + "' is not a numeric scenario key");
  };
  const std::string seg_prefix = "beamsplitter.segment.";
  if (key.rfind(seg_prefix, 0) == 0) {
    const std::string_view rest = key.substr(seg_prefix.size());
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) bad();
    std::size_t idx = 0;
    const auto r = std::from_chars(rest.data(), rest.data() + dot, idx);
    if (r.ec != std::errc() || r.ptr != rest.data() + dot || idx >= f.beamsplitter.segments.size()) bad();
    const std::string_view field = rest.substr(dot + 1);
    auto& s = f.beamsplitter.segments[idx];
    if (field == "duration") s.duration = value;
    else if (field == "velocity0") s.velocity0 = value;
    else if (field == "accel") s.accel = value;
    else bad();
    return;
  }
  if (key == "units.hbar") f.units.hbar = value;
  else if (key == "units.m") f.units.m = value;
  else if (key == "units.c") f.units.c = value;
  else if (key == "units.sound_speed") f.units.sound_speed = value;
  else if (key == "source.position") f.source.position = value;
  else if (key == "source.v_g") {
    f.source.v_g = value;
    f.source.omega0.reset();
  } else if (key == "source.omega0") {
    f.source.omega0 = value;
    f.source.v_g.reset();
  } else if (key == "source.t_on") f.source.t_on = value;
  else if (key == "source.t_off") f.source.t_off = value;
  else if (key == "source.crest_spacing") f.source.crest_spacing = value;
  else if (key == "beamsplitter.reflectivity") f.beamsplitter.reflectivity = value;
  else if (key == "beamsplitter.interface_phase") f.beamsplitter.interface_phase = value;
  else if (key == "beamsplitter.x0") f.beamsplitter.x0 = value;
  else if (key == "beamsplitter.t0") f.beamsplitter.t0 = value;
  else if (key == "detector.position") f.detector.position = value;
  else if (key == "run.t_max") f.run.t_max = value;
  else if (key == "run.x_min") f.run.x_min = value;
  else if (key == "run.x_max") f.run.x_max = value;
  else if (key == "run.sample_rate") f.run.sample_rate = value;
  else if (key == "run.substeps") {
    if (value != std::floor(value) || value < 1 || value > 1e9) {
      throw Error(ErrorKind::InvalidInput, "run.substeps must be a positive integer");
    }
    f.run.substeps = static_cast<int>(value);
  } else bad();
}

}  // namespace wavecrest
