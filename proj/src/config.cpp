#include "ablab/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ablab/errors.hpp"

namespace ablab::config {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

AlphaValue AlphaValue::of_double(double v) { return {Rational(0), v, false}; }

std::string AlphaValue::str() const { return is_exact ? exact.str() : format_double(value); }

bool CommutatorSection::operator==(const CommutatorSection& o) const {
  if (n != o.n || h != o.h || alpha != o.alpha || random_cases != o.random_cases ||
      probe_width != o.probe_width || cases.size() != o.cases.size()) {
    return false;
  }
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& a = cases[k];
    const auto& b = o.cases[k];
    if (a.x != b.x || a.y != b.y || a.a != b.a || a.b != b.b) return false;
  }
  return true;
}

bool Config::operator==(const Config& o) const {
  return grid == o.grid && gauge == o.gauge && fluxes == o.fluxes && paths == o.paths &&
         geometry == o.geometry && source == o.source && evolution == o.evolution &&
         sweep == o.sweep && commutator == o.commutator && eigen == o.eigen;
}

Grid2D Config::grid2d() const { return Grid2D{grid.nx, grid.ny, grid.h, grid.h, grid.origin}; }

gauge::FluxConfig Config::flux_config() const {
  std::vector<gauge::FluxLine> lines;
  for (const auto& f : fluxes) {
    if (f.center) lines.push_back({*f.center, f.alpha.value});
  }
  return gauge::FluxConfig(std::move(lines), gauge.singular_radius);
}

experiment::NoninterferometerParams Config::scenario_params() const {
  experiment::NoninterferometerParams p;
  p.nx = grid.nx;
  p.ny = grid.ny;
  p.h = grid.h;
  p.mass = source.mass;
  p.wave_number = source.wave_number;
  p.source_x = geometry.source_x;
  p.source_width_x = source.width_x;
  p.source_width_y = source.width_y;
  p.barrier_x = geometry.barrier_x;
  p.passage_length = geometry.passage_length;
  p.slit_width = geometry.slit_width;
  p.slit_separation = geometry.slit_separation;
  p.chamber_wall = geometry.chamber_wall;
  p.detector_distance = geometry.detector_distance;
  p.detector_length = geometry.detector_length;
  p.wall_factor = geometry.wall_factor;
  p.absorber_width = evolution.absorber_width;
  p.absorber_strength = evolution.absorber_strength;
  p.dt = evolution.dt;
  p.t_max = evolution.t_max;
  p.solver_tolerance = evolution.solver_tolerance;
  p.mode = sweep.mode;
  for (const auto& f : fluxes) {
    if (f.chamber == "A") {
      p.alpha_a = f.alpha.is_exact ? f.alpha.exact : Rational(0);
      p.flux_a_center = f.center;
    } else if (f.chamber == "B") {
      p.alpha_b = f.alpha.is_exact ? f.alpha.exact : Rational(0);
      p.flux_b_center = f.center;
    }
  }
  return p;
}

eigen::EigenSolutionSpec Config::eigen_spec() const {
  return {eigen.alpha, {eigen.lambda_re, eigen.lambda_im},
          {eigen.amplitude, eigen.profile_center, eigen.profile_width}, eigen::Axis::X};
}

namespace {

std::string_view trim(std::string_view t) {
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  return t;
}

std::vector<std::string_view> split(std::string_view t, char sep) {
  std::vector<std::string_view> out;
  if (trim(t).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto p = t.find(sep, start);
    out.push_back(trim(t.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line{0};
};

struct Block {
  std::string name;
  int line{0};
  std::map<std::string, Entry> keys;
  std::vector<Entry> cases;  // commutator `case` lines, in order
};

class Reader {
 public:
  Reader(Block& b, std::vector<std::string>& log) : b_(b), log_(log) {}

  [[noreturn]] void schema(const std::string& key, int line, const std::string& what) const {
    std::ostringstream msg;
    msg << "line " << line << ", [" << b_.name << "]." << key << ": " << what;
    throw Error(ErrorCode::SchemaError, msg.str());
  }
  [[noreturn]] void range(const std::string& key, int line, const std::string& what) const {
    std::ostringstream msg;
    msg << "line " << line << ", [" << b_.name << "]." << key << ": " << what;
    throw Error(ErrorCode::RangeError, msg.str());
  }

  const Entry* find(const std::string& key) {
    used_.insert(key);
    auto it = b_.keys.find(key);
    return it == b_.keys.end() ? nullptr : &it->second;
  }

  void note_default(const std::string& key, const std::string& value) {
    log_.push_back("default: [" + b_.name + "]." + key + " = " + value);
  }

  double real(std::string_view text, const std::string& key, int line) const {
    const std::string s(trim(text));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      // allow rationals for lengths too (e.g. h = 1/32)
      try {
        return parse_rational(s).to_double();
      } catch (const Error&) {
        schema(key, line, "expected a number, got '" + s + "'");
      }
    }
    return v;
  }

  void get(const std::string& key, double& out) {
    if (const Entry* e = find(key)) out = real(e->value, key, e->line);
    else note_default(key, format_double(out));
  }

  template <class Int>
  Int integer(std::string_view text, const std::string& key, int line) const {
    const std::string s(trim(text));
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      schema(key, line, "expected an integer, got '" + s + "'");
    }
    return v;
  }

  void get(const std::string& key, int& out) {
    if (const Entry* e = find(key)) out = integer<int>(e->value, key, e->line);
    else note_default(key, std::to_string(out));
  }

  void get(const std::string& key, std::uint64_t& out) {
    if (const Entry* e = find(key)) out = integer<std::uint64_t>(e->value, key, e->line);
    else note_default(key, std::to_string(out));
  }

  void get(const std::string& key, bool& out) {
    if (const Entry* e = find(key)) {
      if (e->value == "true") out = true;
      else if (e->value == "false") out = false;
      else schema(key, e->line, "expected true or false, got '" + e->value + "'");
    } else {
      note_default(key, out ? "true" : "false");
    }
  }

  Vec2 vec2(std::string_view text, const std::string& key, int line) const {
    const auto parts = split(text, ',');
    if (parts.size() != 2) schema(key, line, "expected 'x, y', got '" + std::string(text) + "'");
    return {real(parts[0], key, line), real(parts[1], key, line)};
  }

  AlphaValue alpha(std::string_view text, const std::string& key, int line) {
    const std::string s(trim(text));
    if (looks_rational(s)) return AlphaValue::of(parse_rational(s));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      schema(key, line, "expected a rational 'p/q' or a number, got '" + s + "'");
    }
    std::ostringstream msg;
    msg << "warning: line " << line << ", [" << b_.name << "]." << key << " = " << s
        << " is a float; integer and half-integer values are only exact as rationals";
    log_.push_back(msg.str());
    return AlphaValue::of_double(v);
  }

  std::vector<AlphaValue> alpha_list(const std::string& key, std::vector<AlphaValue> fallback) {
    if (const Entry* e = find(key)) {
      std::vector<AlphaValue> out;
      for (auto part : split(e->value, ',')) out.push_back(alpha(part, key, e->line));
      return out;
    }
    std::string shown;
    for (const auto& a : fallback) shown += (shown.empty() ? "" : ", ") + a.str();
    note_default(key, shown);
    return fallback;
  }

  void finish() const {
    for (const auto& [key, e] : b_.keys) {
      if (!used_.count(key)) schema(key, e.line, "unknown key");
    }
  }

  Block& block() { return b_; }

 private:
  Block& b_;
  std::vector<std::string>& log_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections = {"grid",  "gauge", "flux",  "path",       "geometry",
                                         "source", "evolution", "sweep", "commutator", "eigen"};

std::vector<Block> tokenize(std::string_view text) {
  std::vector<Block> blocks;
  std::set<std::string> seen_unique;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": " + what);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + std::string(line) + "'");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(name)) fail("unknown section [" + name + "]");
      if (name != "flux" && name != "path") {
        if (seen_unique.count(name)) fail("section [" + name + "] given twice");
        seen_unique.insert(name);
      }
      blocks.push_back(Block{name, line_no, {}, {}});
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail("expected 'key = value', got '" + std::string(line) + "'");
      if (blocks.empty()) fail("key outside any section");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) fail("empty key");
      Block& b = blocks.back();
      if (b.name == "commutator" && key == "case") {
        b.cases.push_back({value, line_no});
      } else {
        if (b.keys.count(key)) fail("[" + b.name + "]." + key + " given twice");
        b.keys[key] = Entry{value, line_no};
      }
    }
    if (end == text.size()) break;
  }
  return blocks;
}

Block* find_block(std::vector<Block>& blocks, const std::string& name) {
  for (auto& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

std::vector<AlphaValue> rationals(std::initializer_list<std::pair<int, int>> v) {
  std::vector<AlphaValue> out;
  for (auto [p, q] : v) out.push_back(AlphaValue::of(Rational(p, q)));
  return out;
}

std::string offset_rule_text() {
  const Vec2 off = flux_cell_offset();
  std::ostringstream msg;
  msg.precision(6);
  msg << "offset rule: put flux centres at a grid node plus (" << off.x << ", " << off.y
      << ") cells, i.e. (0.5 + 1/sqrt(2931), 0.5 + 1/sqrt(4099))";
  return msg.str();
}

}  // namespace

Config parse_config(std::string_view text) {
  std::vector<Block> blocks = tokenize(text);
  Config c;
  auto& log = c.log;
  auto with_block = [&](const std::string& name, const std::function<void(Reader&)>& fn) {
    Block empty{name, 0, {}, {}};
    Block* b = find_block(blocks, name);
    Reader r(b ? *b : empty, log);
    fn(r);
    r.finish();
  };

  with_block("grid", [&](Reader& r) {
    r.get("nx", c.grid.nx);
    r.get("ny", c.grid.ny);
    r.get("h", c.grid.h);
    if (const Entry* e = r.find("origin")) c.grid.origin = r.vec2(e->value, "origin", e->line);
    else r.note_default("origin", "0, 0");
    const int line = r.block().line;
    if (c.grid.nx < 16 || c.grid.ny < 16) r.range("nx", line, "grid needs nx, ny >= 16");
    if (!(c.grid.h > 0.0)) r.range("h", line, "grid spacing must be > 0");
  });
  with_block("gauge", [&](Reader& r) {
    r.get("singular_radius", c.gauge.singular_radius);
    r.get("quadrature_step", c.gauge.quadrature_step);
    if (!(c.gauge.singular_radius > 0.0)) r.range("singular_radius", r.block().line, "must be > 0");
    if (!(c.gauge.quadrature_step > 0.0)) r.range("quadrature_step", r.block().line, "must be > 0");
  });

  const Grid2D grid = c.grid2d();
  bool have_a = false, have_b = false;
  for (auto& b : blocks) {
    if (b.name == "flux") {
      Reader r(b, log);
      FluxEntry f;
      if (const Entry* e = r.find("chamber")) {
        if (e->value != "A" && e->value != "B") r.schema("chamber", e->line, "expected A or B");
        f.chamber = e->value;
        bool& seen = f.chamber == "A" ? have_a : have_b;
        if (seen) r.schema("chamber", e->line, "chamber " + f.chamber + " has two flux lines");
        seen = true;
      }
      const Entry* ce = r.find("center");
      if (ce) f.center = r.vec2(ce->value, "center", ce->line);
      else if (f.chamber.empty()) r.schema("center", b.line, "missing (required unless chamber is set)");
      const Entry* ae = r.find("alpha");
      if (!ae) r.schema("alpha", b.line, "missing");
      f.alpha = r.alpha(ae->value, "alpha", ae->line);
      if (!f.chamber.empty() && !f.alpha.is_exact) {
        r.schema("alpha", ae->line, "chamber fluxes must be exact rationals");
      }
      if (f.center && distance_to_grid_lines(grid, *f.center) < c.gauge.singular_radius) {
        std::ostringstream msg;
        msg << "flux centre (" << f.center->x << ", " << f.center->y << ") lies on a grid line; "
            << offset_rule_text();
        r.range("center", ce->line, msg.str());
      }
      r.finish();
      c.fluxes.push_back(std::move(f));
    } else if (b.name == "path") {
      Reader r(b, log);
      PathEntry p;
      const Entry* ve = r.find("vertices");
      if (!ve) r.schema("vertices", b.line, "missing");
      for (auto part : split(ve->value, ';')) p.vertices.push_back(r.vec2(part, "vertices", ve->line));
      if (p.vertices.size() < 2) r.range("vertices", ve->line, "a path needs at least 2 vertices");
      r.get("closed", p.closed);
      r.finish();
      c.paths.push_back(std::move(p));
    }
  }
  try {
    (void)c.flux_config();
  } catch (const Error& e) {
    throw Error(ErrorCode::RangeError, std::string("[flux] sections: ") + e.what());
  }

  with_block("geometry", [&](Reader& r) {
    auto& g = c.geometry;
    r.get("source_x", g.source_x);
    r.get("barrier_x", g.barrier_x);
    r.get("passage_length", g.passage_length);
    r.get("slit_width", g.slit_width);
    r.get("slit_separation", g.slit_separation);
    r.get("chamber_wall", g.chamber_wall);
    r.get("detector_distance", g.detector_distance);
    r.get("detector_length", g.detector_length);
    r.get("wall_factor", g.wall_factor);
  });
  with_block("source", [&](Reader& r) {
    auto& s = c.source;
    r.get("mass", s.mass);
    r.get("wave_number", s.wave_number);
    r.get("width_x", s.width_x);
    r.get("width_y", s.width_y);
    if (!(s.mass > 0.0)) r.range("mass", r.block().line, "must be > 0");
  });
  with_block("evolution", [&](Reader& r) {
    auto& e = c.evolution;
    r.get("dt", e.dt);
    r.get("t_max", e.t_max);
    r.get("absorber_width", e.absorber_width);
    r.get("absorber_strength", e.absorber_strength);
    r.get("solver_tolerance", e.solver_tolerance);
    if (e.dt < 0.0 || e.t_max < 0.0) r.range("dt", r.block().line, "dt and t_max must be >= 0 (0 = automatic)");
    if (e.absorber_strength < 0.0) r.range("absorber_strength", r.block().line, "must be >= 0 (absorbing)");
    if (!(e.solver_tolerance > 0.0)) r.range("solver_tolerance", r.block().line, "must be > 0");
  });
  with_block("sweep", [&](Reader& r) {
    auto& s = c.sweep;
    s.delta_alpha = r.alpha_list("delta_alpha", rationals({{0, 1}, {1, 4}, {1, 2}, {3, 4}, {1, 1}, {5, 4}}));
    if (const Entry* e = r.find("mode")) {
      try {
        s.mode = experiment::parse_mode(e->value);
      } catch (const Error&) {
        r.schema("mode", e->line, "expected standard or superseparability");
      }
    } else {
      r.note_default("mode", std::string(experiment::to_string(s.mode)));
    }
    r.get("workers", s.workers);
    r.get("seed", s.seed);
    r.get("integer_tolerance", s.integer_tolerance);
    if (s.workers < 1) r.range("workers", r.block().line, "must be >= 1");
    if (!(s.integer_tolerance >= 0.0)) r.range("integer_tolerance", r.block().line, "must be >= 0");
  });
  with_block("commutator", [&](Reader& r) {
    auto& s = c.commutator;
    r.get("n", s.n);
    r.get("h", s.h);
    s.alpha = r.alpha_list("alpha", rationals({{0, 1}, {1, 4}, {1, 2}, {1, 1}, {13, 10}, {2, 1}}));
    r.get("random_cases", s.random_cases);
    r.get("probe_width", s.probe_width);
    if (r.block().cases.empty()) {
      s.cases = weyl::default_commutator_cases();
      r.note_default("case", "built-in grid of " + std::to_string(s.cases.size()) + " cases");
    }
    for (const Entry& e : r.block().cases) {
      const auto parts = split(e.value, ',');
      if (parts.size() != 4) r.schema("case", e.line, "expected 'x, y, a, b'");
      s.cases.push_back({r.real(parts[0], "case", e.line), r.real(parts[1], "case", e.line),
                         r.real(parts[2], "case", e.line), r.real(parts[3], "case", e.line), 0.0});
    }
    if (s.n < 16) r.range("n", r.block().line, "must be >= 16");
    if (!(s.h > 0.0)) r.range("h", r.block().line, "must be > 0");
    if (s.random_cases < 0) r.range("random_cases", r.block().line, "must be >= 0");
  });
  with_block("eigen", [&](Reader& r) {
    auto& e = c.eigen;
    r.get("alpha", e.alpha);
    r.get("lambda_re", e.lambda_re);
    r.get("lambda_im", e.lambda_im);
    r.get("amplitude", e.amplitude);
    r.get("profile_center", e.profile_center);
    r.get("profile_width", e.profile_width);
    r.get("x_min", e.x_min);
    r.get("x_max", e.x_max);
    r.get("y_min", e.y_min);
    r.get("dy", e.dy);
    r.get("rows", e.rows);
    if (const Entry* en = r.find("ladder")) {
      for (auto part : split(en->value, ',')) e.ladder.push_back(r.integer<int>(part, "ladder", en->line));
    } else {
      e.ladder = {64, 128, 256, 512, 1024};
      r.note_default("ladder", "64, 128, 256, 512, 1024");
    }
    if (!(e.x_max > e.x_min)) r.range("x_max", r.block().line, "must exceed x_min");
    if (e.rows < 16) r.range("rows", r.block().line, "must be >= 16");
    if (!(e.dy > 0.0) || !(e.profile_width > 0.0)) r.range("dy", r.block().line, "dy and profile_width must be > 0");
    for (int n : e.ladder) {
      if (n < 4) r.range("ladder", r.block().line, "points per unit must be >= 4");
    }
  });
  return c;
}

std::string emit_config(const Config& c) {
  std::ostringstream o;
  auto d = [](double v) { return format_double(v); };
  auto alphas = [](const std::vector<AlphaValue>& v) {
    std::string s;
    for (const auto& a : v) s += (s.empty() ? "" : ", ") + a.str();
    return s;
  };
  o << "[grid]\n"
    << "nx = " << c.grid.nx << "\n"
    << "ny = " << c.grid.ny << "\n"
    << "h = " << d(c.grid.h) << "\n"
    << "origin = " << d(c.grid.origin.x) << ", " << d(c.grid.origin.y) << "\n\n";
  o << "[gauge]\n"
    << "singular_radius = " << d(c.gauge.singular_radius) << "\n"
    << "quadrature_step = " << d(c.gauge.quadrature_step) << "\n\n";
  for (const auto& f : c.fluxes) {
    o << "[flux]\n";
    if (!f.chamber.empty()) o << "chamber = " << f.chamber << "\n";
    if (f.center) o << "center = " << d(f.center->x) << ", " << d(f.center->y) << "\n";
    o << "alpha = " << f.alpha.str() << "\n\n";
  }
  for (const auto& p : c.paths) {
    o << "[path]\nvertices = ";
    for (std::size_t k = 0; k < p.vertices.size(); ++k) {
      o << (k ? "; " : "") << d(p.vertices[k].x) << ", " << d(p.vertices[k].y);
    }
    o << "\nclosed = " << (p.closed ? "true" : "false") << "\n\n";
  }
  const auto& g = c.geometry;
  o << "[geometry]\n"
    << "source_x = " << d(g.source_x) << "\n"
    << "barrier_x = " << d(g.barrier_x) << "\n"
    << "passage_length = " << d(g.passage_length) << "\n"
    << "slit_width = " << d(g.slit_width) << "\n"
    << "slit_separation = " << d(g.slit_separation) << "\n"
    << "chamber_wall = " << d(g.chamber_wall) << "\n"
    << "detector_distance = " << d(g.detector_distance) << "\n"
    << "detector_length = " << d(g.detector_length) << "\n"
    << "wall_factor = " << d(g.wall_factor) << "\n\n";
  o << "[source]\n"
    << "mass = " << d(c.source.mass) << "\n"
    << "wave_number = " << d(c.source.wave_number) << "\n"
    << "width_x = " << d(c.source.width_x) << "\n"
    << "width_y = " << d(c.source.width_y) << "\n\n";
  const auto& e = c.evolution;
  o << "[evolution]\n"
    << "dt = " << d(e.dt) << "\n"
    << "t_max = " << d(e.t_max) << "\n"
    << "absorber_width = " << e.absorber_width << "\n"
    << "absorber_strength = " << d(e.absorber_strength) << "\n"
    << "solver_tolerance = " << d(e.solver_tolerance) << "\n\n";
  o << "[sweep]\n"
    << "delta_alpha = " << alphas(c.sweep.delta_alpha) << "\n"
    << "mode = " << experiment::to_string(c.sweep.mode) << "\n"
    << "workers = " << c.sweep.workers << "\n"
    << "seed = " << c.sweep.seed << "\n"
    << "integer_tolerance = " << d(c.sweep.integer_tolerance) << "\n\n";
  const auto& m = c.commutator;
  o << "[commutator]\n"
    << "n = " << m.n << "\n"
    << "h = " << d(m.h) << "\n"
    << "alpha = " << alphas(m.alpha) << "\n"
    << "random_cases = " << m.random_cases << "\n"
    << "probe_width = " << d(m.probe_width) << "\n";
  for (const auto& k : m.cases) {
    o << "case = " << d(k.x) << ", " << d(k.y) << ", " << d(k.a) << ", " << d(k.b) << "\n";
  }
  o << "\n";
  const auto& q = c.eigen;
  o << "[eigen]\n"
    << "alpha = " << d(q.alpha) << "\n"
    << "lambda_re = " << d(q.lambda_re) << "\n"
    << "lambda_im = " << d(q.lambda_im) << "\n"
    << "amplitude = " << d(q.amplitude) << "\n"
    << "profile_center = " << d(q.profile_center) << "\n"
    << "profile_width = " << d(q.profile_width) << "\n"
    << "x_min = " << d(q.x_min) << "\n"
    << "x_max = " << d(q.x_max) << "\n"
    << "y_min = " << d(q.y_min) << "\n"
    << "dy = " << d(q.dy) << "\n"
    << "rows = " << q.rows << "\n"
    << "ladder = ";
  for (std::size_t k = 0; k < q.ladder.size(); ++k) o << (k ? ", " : "") << q.ladder[k];
  o << "\n";
  return o.str();
}

}  // namespace ablab::config
