#include "ablab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ablab/errors.hpp"

namespace ablab::experiment {

std::string_view to_string(Mode m) noexcept {
  return m == Mode::StandardQM ? "standard" : "superseparability";
}

Mode parse_mode(std::string_view text) {
  if (text == "standard" || text == "standard-qm" || text == "StandardQM") return Mode::StandardQM;
  if (text == "superseparability" || text == "Superseparability") return Mode::Superseparability;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(Species s) noexcept {
  return s == Species::Deuteron ? "deuteron" : "alpha";
}

Species parse_species(std::string_view text) {
  if (text == "deuteron") return Species::Deuteron;
  if (text == "alpha" || text == "alpha-particle" || text == "alpha_particle") return Species::AlphaParticle;
  throw Error(ErrorCode::InvalidArgument, "unknown species '" + std::string(text) + "'");
}

SpeciesChargeRule SpeciesChargeRule::of(Species s) {
  return {s, s == Species::Deuteron ? 1 : 2};
}

Rational quantized_delta_alpha(std::int64_t n_a, std::int64_t n_b, const SpeciesChargeRule& rule) {
  if (rule.charge_multiple != 1 && rule.charge_multiple != 2) {
    throw Error(ErrorCode::RangeError, "charge multiple must be 1 or 2");
  }
  return Rational(rule.charge_multiple) * (Rational(n_b) - Rational(n_a)) * Rational(1, 2);
}

bool Rect::contains(Vec2 p, double tol) const noexcept {
  return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
}

bool Rect::interior_contains(Vec2 p) const noexcept {
  return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
}

bool Rect::interiors_overlap(const Rect& o) const noexcept {
  return std::max(x0, o.x0) < std::min(x1, o.x1) && std::max(y0, o.y0) < std::min(y1, o.y1);
}

gauge::Polyline Rect::outline() const {
  return gauge::Polyline{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, true};
}

namespace {

void overlap(const std::string& what) { throw Error(ErrorCode::GeometryOverlap, what); }

Vec2 snap_to_cell(Vec2 p, double h) {
  const Vec2 off = flux_cell_offset();
  return {(std::floor(p.x / h) + off.x) * h, (std::floor(p.y / h) + off.y) * h};
}

}  // namespace

ScenarioConfig build_noninterferometer(const NoninterferometerParams& prm) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::RangeError, std::string(name) + " must be > 0");
  };
  positive(prm.h, "grid.h");
  positive(prm.mass, "mass");
  positive(prm.wave_number, "wave_number");
  positive(prm.source_width_x, "source width_x");
  positive(prm.source_width_y, "source width_y");
  positive(prm.passage_length, "passage_length");
  positive(prm.slit_width, "slit_width");
  positive(prm.slit_separation, "slit_separation");
  positive(prm.detector_distance, "detector_distance");
  positive(prm.detector_length, "detector_length");
  positive(prm.wall_factor, "wall_factor");
  if (prm.chamber_wall < 0.0) throw Error(ErrorCode::RangeError, "chamber_wall must be >= 0");

  ScenarioConfig sc;
  sc.params = prm;
  sc.mode = prm.mode;
  sc.grid = Grid2D{prm.nx, prm.ny, prm.h, prm.h, {0.0, 0.0}};
  sc.grid.validate();
  const Grid2D& g = sc.grid;
  const double xmax = (g.nx - 1) * g.dx, ymax = (g.ny - 1) * g.dy;
  const double margin = prm.absorber_width * prm.h;
  sc.y_mid = (g.ny / 2) * g.dy;

  if (prm.slit_width >= prm.slit_separation) overlap("passages A and B overlap (slit_width >= slit_separation)");
  const double bx0 = prm.barrier_x, bx1 = prm.barrier_x + prm.passage_length;
  const double ya = sc.y_mid + 0.5 * prm.slit_separation, yb = sc.y_mid - 0.5 * prm.slit_separation;
  const double hw = 0.5 * prm.slit_width;
  sc.passage_a = Rect{"passage A", bx0, ya - hw, bx1, ya + hw};
  sc.passage_b = Rect{"passage B", bx0, yb - hw, bx1, yb + hw};
  sc.walls = {
      Rect{"collimator A", bx0, ya + hw, bx1, ymax},
      Rect{"splitter", bx0, yb + hw, bx1, ya - hw},
      Rect{"collimator B", bx0, 0.0, bx1, yb - hw},
  };
  sc.chamber_a = Rect{"chamber A", bx0, sc.y_mid, bx1, ya + hw + prm.chamber_wall};
  sc.chamber_b = Rect{"chamber B", bx0, yb - hw - prm.chamber_wall, bx1, sc.y_mid};
  if (sc.chamber_a.interiors_overlap(sc.chamber_b)) overlap("chambers A and B overlap");
  if (sc.chamber_a.y1 > ymax - margin || sc.chamber_b.y0 < margin) overlap("chambers reach the absorbing layer");
  if (bx0 < margin || bx1 > xmax - margin) overlap("wall slab outside the absorber-free region");

  // Source.
  const Vec2 src{prm.source_x, sc.y_mid};
  sc.source = evolve::GaussianSpec{src, prm.source_width_x, prm.source_width_y, {prm.wave_number, 0.0}, nullptr};
  for (const Rect* r : {&sc.chamber_a, &sc.chamber_b}) {
    if (r->contains(src, 0.0)) overlap("source inside " + r->name);
  }
  if (src.x + 4.0 * prm.source_width_x > bx0) overlap("source packet reaches the wall slab");
  if (src.x - 4.0 * prm.source_width_x < margin || src.y - 4.0 * prm.source_width_y < margin ||
      src.y + 4.0 * prm.source_width_y > ymax - margin) {
    overlap("source packet reaches the absorbing layer");
  }

  // Detector: vertical, from the A side to the B side.
  const double xd = bx1 + prm.detector_distance;
  const double half = 0.5 * prm.detector_length;
  sc.detector = evolve::Detector{{xd, sc.y_mid + half}, {xd, sc.y_mid - half}};
  if (xd > xmax - margin - prm.h) overlap("detector inside the absorbing layer");
  if (sc.y_mid + half > ymax - margin || sc.y_mid - half < margin) overlap("detector inside the absorbing layer");
  for (const Rect& r : sc.walls) {
    if (r.contains(sc.detector.start) || r.contains(sc.detector.end)) overlap("detector inside " + r.name);
  }
  for (const Rect* r : {&sc.chamber_a, &sc.chamber_b}) {
    if (r->contains(sc.detector.start) || r->contains(sc.detector.end)) overlap("detector inside " + r->name);
  }
  auto on_node = [&](double v, double h) { return std::abs(v / h - std::round(v / h)) < 1e-9; };
  if (!on_node(xd, g.dx) || !on_node(sc.y_mid + half, g.dy) || !on_node(sc.y_mid - half, g.dy)) {
    throw Error(ErrorCode::RangeError, "detector end points must fall on grid nodes");
  }

  // Flux lines.
  const double quarter = 0.25 * (prm.slit_separation - prm.slit_width);
  const Vec2 fa = prm.flux_a_center.value_or(snap_to_cell({0.5 * (bx0 + bx1), sc.y_mid + quarter}, prm.h));
  const Vec2 fb = prm.flux_b_center.value_or(snap_to_cell({0.5 * (bx0 + bx1), sc.y_mid - quarter}, prm.h));
  sc.flux_a = gauge::FluxLine{fa, prm.alpha_a.to_double()};
  sc.flux_b = gauge::FluxLine{fb, prm.alpha_b.to_double()};
  if (!sc.chamber_a.interior_contains(fa)) throw Error(ErrorCode::FluxOutsideChamber, "flux A is not inside chamber A");
  if (!sc.chamber_b.interior_contains(fb)) throw Error(ErrorCode::FluxOutsideChamber, "flux B is not inside chamber B");

  // Evolution defaults.
  evolve::EvolutionParams& ev = sc.evolution;
  ev.mass = prm.mass;
  ev.dt = prm.dt > 0.0 ? prm.dt : ev.stability_constant * prm.mass * prm.h * prm.h;
  ev.solver_tolerance = prm.solver_tolerance;
  ev.absorber.width_cells = prm.absorber_width;
  ev.absorber.strength = prm.absorber_strength > 0.0
                             ? prm.absorber_strength
                             : evolve::tune_absorber_strength(prm.wave_number, prm.mass, prm.h, prm.absorber_width);
  sc.wall_height = prm.wall_factor * prm.wave_number * prm.wave_number / (2.0 * prm.mass);
  if (prm.t_max > 0.0) {
    sc.t_max = prm.t_max;
  } else {
    const double vg = std::sin(prm.wave_number * prm.h) / (prm.mass * prm.h);
    if (!(vg > 0.0)) throw Error(ErrorCode::RangeError, "wave number beyond the lattice band edge");
    const double d = prm.detector_distance;
    const double path = (xd - src.x) + (std::hypot(d, half) - d) + 4.0 * prm.source_width_x;
    sc.t_max = std::ceil(1.1 * path / vg / ev.dt) * ev.dt;
  }
  ev.validate(g);

  if (prm.alpha_a == prm.alpha_b && prm.alpha_a != Rational(0)) sc.tags.push_back("standard AB control");
  return sc;
}

RealField wall_potential(const ScenarioConfig& sc, Block block) {
  RealField v(sc.grid, 0.0);
  std::vector<const Rect*> rects;
  for (const Rect& r : sc.walls) rects.push_back(&r);
  if (block == Block::PathA) rects.push_back(&sc.passage_a);
  if (block == Block::PathB) rects.push_back(&sc.passage_b);
  for (int j = 0; j < sc.grid.ny; ++j) {
    for (int i = 0; i < sc.grid.nx; ++i) {
      const Vec2 p = sc.grid.node(i, j);
      for (const Rect* r : rects) {
        if (r->contains(p)) {
          v.at(i, j) = sc.wall_height;
          break;
        }
      }
    }
  }
  return v;
}

ReferencePaths reference_paths(const ScenarioConfig& sc) {
  const Vec2 s = sc.source.center;
  const Vec2 d = 0.5 * (sc.detector.start + sc.detector.end);
  const double ya = 0.5 * (sc.passage_a.y0 + sc.passage_a.y1);
  const double yb = 0.5 * (sc.passage_b.y0 + sc.passage_b.y1);
  const double x0 = sc.passage_a.x0, x1 = sc.passage_a.x1;
  ReferencePaths p;
  p.path_a = {{s, {x0, ya}, {x1, ya}, d}, false};
  p.path_b = {{s, {x0, yb}, {x1, yb}, d}, false};
  p.midline = {{s, {x0, sc.y_mid}, {x1, sc.y_mid}, d}, false};
  p.loop_a = {{s, {x0, sc.y_mid}, {x1, sc.y_mid}, d, {x1, ya}, {x0, ya}}, true};
  p.loop_b = {{s, {x0, yb}, {x1, yb}, d, {x1, sc.y_mid}, {x0, sc.y_mid}}, true};
  return p;
}

evolve::DetectorResult run_job(const ScenarioConfig& sc, const JobKey& key, kernels::Backend backend,
                               ComplexField* final_state) {
  evolve::EvolutionParams params = sc.evolution;
  params.cfg = gauge::FluxConfig({gauge::FluxLine{sc.flux_a.center, key.alpha_a},
                                  gauge::FluxLine{sc.flux_b.center, key.alpha_b}});
  params.potential = wall_potential(sc, key.block);
  params.backend = backend;
  evolve::GaussianSpec src = sc.source;
  src.dress = &params.cfg;
  const ComplexField psi = evolve::init_gaussian(sc.grid, src);
  return evolve::run_to_detector(psi, params, sc.detector, sc.t_max, final_state);
}

bool is_near_integer(double v, double tolerance) noexcept {
  return std::abs(v - std::round(v)) <= tolerance;
}

std::vector<double> predict_superseparability(const std::vector<double>& path_a_profile,
                                              const std::vector<double>& path_b_profile,
                                              const std::vector<double>& coherent_profile,
                                              double delta_alpha, double integer_tolerance) {
  if (!std::isfinite(delta_alpha)) throw Error(ErrorCode::RangeError, "delta_alpha must be finite");
  if (is_near_integer(delta_alpha, integer_tolerance)) return coherent_profile;
  if (path_a_profile.size() != path_b_profile.size()) {
    throw Error(ErrorCode::InvalidArgument, "single-path profiles differ in length");
  }
  std::vector<double> out(path_a_profile.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = path_a_profile[k] + path_b_profile[k];
  return out;
}

double profile_overlap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "profiles differ in length");
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = std::max(a[k], 0.0), y = std::max(b[k], 0.0);
    sab += std::sqrt(x * y);
    sa += x;
    sb += y;
  }
  if (!(sa > 0.0) || !(sb > 0.0)) return 0.0;
  return sab / std::sqrt(sa * sb);
}

namespace {

void fill_diagnostics(FringeRecord& rec, const evolve::DetectorResult& r, const std::string& prefix) {
  rec.diagnostics[prefix + "conservation_defect"] = r.conservation_defect();
  rec.diagnostics[prefix + "segment_flux"] = r.segment_flux;
  rec.diagnostics[prefix + "final_norm"] = r.final_norm;
  rec.diagnostics[prefix + "absorbed_total"] = r.absorbed_total;
  rec.diagnostics[prefix + "max_solver_residual"] = r.max_residual;
}

void apply_fit(FringeRecord& rec, const FringeFitOptions& opt) {
  const FringeFit f = fringe_fit(rec.arclength, rec.profile, opt);
  rec.fitted_phase = f.phase;
  rec.visibility = f.visibility;
  rec.fit_residual = f.residual;
  rec.fringe_k = f.k;
  rec.fit_degenerate = f.degenerate;
}

}  // namespace

SweepResult sweep_delta_alpha(const ScenarioConfig& sc, const std::vector<double>& values,
                              const SweepOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::RangeError, "delta_alpha values must be finite");
  }
  if (options.workers < 1) throw Error(ErrorCode::RangeError, "workers must be >= 1");
  const double aa = sc.flux_a.alpha;
  const double tol = options.integer_tolerance;
  auto coherent_key = [&](double v) { return JobKey{aa, aa + v, Block::None}; };

  std::vector<JobKey> keys;
  SweepResult out;
  auto need = [&](const JobKey& k) {
    if (options.reuse != nullptr) {
      const auto it = options.reuse->find(k);
      if (it != options.reuse->end()) {
        out.jobs.emplace(k, it->second);
        return;
      }
    }
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  };
  for (double v : values) {
    if (sc.mode == Mode::StandardQM || is_near_integer(v, tol)) {
      need(coherent_key(v));
    } else {
      need(JobKey{aa, aa + v, Block::PathB});  // path A only
      need(JobKey{aa, aa + v, Block::PathA});  // path B only
      need(coherent_key(std::round(v)));
    }
  }

  // Jobs run concurrently; each result lands in its own slot.
  std::vector<evolve::DetectorResult> results(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(keys.size())));
  const kernels::Backend backend = workers > 1 ? kernels::Backend::Serial : kernels::Backend::OpenMP;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < keys.size(); k = next++) {
      try {
        results[k] = run_job(sc, keys[k], backend);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t k = 0; k < keys.size(); ++k) out.jobs.emplace(keys[k], std::move(results[k]));

  std::map<double, FringeFit> coherent_fits;
  auto coherent_fit = [&](double n) -> const FringeFit& {
    auto it = coherent_fits.find(n);
    if (it == coherent_fits.end()) {
      const auto& r = out.jobs.at(coherent_key(n));
      it = coherent_fits.emplace(n, fringe_fit(r.arclength, r.intensity, options.fit)).first;
    }
    return it->second;
  };

  for (double v : values) {
    FringeRecord rec;
    rec.delta_alpha = v;
    rec.mode = sc.mode;
    if (sc.mode == Mode::StandardQM || is_near_integer(v, tol)) {
      const auto& r = out.jobs.at(coherent_key(v));
      rec.arclength = r.arclength;
      rec.profile = r.intensity;
      apply_fit(rec, options.fit);
      fill_diagnostics(rec, r, "");
    } else {
      const auto& ra = out.jobs.at(JobKey{aa, aa + v, Block::PathB});
      const auto& rb = out.jobs.at(JobKey{aa, aa + v, Block::PathA});
      const auto& rc = out.jobs.at(coherent_key(std::round(v)));
      rec.arclength = ra.arclength;
      rec.profile = predict_superseparability(ra.intensity, rb.intensity, rc.intensity, v, tol);
      rec.coherent = false;
      FringeFitOptions opt = options.fit;
      opt.fixed_k = coherent_fit(std::round(v)).k;
      apply_fit(rec, opt);
      rec.diagnostics["overlap"] = profile_overlap(ra.intensity, rb.intensity);
      fill_diagnostics(rec, ra, "path_a_");
      fill_diagnostics(rec, rb, "path_b_");
    }
    out.records.push_back(std::move(rec));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ablab::experiment
