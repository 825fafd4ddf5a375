#include "ablab/run.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ablab/eigen.hpp"
#include "ablab/errors.hpp"
#include "ablab/gauge.hpp"
#include "ablab/weyl.hpp"

namespace ablab::cli {

using nlohmann::ordered_json;

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Holonomy: return "holonomy";
    case Command::Commutator: return "commutator";
    case Command::Evolve: return "evolve";
    case Command::Sweep: return "sweep";
    case Command::EigenCheck: return "eigen-check";
    case Command::Quantize: return "quantize";
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::Holonomy, Command::Commutator, Command::Evolve, Command::Sweep,
                    Command::EigenCheck, Command::Quantize}) {
    if (text == to_string(c)) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + std::string(text) + "'");
}

config::Config load_config(const RunManifest& m) {
  config::Config c = config::parse_config(m.config_path.empty() ? std::string{} : io::read_text_file(m.config_path));
  if (m.config_path.empty()) c.log.insert(c.log.begin(), "no config file: built-in defaults");
  if (m.seed) {
    c.sweep.seed = *m.seed;
    c.log.push_back("override: [sweep].seed = " + std::to_string(*m.seed));
  }
  if (m.worker_count) {
    if (*m.worker_count < 1) throw Error(ErrorCode::RangeError, "--workers must be >= 1");
    c.sweep.workers = *m.worker_count;
    c.log.push_back("override: [sweep].workers = " + std::to_string(*m.worker_count));
  }
  if (m.mode && *m.mode != "both") {
    c.sweep.mode = experiment::parse_mode(*m.mode);
    c.log.push_back("override: [sweep].mode = " + *m.mode);
  }
  if (m.delta_alpha_list) {
    // reuse the config reader so rationals stay exact and floats warn
    config::Config tmp = config::parse_config("[sweep]\ndelta_alpha = " + *m.delta_alpha_list + "\n");
    c.sweep.delta_alpha = tmp.sweep.delta_alpha;
    for (const auto& line : tmp.log) {
      if (line.rfind("warning", 0) == 0) c.log.push_back(line + " (from --delta-alpha-list)");
    }
    c.log.push_back("override: [sweep].delta_alpha = " + *m.delta_alpha_list);
  }
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::pair<std::string, std::string>> meta(Command cmd, std::uint64_t seed) {
  return {{"ablab", std::string(io::kVersion)}, {"command", std::string(to_string(cmd))},
          {"seed", std::to_string(seed)}};
}

ordered_json header_json(const RunManifest& m, const config::Config& c) {
  ordered_json j;
  j["software"] = "ablab";
  j["version"] = io::kVersion;
  j["command"] = to_string(m.command);
  j["seed"] = c.sweep.seed;
  j["workers"] = c.sweep.workers;
  j["config_path"] = m.config_path.string();
  j["config"] = config::emit_config(c);
  return j;
}

std::string run_log(const RunManifest& m, const config::Config& c, const std::vector<std::string>& notes) {
  std::ostringstream o;
  o << "ablab " << io::kVersion << " " << to_string(m.command) << "\n"
    << "seed = " << c.sweep.seed << "\n"
    << "workers = " << c.sweep.workers << "\n";
  for (const auto& line : c.log) o << line << "\n";
  for (const auto& line : notes) o << line << "\n";
  o << "---- config echo ----\n" << config::emit_config(c);
  return o.str();
}

// "1/4" -> "1_4" for file names
std::string file_label(std::string s) {
  for (char& ch : s) {
    if (ch == '/') ch = '_';
  }
  return s;
}

struct Context {
  const RunManifest& m;
  config::Config c;
  RunResult& r;
  std::vector<std::string> notes;  // timings and diagnostics for the run log
  ordered_json summary;
};

void do_holonomy(Context& x) {
  const auto& c = x.c;
  std::vector<gauge::HolonomyCase> cases;
  if (!c.paths.empty()) {
    const gauge::FluxConfig cfg = c.flux_config();
    for (const auto& p : c.paths) cases.push_back({cfg, gauge::Polyline{p.vertices, p.closed}});
  } else {
    cases = gauge::random_holonomy_cases(100, c.sweep.seed);
    x.notes.push_back("no [path] sections: 100 random closed polylines from the seed");
  }
  io::CsvTable t({"path[1]", "vertices[1]", "closed", "fluxes[1]", "phase[rad]", "phase_winding[rad]",
                  "discrepancy[rad]", "windings[1]"});
  t.set_meta(meta(x.m.command, c.sweep.seed));
  double worst = 0.0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& hc = cases[k];
    const double phase = gauge::line_integral_phase(hc.cfg, hc.path, c.gauge.quadrature_step);
    std::string wind_text = "", wind_phase = "nan", disc = "nan";
    if (hc.path.closed) {
      for (const auto& f : hc.cfg.lines()) {
        if (!wind_text.empty()) wind_text += ";";
        wind_text += std::to_string(gauge::winding_number(hc.path, f.center));
      }
      const double w = gauge::holonomy_from_winding(hc.cfg, hc.path);
      wind_phase = io::num(w);
      disc = io::num(std::abs(phase - w));
      worst = std::max(worst, std::abs(phase - w));
    }
    t.add_row({std::to_string(k), std::to_string(hc.path.vertices.size()), hc.path.closed ? "1" : "0",
               std::to_string(hc.cfg.lines().size()), io::num(phase), wind_phase, disc, wind_text});
  }
  x.r.outputs.add_text("holonomy.csv", t.str());
  x.summary["paths"] = cases.size();
  x.summary["max_discrepancy_rad"] = worst;
  x.r.stdout_text = "holonomy: " + std::to_string(cases.size()) + " paths, max discrepancy " + io::num(worst) + " rad\n";
}

void do_commutator(Context& x) {
  const auto& s = x.c.commutator;
  std::vector<weyl::CommutatorCase> cases = s.cases;
  if (s.random_cases > 0) {
    const auto extra = weyl::random_commutator_cases(s.random_cases, x.c.sweep.seed, 0.25);
    cases.insert(cases.end(), extra.begin(), extra.end());
  }
  std::vector<double> alphas;
  for (const auto& a : s.alpha) alphas.push_back(a.value);
  const Grid2D grid = weyl::commutator_grid(s.n, s.h);
  const auto t0 = Clock::now();
  const auto rows = weyl::commutator_sweep(alphas, cases, grid, s.probe_width);
  const double secs = seconds_since(t0);
  io::CsvTable t = io::weyl_sweep_table(rows);
  t.set_meta(meta(x.m.command, x.c.sweep.seed));
  x.r.outputs.add_text("commutator.csv", t.str());

  double worst = 0.0, min_mod = 1.0;
  int failed = 0;
  for (const auto& row : rows) {
    if (!row.ok()) {
      ++failed;
      continue;
    }
    worst = std::max(worst, row.discrepancy);
    min_mod = std::min(min_mod, row.modulus);
  }
  x.summary["cases"] = cases.size();
  x.summary["rows"] = rows.size();
  x.summary["failed_rows"] = failed;
  x.summary["max_discrepancy_rad"] = worst;
  x.summary["min_probe_overlap_modulus"] = min_mod;
  x.summary["all_below_1e-6"] = failed == 0 && worst < 1e-6;
  x.summary["seconds"] = secs;
  x.notes.push_back("commutator sweep: " + io::num(secs) + " s, min probe overlap modulus " + io::num(min_mod));
  std::ostringstream o;
  o << "commutator: " << rows.size() << " rows, " << failed << " failed, max discrepancy " << io::num(worst)
    << " rad\n";
  x.r.stdout_text = o.str();
}

ordered_json detector_json(const evolve::DetectorResult& d) {
  ordered_json j;
  j["steps"] = d.steps;
  j["solver_iterations"] = d.solver_iterations;
  j["max_solver_residual"] = d.max_residual;
  j["initial_norm"] = d.initial_norm;
  j["final_norm"] = d.final_norm;
  j["segment_flux"] = d.segment_flux;
  j["line_flux"] = d.line_flux;
  j["absorbed_total"] = d.absorbed_total;
  j["absorbed_upstream"] = d.absorbed_upstream;
  j["conservation_defect"] = d.conservation_defect();
  return j;
}

void do_evolve(Context& x) {
  const auto sc = experiment::build_noninterferometer(x.c.scenario_params());
  const experiment::JobKey key{sc.flux_a.alpha, sc.flux_b.alpha, experiment::Block::None};
  evolve::EvolutionParams params = sc.evolution;
  params.cfg = gauge::FluxConfig({sc.flux_a, sc.flux_b});
  evolve::GaussianSpec src = sc.source;
  src.dress = &params.cfg;
  x.r.outputs.add_snapshot("snapshot_initial", io::make_snapshot(evolve::init_gaussian(sc.grid, src), 0.0, "initial"));

  const auto t0 = Clock::now();
  ComplexField final_state;
  const auto d = experiment::run_job(sc, key, kernels::Backend::OpenMP, &final_state);
  const double secs = seconds_since(t0);
  x.r.outputs.add_snapshot("snapshot_final", io::make_snapshot(final_state, sc.t_max, "final"));
  io::CsvTable t = io::detector_profile_table(d.arclength, d.intensity);
  t.set_meta(meta(x.m.command, x.c.sweep.seed));
  x.r.outputs.add_text("detector_profile.csv", t.str());

  x.summary["alpha_a"] = sc.flux_a.alpha;
  x.summary["alpha_b"] = sc.flux_b.alpha;
  x.summary["t_max"] = sc.t_max;
  x.summary["dt"] = sc.evolution.dt;
  x.summary["tags"] = sc.tags;
  x.summary["detector"] = detector_json(d);
  x.summary["seconds"] = secs;
  x.notes.push_back("evolve: " + io::num(secs) + " s, absorbed " + io::num(d.absorbed_total) +
                    ", conservation defect " + io::num(d.conservation_defect()));
  x.r.stdout_text = "evolve: " + std::to_string(d.steps) + " steps, detector flux " + io::num(d.segment_flux) + "\n";
}

ordered_json records_json(const std::vector<experiment::FringeRecord>& recs, const std::vector<std::string>& labels) {
  ordered_json arr = ordered_json::array();
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    ordered_json j;
    j["delta_alpha"] = labels[k];
    j["fitted_phase"] = r.fitted_phase;
    j["visibility"] = r.visibility;
    j["fit_residual"] = r.fit_residual;
    j["fringe_k"] = r.fringe_k;
    j["fit_degenerate"] = r.fit_degenerate;
    j["coherent"] = r.coherent;
    ordered_json diag;
    for (const auto& [name, v] : r.diagnostics) diag[name] = v;
    j["diagnostics"] = diag;
    arr.push_back(j);
  }
  return arr;
}

void do_sweep(Context& x) {
  const auto& s = x.c.sweep;
  std::vector<experiment::Mode> modes;
  if (x.m.mode && *x.m.mode == "both") modes = {experiment::Mode::StandardQM, experiment::Mode::Superseparability};
  else modes = {s.mode};
  std::vector<double> values;
  std::vector<std::string> labels;
  for (const auto& a : s.delta_alpha) {
    values.push_back(a.value);
    labels.push_back(a.str());
  }
  experiment::SweepOptions opt;
  opt.workers = s.workers;
  opt.integer_tolerance = s.integer_tolerance;
  std::map<experiment::JobKey, evolve::DetectorResult> done;
  ordered_json per_mode = ordered_json::object();
  std::ostringstream out;
  for (const auto mode : modes) {
    auto params = x.c.scenario_params();
    params.mode = mode;
    const auto sc = experiment::build_noninterferometer(params);
    opt.reuse = &done;
    const auto res = experiment::sweep_delta_alpha(sc, values, opt);
    for (const auto& [k, v] : res.jobs) done.emplace(k, v);
    for (auto& [name, text] : render_sweep_csvs(res.records, labels, s.seed)) {
      x.r.outputs.add_text(name, std::move(text));
    }
    const std::string m(experiment::to_string(mode));
    ordered_json j = header_json(x.m, x.c);
    j["mode"] = m;
    j["tags"] = sc.tags;
    j["alpha_a"] = sc.flux_a.alpha;
    j["records"] = records_json(res.records, labels);
    j["jobs"] = res.jobs.size();
    j["seconds"] = res.seconds;
    x.r.outputs.add_text("summary_" + m + ".json", j.dump(2) + "\n");
    per_mode[m] = "summary_" + m + ".json";
    x.notes.push_back("sweep " + m + ": " + std::to_string(res.jobs.size()) + " jobs, " + io::num(res.seconds) + " s");
    for (std::size_t k = 0; k < res.records.size(); ++k) {
      const auto& r = res.records[k];
      out << m << " delta_alpha=" << labels[k] << " phase=" << io::num(r.fitted_phase)
          << " visibility=" << io::num(r.visibility) << "\n";
    }
  }
  x.summary["summaries"] = per_mode;
  x.r.stdout_text = out.str();
}

void do_eigen(Context& x) {
  const auto& e = x.c.eigen;
  const auto spec = x.c.eigen_spec();
  io::CsvTable t({"points_per_unit[1/len]", "h[len]", "residual[1]", "ratio[1]"});
  t.set_meta(meta(x.m.command, x.c.sweep.seed));
  double prev = 0.0;
  ordered_json ladder = ordered_json::array();
  for (int n : e.ladder) {
    const double h = 1.0 / n;
    const int nx = static_cast<int>(std::lround((e.x_max - e.x_min) * n)) + 1;
    const Grid2D g{nx, e.rows, h, e.dy, {e.x_min, e.y_min}};
    const double res = eigen::residual_check(eigen::sample_eigen_solution(spec, g), spec.alpha, spec.lambda);
    const double ratio = prev > 0.0 ? prev / res : std::nan("");
    t.add_row({std::to_string(n), io::num(h), io::num(res), prev > 0.0 ? io::num(ratio) : "nan"});
    ladder.push_back({{"points_per_unit", n}, {"residual", res}});
    prev = res;
  }
  x.r.outputs.add_text("eigen_residuals.csv", t.str());
  x.summary["ladder"] = ladder;
  if (spec.lambda.imag() == 0.0 && e.amplitude != 0.0) {
    const int n = e.ladder.empty() ? 64 : e.ladder.front();
    const int nx = static_cast<int>(std::lround((e.x_max - e.x_min) * n)) + 1;
    const auto w = eigen::compact_support_witness(spec, Grid2D{nx, e.rows, 1.0 / n, e.dy, {e.x_min, e.y_min}});
    x.summary["witness"] = w.witness;
    x.summary["witness_deviation"] = w.deviation;
    x.summary["witness_report"] = w.report;
  }
  std::ostringstream o;
  o << "eigen-check: " << e.ladder.size() << " resolutions, finest residual " << io::num(prev) << "\n";
  x.r.stdout_text = o.str();
}

void do_quantize(Context& x) {
  const auto species = experiment::parse_species(x.m.species.value_or("deuteron"));
  if (!x.m.n_a || !x.m.n_b) throw Error(ErrorCode::InvalidArgument, "quantize needs --n-a and --n-b");
  const auto rule = experiment::SpeciesChargeRule::of(species);
  const Rational da = experiment::quantized_delta_alpha(*x.m.n_a, *x.m.n_b, rule);
  x.summary["species"] = experiment::to_string(species);
  x.summary["n_a"] = *x.m.n_a;
  x.summary["n_b"] = *x.m.n_b;
  x.summary["delta_alpha"] = da.str();
  x.summary["integer"] = da.is_integer();
  x.r.stdout_text = da.str() + "\n";
}

std::string error_document(const RunManifest& m, std::string_view code, const std::string& message) {
  ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  j["command"] = to_string(m.command);
  j["version"] = io::kVersion;
  return j.dump(2) + "\n";
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_sweep_csvs(
    const std::vector<experiment::FringeRecord>& records, const std::vector<std::string>& labels,
    std::uint64_t seed) {
  if (records.size() != labels.size()) throw Error(ErrorCode::InvalidArgument, "one label per record");
  std::vector<std::pair<std::string, std::string>> out;
  if (records.empty()) return out;
  const std::string m(experiment::to_string(records.front().mode));
  io::CsvTable t = io::fringe_sweep_table(records);
  t.set_meta(meta(Command::Sweep, seed));
  out.emplace_back("sweep_" + m + ".csv", t.str());
  for (std::size_t k = 0; k < records.size(); ++k) {
    io::CsvTable p = io::detector_profile_table(records[k].arclength, records[k].profile);
    auto mm = meta(Command::Sweep, seed);
    mm.emplace_back("delta_alpha", labels[k]);
    p.set_meta(std::move(mm));
    out.emplace_back("profiles/" + m + "/profile_" + std::to_string(k) + "_da_" + file_label(labels[k]) + ".csv",
                     p.str());
  }
  return out;
}

RunResult run(const RunManifest& m) {
  RunResult r;
  const auto t0 = Clock::now();
  try {
    Context x{m, load_config(m), r, {}, {}};
    if (m.output_dir.empty() && m.command != Command::Quantize) {
      throw Error(ErrorCode::InvalidArgument, "--out is required for " + std::string(to_string(m.command)));
    }
    x.summary = header_json(m, x.c);
    switch (m.command) {
      case Command::Holonomy: do_holonomy(x); break;
      case Command::Commutator: do_commutator(x); break;
      case Command::Evolve: do_evolve(x); break;
      case Command::Sweep: do_sweep(x); break;
      case Command::EigenCheck: do_eigen(x); break;
      case Command::Quantize: do_quantize(x); break;
    }
    x.summary["seconds_total"] = seconds_since(t0);
    x.notes.push_back("total " + io::num(seconds_since(t0)) + " s");
    r.outputs.add_text("summary.json", x.summary.dump(2) + "\n");
    r.outputs.add_text("run.log", run_log(m, x.c, x.notes));
    if (!m.output_dir.empty()) r.outputs.write_all(m.output_dir);
  } catch (const Error& e) {
    r.exit_code = 1;
    r.error_json = error_document(m, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    r.exit_code = 1;
    r.error_json = error_document(m, "InternalError", e.what());
  }
  if (r.exit_code != 0 && !m.output_dir.empty()) {
    try {
      io::OutputSet err;
      err.add_text("error.json", r.error_json);
      err.write_all(m.output_dir);
    } catch (const Error&) {
      // directory unusable; the document still goes to stderr
    }
  }
  return r;
}

}  // namespace ablab::cli
