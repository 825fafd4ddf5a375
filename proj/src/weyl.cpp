#include "ablab/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <sstream>

#include "ablab/errors.hpp"
#include "ablab/evolve.hpp"

namespace ablab::weyl {

namespace {

int cells_of(double displacement, double spacing) {
  const double q = displacement / spacing;
  const double n = std::round(q);
  if (!std::isfinite(q) || std::abs(q - n) > 1e-9 * std::max(1.0, std::abs(q))) {
    std::ostringstream msg;
    msg << "displacement " << displacement << " is not a multiple of the spacing " << spacing;
    throw Error(ErrorCode::NotGridMultiple, msg.str());
  }
  return static_cast<int>(n);
}

void require_segments_clear(const Grid2D& g, const gauge::FluxConfig& cfg, int di, int dj) {
  if (di == 0 && dj == 0) return;
  const double r = cfg.singular_radius();
  for (const auto& line : cfg.lines()) {
    const Vec2 c = line.center;
    // Segments run along grid lines; only lines closer than r can matter.
    if (dj == 0) {
      for (int j = 0; j < g.ny; ++j) {
        if (std::abs(g.node(0, j).y - c.y) >= r) continue;
        for (int i = std::max(0, -di); i < g.nx && i + di < g.nx; ++i) {
          if (distance_to_segment(c, g.node(i, j), g.node(i + di, j)) < r) {
            throw Error(ErrorCode::SegmentThroughFlux, "x translation segment meets a flux line");
          }
        }
      }
    } else {
      for (int i = 0; i < g.nx; ++i) {
        if (std::abs(g.node(i, 0).x - c.x) >= r) continue;
        for (int j = std::max(0, -dj); j < g.ny && j + dj < g.ny; ++j) {
          if (distance_to_segment(c, g.node(i, j), g.node(i, j + dj)) < r) {
            throw Error(ErrorCode::SegmentThroughFlux, "y translation segment meets a flux line");
          }
        }
      }
    }
  }
}

gauge::FluxConfig origin_flux(double alpha) {
  return gauge::FluxConfig({gauge::FluxLine{{0.0, 0.0}, alpha}});
}

}  // namespace

ComplexField apply_magnetic_translation(const ComplexField& field, const MagneticTranslation& t,
                                        kernels::Backend backend) {
  const Grid2D& g = field.grid;
  g.validate();
  int di = 0, dj = 0;
  if (t.axis == Axis::X) di = cells_of(t.displacement, g.dx);
  else dj = cells_of(t.displacement, g.dy);
  require_segments_clear(g, t.cfg, di, dj);
  ComplexField out(g);
  kernels::magnetic_shift(backend, g, t.cfg, di, dj, field.values, out.values);
  return out;
}

int epsilon(double t, double tolerance) {
  if (!(std::abs(t) > tolerance)) {
    throw Error(ErrorCode::OnAxis, "epsilon argument " + std::to_string(t) + " is on the axis");
  }
  return t > 0.0 ? 1 : -1;
}

int epsilon_product(const CommutatorCase& c, double tolerance) {
  const int ex = epsilon(c.x, tolerance) - epsilon(c.x + c.a, tolerance);
  const int ey = epsilon(c.y, tolerance) - epsilon(c.y - c.b, tolerance);
  return ex * ey;
}

cplx commutator_phase_closed_form(const CommutatorCase& c, double tolerance) {
  const int n = epsilon_product(c, tolerance);
  if (n == 0) return {1.0, 0.0};
  return std::polar(1.0, std::numbers::pi * c.alpha / 2.0 * n);
}

gauge::Polyline commutator_rectangle(const CommutatorCase& c) {
  return gauge::Polyline{{{c.x, c.y}, {c.x + c.a, c.y}, {c.x + c.a, c.y - c.b}, {c.x, c.y - c.b}},
                         true};
}

int commutator_winding(const CommutatorCase& c) {
  return gauge::winding_number(commutator_rectangle(c), {0.0, 0.0});
}

double default_probe_width(const CommutatorCase& c) {
  const double d = std::min({std::abs(c.x), std::abs(c.x + c.a), std::abs(c.y), std::abs(c.y - c.b)});
  return d / 8.0;
}

Grid2D commutator_grid(int n, double h) {
  return grid_with_flux_in_cell(n, n, h, h, {0.0, 0.0}, n / 2 - 1, n / 2 - 1);
}

EmpiricalPhase commutator_phase_empirical(const CommutatorCase& c, double probe_width,
                                          const Grid2D& grid, kernels::Backend backend) {
  const gauge::FluxConfig cfg = origin_flux(c.alpha);
  const int sx = epsilon(c.x, 1e-12), sxa = epsilon(c.x + c.a, 1e-12);
  const int sy = epsilon(c.y, 1e-12), syb = epsilon(c.y - c.b, 1e-12);

  const ComplexField psi = evolve::init_gaussian(grid, {c.x, c.y}, probe_width, {0.0, 0.0});
  double inside = 0.0, total = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      const double m = std::norm(psi.at(i, j));
      total += m;
      const bool same = (p.x > 0) == (sx > 0) && (p.x + c.a > 0) == (sxa > 0) &&
                        (p.y > 0) == (sy > 0) && (p.y - c.b > 0) == (syb > 0);
      if (same) inside += m;
    }
  }
  EmpiricalPhase out;
  out.support_mass = inside / total;
  if (!(out.support_mass >= 1.0 - 1e-6)) {
    std::ostringstream msg;
    msg << "probe mass in the admissible cell is " << out.support_mass;
    throw Error(ErrorCode::ProbeStraddlesAxis, msg.str());
  }

  const MagneticTranslation vx{Axis::X, c.a, cfg};
  const MagneticTranslation vx_inv{Axis::X, -c.a, cfg};
  const MagneticTranslation vy{Axis::Y, -c.b, cfg};
  const MagneticTranslation vy_inv{Axis::Y, c.b, cfg};
  ComplexField w = apply_magnetic_translation(psi, vy_inv, backend);
  w = apply_magnetic_translation(w, vx_inv, backend);
  w = apply_magnetic_translation(w, vy, backend);
  w = apply_magnetic_translation(w, vx, backend);
  const cplx z = inner_product(psi, w) / psi.norm_squared();
  out.modulus = std::abs(z);
  if (!(out.modulus > 0.0)) throw Error(ErrorCode::ProbeStraddlesAxis, "probe left the grid");
  out.phase = z / out.modulus;
  return out;
}

namespace {

bool in_window(double v) { return std::abs(v) >= 1.0 && std::abs(v) <= 4.0; }

}  // namespace

std::vector<CommutatorCase> default_commutator_cases() {
  // (x, a) and (y, b) pairs with both ends between 1 and 5 from the axis, half
  // of them straddling it.
  const std::pair<double, double> xa[] = {{1.5, -3.0},  {-2.5, 4.0}, {1.25, 1.5}, {-1.75, -2.0},
                                          {2.5, -3.75}, {-1.0, 3.25}, {3.0, 1.75}, {-3.25, 2.0}};
  const std::pair<double, double> yb[] = {{1.25, 2.5}, {-1.5, -3.0}, {2.0, -1.5},  {-2.75, 1.25},
                                          {1.0, -2.25}, {-1.25, -3.5}, {3.5, 2.0}, {-2.0, -3.5}};
  std::vector<CommutatorCase> out;
  for (const auto& [x, a] : xa)
    for (const auto& [y, b] : yb) out.push_back({x, y, a, b, 0.0});
  return out;
}

std::vector<CommutatorCase> random_commutator_cases(int count, std::uint64_t seed, double step) {
  if (count < 0 || !(step > 0.0)) throw Error(ErrorCode::RangeError, "bad random case request");
  std::mt19937_64 rng(seed);
  const int span = static_cast<int>(std::floor(4.0 / step));
  std::uniform_int_distribution<int> coord(-span, span);
  std::uniform_int_distribution<int> disp(-2 * span, 2 * span);
  std::vector<CommutatorCase> out;
  while (static_cast<int>(out.size()) < count) {
    const CommutatorCase c{coord(rng) * step, coord(rng) * step, disp(rng) * step, disp(rng) * step, 0.0};
    if (in_window(c.x) && in_window(c.y) && in_window(c.x + c.a) && in_window(c.y - c.b)) out.push_back(c);
  }
  return out;
}

std::vector<SweepRow> commutator_sweep(const std::vector<double>& alpha_list,
                                       const std::vector<CommutatorCase>& case_list,
                                       const Grid2D& grid, double probe_width,
                                       double min_modulus) {
  std::vector<SweepRow> rows;
  rows.reserve(alpha_list.size() * case_list.size());
  for (double alpha : alpha_list) {
    for (CommutatorCase c : case_list) {
      c.alpha = alpha;
      SweepRow row;
      row.c = c;
      try {
        row.closed_form = commutator_phase_closed_form(c);
        row.winding = commutator_winding(c);
        const double width = probe_width > 0.0 ? probe_width : default_probe_width(c);
        const EmpiricalPhase e = commutator_phase_empirical(c, width, grid);
        row.empirical = e.phase;
        row.modulus = e.modulus;
        row.discrepancy = std::abs(std::arg(e.phase * std::conj(*row.closed_form)));
        if (!(e.modulus >= min_modulus)) {
          std::ostringstream msg;
          msg << "probe overlap modulus " << e.modulus << " below " << min_modulus;
          row.error = msg.str();
        }
      } catch (const Error& err) {
        row.error = err.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ablab::weyl
