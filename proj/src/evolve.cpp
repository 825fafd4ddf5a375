#include "ablab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>

#include "ablab/errors.hpp"

namespace ablab::evolve {

namespace {

constexpr cplx kI{0.0, 1.0};

double gaussian_mass_fraction(double lo, double hi, double center, double sigma) {
  const double s = std::sqrt(2.0) * sigma;
  return 0.5 * (std::erf((hi - center) / s) - std::erf((lo - center) / s));
}

bool on_node(const Grid2D& g, Vec2 p, int& i, int& j) {
  const double u = (p.x - g.origin.x) / g.dx;
  const double v = (p.y - g.origin.y) / g.dy;
  i = static_cast<int>(std::lround(u));
  j = static_cast<int>(std::lround(v));
  return std::abs(u - i) < 1e-9 && std::abs(v - j) < 1e-9 && i >= 0 && j >= 0 && i < g.nx &&
         j < g.ny;
}

}  // namespace

RealField Absorber::profile(const Grid2D& grid) const {
  RealField w(grid, 0.0);
  if (!enabled()) return w;
  const double inv = 1.0 / width_cells;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      int depth = std::numeric_limits<int>::max();
      if (left) depth = std::min(depth, i);
      if (right) depth = std::min(depth, grid.nx - 1 - i);
      if (bottom) depth = std::min(depth, j);
      if (top) depth = std::min(depth, grid.ny - 1 - j);
      if (depth < width_cells) {
        const double r = (width_cells - depth) * inv;
        w.at(i, j) = strength * r * r * r * r;
      }
    }
  }
  return w;
}

double absorber_reflection(double k, double mass, double h, int width_cells, double strength) {
  const double t = 1.0 / (2.0 * mass * h * h);
  const double energy = 2.0 * t * (1.0 - std::cos(k * h));
  // Integrate the stationary equation leftwards from the Dirichlet edge, then
  // split the free-region solution into incoming and reflected waves.
  cplx right{0.0, 0.0};  // psi at the edge-adjacent ghost node
  cplx here{1.0, 0.0};   // psi at the outermost layer node
  for (int n = width_cells; n >= 1; --n) {
    const double r = static_cast<double>(n) / width_cells;
    const double w = strength * r * r * r * r;
    const cplx diag = cplx{2.0 * t - energy, -w};
    const cplx left = (diag * here - t * right) / t;
    right = here;
    here = left;
  }
  // `here` is the first free node (index 0), `right` is index 1.
  const cplx e = std::exp(kI * (k * h));
  const cplx a = (right - here / e) / (e - 1.0 / e);
  const cplx b = here - a;
  return std::norm(b) / std::norm(a);
}

double tune_absorber_strength(double k, double mass, double h, int width_cells) {
  const double t = 1.0 / (2.0 * mass * h * h);
  double best_log = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const double lo = std::log(1e-4 * t);
  const double hi = std::log(1e2 * t);
  constexpr int kScan = 400;
  for (int s = 0; s <= kScan; ++s) {
    const double lw = lo + (hi - lo) * s / kScan;
    const double r = absorber_reflection(k, mass, h, width_cells, std::exp(lw));
    if (r < best) {
      best = r;
      best_log = lw;
    }
  }
  // Golden-section refinement inside the neighbouring scan cells.
  const double step = (hi - lo) / kScan;
  double a = best_log - step;
  double b = best_log + step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double lw) { return absorber_reflection(k, mass, h, width_cells, std::exp(lw)); };
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double refined = 0.5 * (a + b);
  return f(refined) < best ? std::exp(refined) : std::exp(best_log);
}

void EvolutionParams::validate(const Grid2D& grid) const {
  grid.validate();
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(ErrorCode::RangeError, "mass must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::RangeError, "dt must be positive");
  if (!(stability_constant > 0.0)) {
    throw Error(ErrorCode::RangeError, "stability constant must be positive");
  }
  const double h = std::min(grid.dx, grid.dy);
  const double bound = stability_constant * mass * h * h;
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds c*m*h^2 = " << bound << " (c = " << stability_constant << ")";
    throw Error(ErrorCode::RangeError, msg.str());
  }
  if (!potential.values.empty()) {
    if (!(potential.grid == grid)) throw Error(ErrorCode::RangeError, "potential grid mismatch");
    for (double v : potential.values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::RangeError, "potential must be finite and non-negative");
      }
    }
  }
  if (!(absorber.strength >= 0.0) || !std::isfinite(absorber.strength)) {
    throw Error(ErrorCode::RangeError, "absorber strength must be >= 0 (absorbing)");
  }
  if (absorber.width_cells < 0) throw Error(ErrorCode::RangeError, "absorber width must be >= 0");
  if (!(solver_tolerance > 0.0)) throw Error(ErrorCode::RangeError, "solver tolerance must be > 0");
  if (max_iterations < 1) throw Error(ErrorCode::RangeError, "max_iterations must be >= 1");
}

ComplexField init_gaussian(const Grid2D& grid, const GaussianSpec& spec) {
  grid.validate();
  const double min_width = 3.0 * std::max(grid.dx, grid.dy);
  if (!(spec.width_x >= min_width) || !(spec.width_y >= min_width)) {
    throw Error(ErrorCode::PacketTooNarrow, "packet width below three grid cells");
  }
  const double xmax = grid.origin.x + (grid.nx - 1) * grid.dx;
  const double ymax = grid.origin.y + (grid.ny - 1) * grid.dy;
  const double inside =
      gaussian_mass_fraction(grid.origin.x, xmax, spec.center.x, spec.width_x) *
      gaussian_mass_fraction(grid.origin.y, ymax, spec.center.y, spec.width_y);
  if (!(inside > 1.0 - 1e-3)) {
    throw Error(ErrorCode::PacketOffGrid, "packet mass inside the grid is " + std::to_string(inside));
  }
  ComplexField psi(grid);
  const double ax = 1.0 / (4.0 * spec.width_x * spec.width_x);
  const double ay = 1.0 / (4.0 * spec.width_y * spec.width_y);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      const Vec2 r = p - spec.center;
      double phase = dot(spec.momentum, r);
      if (spec.dress != nullptr) phase -= gauge::segment_phase_unchecked(*spec.dress, spec.center, p);
      const double amp = std::exp(-ax * r.x * r.x - ay * r.y * r.y);
      psi.at(i, j) = amp * cplx{std::cos(phase), std::sin(phase)};
    }
  }
  const double n2 = psi.norm_squared();
  const double s = 1.0 / std::sqrt(n2);
  for (auto& v : psi.values) v *= s;
  return psi;
}

ComplexField init_gaussian(const Grid2D& grid, Vec2 center, double width, Vec2 momentum) {
  return init_gaussian(grid, GaussianSpec{center, width, width, momentum, nullptr});
}

cplx HamiltonianStencil::plaquette_holonomy(int i, int j) const {
  return link_x[grid.index(i, j)] * link_y[grid.index(i + 1, j)] *
         std::conj(link_x[grid.index(i, j + 1)]) * std::conj(link_y[grid.index(i, j)]);
}

HamiltonianStencil build_hamiltonian_stencil(const EvolutionParams& params, const Grid2D& grid) {
  params.validate(grid);
  for (const auto& line : params.cfg.lines()) {
    if (distance_to_grid_lines(grid, line.center) < params.cfg.singular_radius()) {
      std::ostringstream msg;
      msg << "flux at (" << line.center.x << "," << line.center.y
          << ") lies on a grid link; place it at a cell-centre offset";
      throw Error(ErrorCode::FluxOnLink, msg.str());
    }
  }
  HamiltonianStencil h;
  h.grid = grid;
  h.tx = 1.0 / (2.0 * params.mass * grid.dx * grid.dx);
  h.ty = 1.0 / (2.0 * params.mass * grid.dy * grid.dy);
  h.hermitian = !params.absorber.enabled();
  const std::size_t n = grid.size();
  h.diag.assign(n, cplx{2.0 * h.tx + 2.0 * h.ty, 0.0});
  h.link_x.assign(n, cplx{1.0, 0.0});
  h.link_y.assign(n, cplx{1.0, 0.0});
  const RealField w = params.absorber.profile(grid);
  const bool has_v = !params.potential.values.empty();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t p = grid.index(i, j);
      const double v = has_v ? params.potential.values[p] : 0.0;
      h.diag[p] += cplx{v, -w.values[p]};
      if (params.cfg.empty()) continue;
      const Vec2 a = grid.node(i, j);
      if (i + 1 < grid.nx) {
        const double th = gauge::segment_phase_unchecked(params.cfg, a, grid.node(i + 1, j));
        h.link_x[p] = cplx{std::cos(th), -std::sin(th)};
      }
      if (j + 1 < grid.ny) {
        const double th = gauge::segment_phase_unchecked(params.cfg, a, grid.node(i, j + 1));
        h.link_y[p] = cplx{std::cos(th), -std::sin(th)};
      }
    }
  }
  return h;
}

ComplexField apply_hamiltonian(const HamiltonianStencil& h, const ComplexField& psi,
                               kernels::Backend backend) {
  if (!(psi.grid == h.grid)) throw Error(ErrorCode::InvalidArgument, "field/stencil grid mismatch");
  ComplexField out(h.grid);
  kernels::apply_hamiltonian(backend, h.view(), psi.values, out.values);
  return out;
}

Propagator::Propagator(const EvolutionParams& params, const Grid2D& grid)
    : Propagator(build_hamiltonian_stencil(params, grid), params) {}

Propagator::Propagator(HamiltonianStencil stencil, const EvolutionParams& params)
    : stencil_(std::move(stencil)),
      dt_(params.dt),
      tau_(0.5 * params.dt),
      tolerance_(params.solver_tolerance),
      max_iterations_(params.max_iterations),
      solver_(params.solver),
      backend_(params.backend) {
  params.validate(stencil_.grid);
  init_buffers();
}

void Propagator::init_buffers() {
  const std::size_t n = stencil_.grid.size();
  da_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const cplx d = stencil_.diag[p];
    da_[p] = cplx{1.0 - tau_ * d.imag(), tau_ * d.real()};
  }
  b_.assign(n, cplx{});
  x_.assign(n, cplx{});
  x_next_.assign(n, cplx{});
  rows_.assign(static_cast<std::size_t>(stencil_.grid.ny), 0.0);
}

double Propagator::sum_rows(std::span<const double> rows) const {
  double s = 0.0;
  for (double r : rows) s += r;
  return s;
}

StepStats Propagator::advance(ComplexField& psi) {
  if (!(psi.grid == stencil_.grid)) {
    throw Error(ErrorCode::InvalidArgument, "field grid does not match the propagator");
  }
  const std::size_t n = psi.values.size();
  if (history_ > 0 &&
      std::memcmp(psi.values.data(), last_out_.data(), n * sizeof(cplx)) != 0) {
    history_ = 0;
  }
  const auto h = stencil_.view();
  kernels::cn_rhs(backend_, h, da_, tau_, psi.values, b_);
  kernels::row_norms(backend_, h.nx, h.ny, b_, rows_);
  const double bnorm = std::sqrt(sum_rows(rows_));

  StepStats stats;
  if (bnorm == 0.0) {
    std::fill(psi.values.begin(), psi.values.end(), cplx{});
    return stats;
  }

  const cplx* cur = psi.values.data();
  if (history_ >= 2) {
    for (std::size_t p = 0; p < n; ++p) x_[p] = 3.0 * (cur[p] - prev1_[p]) + prev2_[p];
  } else if (history_ == 1) {
    for (std::size_t p = 0; p < n; ++p) x_[p] = 2.0 * cur[p] - prev1_[p];
  } else {
    x_ = b_;
  }

  bool converged = false;
  for (int it = 1; it <= max_iterations_; ++it) {
    if (solver_ == Solver::Jacobi) {
      kernels::jacobi_sweep(backend_, h, da_, tau_, b_, x_, x_next_, rows_);
      x_.swap(x_next_);
    } else {
      // After the colour-0 half sweep only colour-1 equations carry residual,
      // which the colour-1 half sweep reports before removing it.
      kernels::red_black_sweep(backend_, h, da_, tau_, b_, x_, 0, rows_);
      kernels::red_black_sweep(backend_, h, da_, tau_, b_, x_, 1, rows_);
    }
    const double res = std::sqrt(sum_rows(rows_)) / bnorm;
    stats.iterations = it;
    stats.residual = res;
    if (!std::isfinite(res)) break;
    if (res <= tolerance_) {
      converged = true;
      break;
    }
  }
  total_iterations_ += stats.iterations;
  if (!converged) {
    std::ostringstream msg;
    msg << "implicit solve stopped at relative residual " << stats.residual << " after "
        << stats.iterations << " iterations";
    throw Error(ErrorCode::SolverDiverged, msg.str());
  }

  prev2_.swap(prev1_);
  prev1_.swap(psi.values);
  psi.values.swap(x_);
  if (x_.size() != n) x_.assign(n, cplx{});
  last_out_ = psi.values;
  history_ = std::min(history_ + 1, 2);
  return stats;
}

ComplexField step(const ComplexField& field, const EvolutionParams& params) {
  Propagator prop(params, field.grid);
  ComplexField out = field;
  prop.advance(out);
  return out;
}

DetectorResult run_to_detector(const ComplexField& initial, const EvolutionParams& params,
                               const Detector& detector, double t_max, ComplexField* final_state) {
  if (!(t_max > 0.0)) throw Error(ErrorCode::RangeError, "t_max must be positive");
  const Grid2D& g = initial.grid;
  int i0 = 0, j0 = 0, i1 = 0, j1 = 0;
  if (!on_node(g, detector.start, i0, j0) || !on_node(g, detector.end, i1, j1)) {
    throw Error(ErrorCode::RangeError, "detector end points must lie on grid nodes");
  }
  const bool vertical = i0 == i1;
  if (!vertical && j0 != j1) throw Error(ErrorCode::RangeError, "detector must follow a grid line");
  if (vertical && i0 + 1 >= g.nx) throw Error(ErrorCode::RangeError, "detector on the last column");
  if (!vertical && j0 + 1 >= g.ny) throw Error(ErrorCode::RangeError, "detector on the last row");

  Propagator prop(params, g);
  const auto& st = prop.stencil();

  // Nodes along the segment, in order from start to end.
  std::vector<std::size_t> seg_nodes;
  DetectorResult out;
  const int count = vertical ? std::abs(j1 - j0) + 1 : std::abs(i1 - i0) + 1;
  const int dir = vertical ? (j1 >= j0 ? 1 : -1) : (i1 >= i0 ? 1 : -1);
  for (int s = 0; s < count; ++s) {
    const int i = vertical ? i0 : i0 + dir * s;
    const int j = vertical ? j0 + dir * s : j0;
    seg_nodes.push_back(g.index(i, j));
    out.arclength.push_back(norm(g.node(i, j) - detector.start));
  }
  std::vector<std::size_t> line_nodes;
  if (vertical) {
    for (int j = 0; j < g.ny; ++j) line_nodes.push_back(g.index(i0, j));
  } else {
    for (int i = 0; i < g.nx; ++i) line_nodes.push_back(g.index(i, j0));
  }
  const std::size_t hop = vertical ? 1 : static_cast<std::size_t>(g.nx);
  const double t_hop = vertical ? st.tx : st.ty;
  const std::vector<cplx>& links = vertical ? st.link_x : st.link_y;
  auto upstream = [&](int i, int j) { return vertical ? i <= i0 : j <= j0; };

  std::vector<std::size_t> absorb_up, absorb_down;
  std::vector<double> weight_up, weight_down;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t p = g.index(i, j);
      const double w = -st.diag[p].imag();
      if (w > 0.0) {
        (upstream(i, j) ? absorb_up : absorb_down).push_back(p);
        (upstream(i, j) ? weight_up : weight_down).push_back(2.0 * w * g.cell_area());
      }
    }
  }
  auto upstream_norm = [&](const ComplexField& f) {
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (upstream(i, j)) s += std::norm(f.at(i, j));
    return s * g.cell_area();
  };

  ComplexField psi = initial;
  out.initial_norm = psi.norm_squared();
  out.initial_upstream_norm = upstream_norm(psi);
  const double dt = params.dt;
  const int steps = static_cast<int>(std::ceil(t_max / dt - 1e-9));
  std::vector<double> seg_acc(seg_nodes.size(), 0.0);
  std::vector<cplx> old(psi.values.size());

  auto midpoint = [&](std::size_t p) { return 0.5 * (old[p] + psi.values[p]); };
  auto link_current = [&](std::size_t p) {
    const cplx a = midpoint(p);
    const cplx b = midpoint(p + hop);
    return 2.0 * t_hop * (std::conj(a) * std::conj(links[p]) * b).imag() * g.cell_area();
  };

  for (int n = 0; n < steps; ++n) {
    std::copy(psi.values.begin(), psi.values.end(), old.begin());
    const StepStats stats = prop.advance(psi);
    out.max_residual = std::max(out.max_residual, stats.residual);
    for (std::size_t s = 0; s < seg_nodes.size(); ++s) seg_acc[s] += dt * link_current(seg_nodes[s]);
    double line = 0.0;
    for (std::size_t p : line_nodes) line += link_current(p);
    out.line_flux += dt * line;
    double up = 0.0;
    for (std::size_t k = 0; k < absorb_up.size(); ++k) {
      up += weight_up[k] * std::norm(midpoint(absorb_up[k]));
    }
    double down = 0.0;
    for (std::size_t k = 0; k < absorb_down.size(); ++k) {
      down += weight_down[k] * std::norm(midpoint(absorb_down[k]));
    }
    out.absorbed_upstream += dt * up;
    out.absorbed_total += dt * (up + down);
  }
  const double spacing = vertical ? g.dy : g.dx;
  out.intensity.resize(seg_acc.size());
  for (std::size_t s = 0; s < seg_acc.size(); ++s) {
    out.intensity[s] = seg_acc[s] / spacing;
    out.segment_flux += seg_acc[s];
  }
  out.final_norm = psi.norm_squared();
  out.final_upstream_norm = upstream_norm(psi);
  out.steps = steps;
  out.solver_iterations = prop.total_iterations();
  if (final_state) *final_state = std::move(psi);
  return out;
}

}  // namespace ablab::evolve
