#pragma once

// Gauge-covariant wavepacket propagation on a node grid (hbar = 1).
//
//   H = (1/2m) (-i grad + a)^2 + V - i W
//
// discretised with a five-point stencil whose hops carry exact Peierls phases
// (the subtended-angle integrals of the gauge module), a real wall potential V
// and a complex absorbing potential W >= 0. Time stepping is Crank-Nicolson,
// with the implicit system solved by red-black Gauss-Seidel (or Jacobi)
// iteration.

#include <cstdint>
#include <vector>

#include "ablab/field.hpp"
#include "ablab/gauge.hpp"
#include "ablab/kernels.hpp"

namespace ablab::evolve {

/// Quartic complex absorbing ramp along the selected grid edges. Node k cells
/// in from an edge (k = 0 on the edge) gets W = strength * ((width - k)/width)^4
/// while k < width.
struct Absorber {
  int width_cells{12};
  double strength{0.0};  // 0 disables the layer
  bool left{true};
  bool right{true};
  bool bottom{true};
  bool top{true};

  bool enabled() const noexcept { return strength > 0.0 && width_cells > 0; }
  RealField profile(const Grid2D& grid) const;

  bool operator==(const Absorber&) const = default;
};

/// Reflection probability of a plane wave of lattice momentum k (rad per
/// length) hitting the quartic layer backed by the Dirichlet edge, from the
/// stationary 1D lattice problem. This is the round-trip loss figure:
/// reflection off the ramp plus whatever survives the edge and comes back.
double absorber_reflection(double k, double mass, double h, int width_cells, double strength);

/// Strength minimising absorber_reflection at momentum k.
double tune_absorber_strength(double k, double mass, double h, int width_cells);

enum class Solver { RedBlack, Jacobi };

struct EvolutionParams {
  double mass{1.0};
  double dt{0.0};
  gauge::FluxConfig cfg;
  RealField potential;  // walls; empty values means V = 0
  Absorber absorber;
  double stability_constant{0.25};  // dt <= c * m * min(dx, dy)^2
  // Relative residual of each implicit solve. Norm drift per step tracks this
  // figure, so 1e-12 keeps it near 1e-11 per thousand steps.
  double solver_tolerance{1e-13};
  int max_iterations{400};
  Solver solver{Solver::RedBlack};
  kernels::Backend backend{kernels::Backend::OpenMP};

  /// RangeError on any invariant violation.
  void validate(const Grid2D& grid) const;
};

struct GaussianSpec {
  Vec2 center;
  double width_x{0.0};  // standard deviation of |psi|^2 along x
  double width_y{0.0};
  Vec2 momentum;        // kinetic momentum
  /// When set, the packet carries the gauge factor exp(-i int_center^p a.dl)
  /// so that its kinetic (not canonical) momentum equals `momentum` in the
  /// presence of the flux lines. Packets prepared this way for alpha and
  /// alpha + 1 differ by an exact lattice gauge transformation.
  const gauge::FluxConfig* dress{nullptr};
};

/// Normalised Gaussian psi ~ exp(-(x-cx)^2/(4 sx^2) - (y-cy)^2/(4 sy^2) + i k.(p - c)).
/// PacketTooNarrow if a width is below 3 cells; PacketOffGrid if less than
/// 1 - 1e-3 of the continuous packet mass lies inside the grid.
ComplexField init_gaussian(const Grid2D& grid, const GaussianSpec& spec);
ComplexField init_gaussian(const Grid2D& grid, Vec2 center, double width, Vec2 momentum);

struct HamiltonianStencil {
  Grid2D grid;
  double tx{0.0};
  double ty{0.0};
  std::vector<cplx> diag;
  std::vector<cplx> link_x;
  std::vector<cplx> link_y;
  bool hermitian{true};

  kernels::StencilView view() const noexcept {
    return {grid.nx, grid.ny, tx, ty, diag.data(), link_x.data(), link_y.data()};
  }

  /// Product of hop phases counter-clockwise around the plaquette whose
  /// lower-left node is (i, j).
  cplx plaquette_holonomy(int i, int j) const;
};

/// FluxOnLink if any flux center inside the grid is within the singular radius
/// of a grid line.
HamiltonianStencil build_hamiltonian_stencil(const EvolutionParams& params, const Grid2D& grid);

/// H psi on a field.
ComplexField apply_hamiltonian(const HamiltonianStencil& h, const ComplexField& psi,
                               kernels::Backend backend = kernels::Backend::OpenMP);

struct StepStats {
  int iterations{0};
  double residual{0.0};  // relative residual of the last iterate checked (at most the accepted one's predecessor)
};

/// Crank-Nicolson propagator for a fixed Hamiltonian:
///   psi <- (I + i dt/2 H)^-1 (I - i dt/2 H) psi.
/// The initial guess of each solve is extrapolated from the previous states of
/// the same trajectory; passing a field that is not the last output resets that
/// history.
class Propagator {
 public:
  Propagator(const EvolutionParams& params, const Grid2D& grid);
  Propagator(HamiltonianStencil stencil, const EvolutionParams& params);

  StepStats advance(ComplexField& psi);

  const HamiltonianStencil& stencil() const noexcept { return stencil_; }
  double dt() const noexcept { return dt_; }
  std::int64_t total_iterations() const noexcept { return total_iterations_; }

 private:
  void init_buffers();
  double sum_rows(std::span<const double> rows) const;

  HamiltonianStencil stencil_;
  double dt_{0.0};
  double tau_{0.0};
  double tolerance_{1e-10};
  int max_iterations_{400};
  Solver solver_{Solver::RedBlack};
  kernels::Backend backend_{kernels::Backend::OpenMP};

  std::vector<cplx> da_;
  std::vector<cplx> b_;
  std::vector<cplx> x_;
  std::vector<cplx> x_next_;
  std::vector<double> rows_;
  std::vector<cplx> prev1_;
  std::vector<cplx> prev2_;
  std::vector<cplx> last_out_;
  int history_{0};
  std::int64_t total_iterations_{0};
};

/// Single Crank-Nicolson step (builds the Hamiltonian; use Propagator for
/// trajectories).
ComplexField step(const ComplexField& field, const EvolutionParams& params);

/// Straight detector along a grid line. Vertical segments count the current
/// through the +x links leaving their nodes, horizontal ones the +y links.
struct Detector {
  Vec2 start;
  Vec2 end;
};

struct DetectorResult {
  std::vector<double> arclength;  // from Detector::start
  std::vector<double> intensity;  // time-integrated current per unit length
  double segment_flux{0.0};       // integral of intensity over the segment
  double line_flux{0.0};          // through the whole grid line containing the segment
  double initial_norm{0.0};
  double final_norm{0.0};
  double initial_upstream_norm{0.0};  // on the incoming side of the line, inclusive
  double final_upstream_norm{0.0};
  double absorbed_upstream{0.0};
  double absorbed_total{0.0};
  int steps{0};
  std::int64_t solver_iterations{0};
  double max_residual{0.0};

  /// initial_upstream - (final_upstream + line_flux + absorbed_upstream).
  double conservation_defect() const noexcept {
    return initial_upstream_norm - (final_upstream_norm + line_flux + absorbed_upstream);
  }
};

/// Propagates `initial` until t_max and accumulates the probability current
/// through the detector, evaluated on the Crank-Nicolson midpoint states so
/// that the discrete continuity equation balances exactly. The state at t_max
/// is moved into `final_state` when given.
DetectorResult run_to_detector(const ComplexField& initial, const EvolutionParams& params,
                               const Detector& detector, double t_max,
                               ComplexField* final_state = nullptr);

}  // namespace ablab::evolve
