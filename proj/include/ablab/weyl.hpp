#pragma once

// Magnetic translations V_x(a) = exp(i a p_x), V_y(b) = exp(i b p_y) acting on
// sampled wavefunctions, and the group commutator phase they produce around a
// flux line at the origin.
//
// Discrete realization: (V psi)(p) = exp(i int_p^{p+d} a.dl) psi(p + d), with
// the line integral taken along the straight segment (exact subtended angle).
// A packet centred at q is carried to q - d. Samples shifted in from outside
// the grid are zero.
//
// Ordering convention for the commutator: the returned phase is
//   <psi, V_x(a) V_y(-b) V_x(a)^-1 V_y(-b)^-1 psi>,
// which transports the probe once around the rectangle
//   (x,y) -> (x+a,y) -> (x+a,y-b) -> (x,y-b) -> (x,y)
// and equals exp(2 pi i alpha w), w the winding number of that rectangle
// about the flux (counter-clockwise positive).

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ablab/field.hpp"
#include "ablab/gauge.hpp"
#include "ablab/kernels.hpp"

namespace ablab::weyl {

enum class Axis { X, Y };

struct MagneticTranslation {
  Axis axis{Axis::X};
  double displacement{0.0};  // length; must be an integer number of cells
  gauge::FluxConfig cfg;
};

/// NotGridMultiple if the displacement is not an integer multiple of the grid
/// spacing (1e-9 relative); SegmentThroughFlux if any node-to-node translation
/// segment inside the grid enters an exclusion disk.
ComplexField apply_magnetic_translation(const ComplexField& field, const MagneticTranslation& t,
                                        kernels::Backend backend = kernels::Backend::OpenMP);

struct CommutatorCase {
  double x{0.0};
  double y{0.0};
  double a{0.0};
  double b{0.0};
  double alpha{0.0};
  bool operator==(const CommutatorCase&) const = default;
};

/// Sign function used for the epsilon factors.
int epsilon(double t, double tolerance);

/// The integer [eps(x) - eps(x+a)] * [eps(y) - eps(y-b)], always in {0, +-4}.
/// OnAxis if any argument is within `tolerance` of zero.
int epsilon_product(const CommutatorCase& c, double tolerance = 1e-9);

/// exp(i (pi alpha / 2) * epsilon_product).
cplx commutator_phase_closed_form(const CommutatorCase& c, double tolerance = 1e-9);

/// Closed rectangle (x,y) -> (x+a,y) -> (x+a,y-b) -> (x,y-b).
gauge::Polyline commutator_rectangle(const CommutatorCase& c);

/// Winding of commutator_rectangle about the origin.
int commutator_winding(const CommutatorCase& c);

/// Default probe width: 1/8 of the smallest of |x|, |x+a|, |y|, |y-b|.
double default_probe_width(const CommutatorCase& c);

struct EmpiricalPhase {
  cplx phase;             // unit modulus
  double modulus{0.0};    // |<psi, W psi>| before normalisation
  double support_mass{0.0};  // probe mass inside the admissible quadrant cell
};

/// Gaussian probe of the given width at (x, y), flux alpha at the origin.
/// ProbeStraddlesAxis if less than 1 - 1e-6 of the sampled probe mass lies in
/// the open cell where all four sign factors match those of (x, y, a, b).
EmpiricalPhase commutator_phase_empirical(const CommutatorCase& c, double probe_width,
                                          const Grid2D& grid,
                                          kernels::Backend backend = kernels::Backend::OpenMP);

/// n x n grid of spacing h with the origin (flux position) inside the central
/// cell at the standard irrational offset.
Grid2D commutator_grid(int n, double h);

/// Deterministic set of 64 admissible cases: coordinates multiples of 1/4 and
/// |x|, |x+a|, |y|, |y-b| in [1, 5], so every probe stays well inside the
/// default 512^2 grid of spacing 1/32.
std::vector<CommutatorCase> default_commutator_cases();

/// `count` admissible cases drawn from a seeded generator, coordinates
/// multiples of `step`, |x|, |x+a|, |y|, |y-b| in [1, 4].
std::vector<CommutatorCase> random_commutator_cases(int count, std::uint64_t seed, double step);

struct SweepRow {
  CommutatorCase c;
  std::optional<cplx> empirical;
  std::optional<cplx> closed_form;
  double discrepancy{0.0};  // |arg(empirical / closed_form)|
  double modulus{0.0};
  int winding{0};
  std::string error;  // empty when both phases were computed

  bool ok() const noexcept { return error.empty(); }
};

/// Empirical against closed form on alpha_list x case_list (the alpha field of
/// each case is overridden). probe_width <= 0 selects default_probe_width per
/// case. Errors are recorded per row; the sweep always completes. A modulus
/// below min_modulus is recorded as an error.
std::vector<SweepRow> commutator_sweep(const std::vector<double>& alpha_list,
                                       const std::vector<CommutatorCase>& case_list,
                                       const Grid2D& grid, double probe_width = 0.0,
                                       double min_modulus = 0.999);

}  // namespace ablab::weyl
