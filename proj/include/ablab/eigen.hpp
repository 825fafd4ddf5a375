#pragma once

// Explicit solutions of the first-order eigenvalue equation for the covariant
// momentum of a flux line at the origin,
//
//   p_x phi = -i d_x phi - alpha y/(x^2+y^2) phi = lambda phi
//     => phi(x, y) = C(y) exp(i lambda x + i alpha atan(x/y)),
//
// and its mirror for p_y = -i d_y + alpha x/(x^2+y^2):
//
//     psi(x, y) = C(x) exp(i lambda y - i alpha atan(y/x)).
//
// For fixed y != 0, atan(x/y) is smooth in x, so each grid row carries one
// continuous branch.

#include <complex>
#include <string>

#include "ablab/field.hpp"

namespace ablab::eigen {

enum class Axis { X, Y };  // which momentum component the solution diagonalises

/// C(s) = amplitude * exp(-(s - center)^2 / (2 width^2)); s is y for Axis::X
/// and x for Axis::Y.
struct GaussianProfile {
  double amplitude{1.0};
  double center{0.0};
  double width{1.0};

  double operator()(double s) const noexcept;
  bool operator==(const GaussianProfile&) const = default;
};

struct EigenSolutionSpec {
  double alpha{0.0};
  std::complex<double> lambda{0.0, 0.0};
  GaussianProfile profile;
  Axis axis{Axis::X};
};

/// GridTouchesAxis if any sample line of the transverse coordinate lies within
/// 1e-9 of the flux axis (y = 0 for Axis::X, x = 0 for Axis::Y).
ComplexField sample_eigen_solution(const EigenSolutionSpec& spec, const Grid2D& grid);

/// Relative L2 residual ||(p - lambda) phi|| / ||phi|| over nodes at least two
/// cells from the grid edge along the derivative axis, with the 4th-order
/// central difference
///   D f_i = (f_{i-2} - 8 f_{i-1} + 8 f_{i+1} - f_{i+2}) / (12 h).
/// NotAField if phi vanishes on those nodes; GridTouchesAxis as above.
double residual_check(const ComplexField& field, double alpha, std::complex<double> lambda,
                      Axis axis = Axis::X);

/// Relative residual of the 4th-order stencil on a plane wave exp(i k s)
/// sampled at spacing h: |k_h - k| / |k| with k_h = (8 sin(kh) - sin(2kh))/(6h).
double plane_wave_dispersion(double k, double h);

struct WitnessReport {
  bool witness{false};
  double deviation{0.0};  // max | |phi| - |C| | over the samples
  std::string report;
};

/// For real lambda, checks that |phi| does not depend on the longitudinal
/// coordinate, i.e. max | |phi(s, t)| - |C(t)| | < threshold. InvalidArgument
/// for complex lambda; NotAField when C vanishes identically.
WitnessReport compact_support_witness(const EigenSolutionSpec& spec, const Grid2D& grid,
                                      double threshold = 1e-12);

}  // namespace ablab::eigen
