#pragma once

// Trapped flux lines on the punctured plane.
//
// The vector potential is fixed to the azimuthal gauge: a flux line at c with
// reduced flux alpha = q*Phi/(2*pi) contributes
//
//     a(p) = alpha * (-(y - c_y), x - c_x) / |p - c|^2,
//
// i.e. qA with hbar = 1. Along a straight segment that avoids c this term
// integrates exactly to alpha times the signed angle the segment subtends at c,
// so every holonomy here is computed analytically. Orientation convention:
// counter-clockwise circuits are positive.

#include <cstdint>
#include <span>
#include <vector>

#include "ablab/vec2.hpp"

namespace ablab::gauge {

inline constexpr double kDefaultSingularRadius = 1e-6;

struct FluxLine {
  Vec2 center;
  double alpha{0.0};

  bool operator==(const FluxLine&) const = default;
};

/// Ordered set of flux lines with an exclusion disk of `singular_radius`
/// around each center. Construction validates the invariants.
class FluxConfig {
 public:
  FluxConfig() = default;
  explicit FluxConfig(std::vector<FluxLine> lines,
                      double singular_radius = kDefaultSingularRadius);

  const std::vector<FluxLine>& lines() const noexcept { return lines_; }
  double singular_radius() const noexcept { return singular_radius_; }
  bool empty() const noexcept { return lines_.empty(); }

  /// Returns a copy with every alpha replaced; sizes must match.
  FluxConfig with_alphas(std::span<const double> alphas) const;

  bool operator==(const FluxConfig&) const = default;

 private:
  std::vector<FluxLine> lines_;
  double singular_radius_{kDefaultSingularRadius};
};

struct Polyline {
  std::vector<Vec2> vertices;
  bool closed{false};

  std::size_t segment_count() const noexcept {
    if (vertices.size() < 2) return 0;
    return closed ? vertices.size() : vertices.size() - 1;
  }
  Vec2 segment_start(std::size_t k) const { return vertices[k]; }
  Vec2 segment_end(std::size_t k) const { return vertices[(k + 1) % vertices.size()]; }

  /// Same geometry traversed in the opposite direction.
  Polyline reversed() const;
};

/// Signed angle subtended at `center` by the straight segment a -> b, in
/// (-pi, pi]. Equals the integral of d(theta) along the segment.
double subtended_angle(Vec2 center, Vec2 a, Vec2 b);

/// Sum over lines of alpha_k * subtended_angle(c_k, a, b): the exact line
/// integral of the reduced vector potential along a straight segment.
/// Throws SingularPoint if the segment enters an exclusion disk.
double segment_phase(const FluxConfig& cfg, Vec2 a, Vec2 b);

/// Same as segment_phase without the exclusion check; callers that have already
/// validated their geometry use this in hot loops.
double segment_phase_unchecked(const FluxConfig& cfg, Vec2 a, Vec2 b) noexcept;

Vec2 reduced_vector_potential(const FluxConfig& cfg, Vec2 point);

/// Line integral of the reduced vector potential along `path`, in radians.
///
/// The returned value is the per-segment analytic integral. A composite
/// Gauss-Legendre quadrature with sub-intervals no longer than
/// `quadrature_step` (bisected adaptively near the punctures) is evaluated as a
/// cross-check; StepTooCoarse is raised when its estimated error, or its
/// disagreement with the analytic value, exceeds `tolerance`.
double line_integral_phase(const FluxConfig& cfg, const Polyline& path, double quadrature_step,
                           double tolerance = 1e-8);

/// The quadrature route on its own (no analytic fallback). Returns the value and
/// writes the accumulated error estimate.
double line_integral_quadrature(const FluxConfig& cfg, const Polyline& path,
                                double quadrature_step, double tolerance,
                                double* error_estimate = nullptr);

/// Signed winding number of a closed polyline about `point` from the
/// accumulated subtended angle. PointOnPath if the point is closer than
/// `tolerance` to any segment.
int winding_number(const Polyline& path, Vec2 point, double tolerance = 1e-12);

/// 2*pi * sum_k alpha_k * winding(path, c_k).
double holonomy_from_winding(const FluxConfig& cfg, const Polyline& path);

/// Checks that no segment of `path` enters an exclusion disk.
void require_clear_of_fluxes(const FluxConfig& cfg, const Polyline& path);

struct HolonomyCase {
  FluxConfig cfg;
  Polyline path;
};

/// Seeded test cases: 1-3 flux lines with alpha in [-2, 2] and centres in
/// [-2, 2]^2, each paired with a closed polyline of 3-12 vertices in [-4, 4]^2
/// that keeps at least 1e-3 away from every centre. Self-intersections are
/// allowed, so windings other than 0 and +-1 occur.
std::vector<HolonomyCase> random_holonomy_cases(int count, std::uint64_t seed);

}  // namespace ablab::gauge
