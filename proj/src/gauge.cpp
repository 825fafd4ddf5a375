#include "ablab/gauge.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ablab/errors.hpp"

namespace ablab::gauge {

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290,
                                            0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

constexpr int kMaxBisectionDepth = 40;

double gauss_legendre(const FluxConfig& cfg, Vec2 a, Vec2 b) {
  const Vec2 mid = (a + b) * 0.5;
  const Vec2 half = (b - a) * 0.5;
  double sum = 0.0;
  for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
    for (double s : {-kGlNodes[k], kGlNodes[k]}) {
      sum += kGlWeights[k] * dot(reduced_vector_potential(cfg, mid + half * s), half);
    }
  }
  return sum;
}

// Adaptive bisection: accept a piece when its two halves agree with the whole.
double adaptive_piece(const FluxConfig& cfg, Vec2 a, Vec2 b, double whole, double tol, int depth,
                      double& err, bool& failed) {
  const Vec2 m = (a + b) * 0.5;
  const double left = gauss_legendre(cfg, a, m);
  const double right = gauss_legendre(cfg, m, b);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth >= kMaxBisectionDepth) {
    if (diff > tol) failed = true;
    err += diff;
    return left + right;
  }
  return adaptive_piece(cfg, a, m, left, tol * 0.5, depth + 1, err, failed) +
         adaptive_piece(cfg, m, b, right, tol * 0.5, depth + 1, err, failed);
}

// Sums positive and negative terms separately, each in increasing magnitude,
// so that negating every term negates the result bit for bit.
double sign_symmetric_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  double pos = 0.0, neg = 0.0;
  for (double t : terms) (t > 0.0 ? pos : neg) += t;
  return pos + neg;
}

}  // namespace

FluxConfig::FluxConfig(std::vector<FluxLine> lines, double singular_radius)
    : lines_(std::move(lines)), singular_radius_(singular_radius) {
  if (!(singular_radius_ > 0.0) || !std::isfinite(singular_radius_)) {
    throw Error(ErrorCode::RangeError, "singular_radius must be positive and finite");
  }
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (!is_finite(lines_[i].center) || !std::isfinite(lines_[i].alpha)) {
      throw Error(ErrorCode::RangeError, "flux line " + std::to_string(i) + " is not finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (norm(lines_[i].center - lines_[j].center) <= 2.0 * singular_radius_) {
        throw Error(ErrorCode::RangeError, "flux lines " + std::to_string(j) + " and " +
                                               std::to_string(i) + " overlap");
      }
    }
  }
}

FluxConfig FluxConfig::with_alphas(std::span<const double> alphas) const {
  if (alphas.size() != lines_.size()) {
    throw Error(ErrorCode::InvalidArgument, "alpha count does not match flux line count");
  }
  std::vector<FluxLine> out = lines_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].alpha = alphas[i];
  return FluxConfig(std::move(out), singular_radius_);
}

Polyline Polyline::reversed() const {
  Polyline out{{vertices.rbegin(), vertices.rend()}, closed};
  return out;
}

double subtended_angle(Vec2 center, Vec2 a, Vec2 b) {
  const Vec2 ra = a - center;
  const Vec2 rb = b - center;
  return std::atan2(cross(ra, rb), dot(ra, rb));
}

double segment_phase_unchecked(const FluxConfig& cfg, Vec2 a, Vec2 b) noexcept {
  double phase = 0.0;
  for (const auto& line : cfg.lines()) {
    if (line.alpha != 0.0) phase += line.alpha * subtended_angle(line.center, a, b);
  }
  return phase;
}

double segment_phase(const FluxConfig& cfg, Vec2 a, Vec2 b) {
  for (const auto& line : cfg.lines()) {
    if (distance_to_segment(line.center, a, b) < cfg.singular_radius()) {
      std::ostringstream msg;
      msg << "segment (" << a.x << "," << a.y << ")->(" << b.x << "," << b.y
          << ") enters the exclusion disk at (" << line.center.x << "," << line.center.y << ")";
      throw Error(ErrorCode::SingularPoint, msg.str());
    }
  }
  return segment_phase_unchecked(cfg, a, b);
}

Vec2 reduced_vector_potential(const FluxConfig& cfg, Vec2 point) {
  Vec2 a{};
  for (const auto& line : cfg.lines()) {
    const Vec2 r = point - line.center;
    const double r2 = dot(r, r);
    if (std::sqrt(r2) < cfg.singular_radius()) {
      throw Error(ErrorCode::SingularPoint, "point lies inside a flux exclusion disk");
    }
    a = a + Vec2{-r.y, r.x} * (line.alpha / r2);
  }
  return a;
}

void require_clear_of_fluxes(const FluxConfig& cfg, const Polyline& path) {
  if (path.vertices.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "polyline needs at least two vertices");
  }
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    (void)segment_phase(cfg, path.segment_start(k), path.segment_end(k));
  }
}

double line_integral_quadrature(const FluxConfig& cfg, const Polyline& path,
                                double quadrature_step, double tolerance,
                                double* error_estimate) {
  if (!(quadrature_step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "quadrature_step must be positive");
  }
  require_clear_of_fluxes(cfg, path);
  double total_length = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    total_length += norm(path.segment_end(k) - path.segment_start(k));
  }
  double sum = 0.0;
  double err = 0.0;
  bool failed = false;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const Vec2 a = path.segment_start(k);
    const Vec2 b = path.segment_end(k);
    const double len = norm(b - a);
    if (len == 0.0) continue;
    const auto pieces = static_cast<std::size_t>(std::ceil(len / quadrature_step));
    const double piece_tol = tolerance * (len / pieces) / std::max(total_length, 1e-300);
    for (std::size_t p = 0; p < pieces; ++p) {
      const Vec2 pa = a + (b - a) * (static_cast<double>(p) / pieces);
      const Vec2 pb = a + (b - a) * (static_cast<double>(p + 1) / pieces);
      sum += adaptive_piece(cfg, pa, pb, gauss_legendre(cfg, pa, pb), piece_tol, 0, err, failed);
    }
  }
  if (error_estimate != nullptr) *error_estimate = err;
  if (failed) {
    throw Error(ErrorCode::StepTooCoarse, "quadrature did not reach the requested tolerance");
  }
  return sum;
}

double line_integral_phase(const FluxConfig& cfg, const Polyline& path, double quadrature_step,
                           double tolerance) {
  require_clear_of_fluxes(cfg, path);
  std::vector<double> terms;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    terms.push_back(segment_phase_unchecked(cfg, path.segment_start(k), path.segment_end(k)));
  }
  const double analytic = sign_symmetric_sum(std::move(terms));
  double err = 0.0;
  const double quad = line_integral_quadrature(cfg, path, quadrature_step, tolerance, &err);
  if (err > tolerance || std::abs(quad - analytic) > tolerance) {
    std::ostringstream msg;
    msg << "quadrature estimate " << quad << " vs analytic " << analytic
        << " (error estimate " << err << ")";
    throw Error(ErrorCode::StepTooCoarse, msg.str());
  }
  return analytic;
}

int winding_number(const Polyline& path, Vec2 point, double tolerance) {
  if (!path.closed) throw Error(ErrorCode::InvalidArgument, "winding number needs a closed path");
  if (path.vertices.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "polyline needs at least two vertices");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const Vec2 a = path.segment_start(k);
    const Vec2 b = path.segment_end(k);
    if (distance_to_segment(point, a, b) < tolerance) {
      throw Error(ErrorCode::PointOnPath, "point lies on the path");
    }
    total += subtended_angle(point, a, b);
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) {
    throw Error(ErrorCode::PointOnPath, "accumulated angle is not a whole number of turns");
  }
  return static_cast<int>(rounded);
}

double holonomy_from_winding(const FluxConfig& cfg, const Polyline& path) {
  double phase = 0.0;
  for (const auto& line : cfg.lines()) {
    phase += 2.0 * std::numbers::pi * line.alpha * winding_number(path, line.center);
  }
  return phase;
}

std::vector<HolonomyCase> random_holonomy_cases(int count, std::uint64_t seed) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "case count must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> nflux(1, 3), nvert(3, 12);
  std::vector<HolonomyCase> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<FluxLine> lines;
    const int m = nflux(rng);
    for (int k = 0; k < m; ++k) lines.push_back({{2.0 * unit(rng), 2.0 * unit(rng)}, 2.0 * unit(rng)});
    Polyline path;
    path.closed = true;
    const int n = nvert(rng);
    for (int k = 0; k < n; ++k) path.vertices.push_back({4.0 * unit(rng), 4.0 * unit(rng)});
    try {
      FluxConfig cfg(lines);
      require_clear_of_fluxes(FluxConfig(lines, 1e-3), path);
      out.push_back({std::move(cfg), std::move(path)});
    } catch (const Error&) {
      // centres too close together or a segment grazing a centre: draw again
    }
  }
  return out;
}

}  // namespace ablab::gauge
