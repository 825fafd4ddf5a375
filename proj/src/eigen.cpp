#include "ablab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ablab/errors.hpp"

namespace ablab::eigen {

namespace {

constexpr double kAxisTolerance = 1e-9;

void require_off_axis(const Grid2D& g, Axis axis) {
  g.validate();
  if (axis == Axis::X) {
    for (int j = 0; j < g.ny; ++j) {
      if (std::abs(g.node(0, j).y) <= kAxisTolerance) {
        throw Error(ErrorCode::GridTouchesAxis, "grid row " + std::to_string(j) + " lies on y = 0");
      }
    }
  } else {
    for (int i = 0; i < g.nx; ++i) {
      if (std::abs(g.node(i, 0).x) <= kAxisTolerance) {
        throw Error(ErrorCode::GridTouchesAxis, "grid column " + std::to_string(i) + " lies on x = 0");
      }
    }
  }
}

}  // namespace

double GaussianProfile::operator()(double s) const noexcept {
  const double u = (s - center) / width;
  return amplitude * std::exp(-0.5 * u * u);
}

ComplexField sample_eigen_solution(const EigenSolutionSpec& spec, const Grid2D& grid) {
  require_off_axis(grid, spec.axis);
  if (!(spec.profile.width > 0.0)) throw Error(ErrorCode::RangeError, "profile width must be > 0");
  ComplexField phi(grid);
  const cplx i_lambda = cplx{0.0, 1.0} * spec.lambda;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      cplx v;
      if (spec.axis == Axis::X) {
        v = spec.profile(p.y) * std::exp(i_lambda * p.x + cplx{0.0, spec.alpha * std::atan(p.x / p.y)});
      } else {
        v = spec.profile(p.x) * std::exp(i_lambda * p.y - cplx{0.0, spec.alpha * std::atan(p.y / p.x)});
      }
      phi.at(i, j) = v;
    }
  }
  return phi;
}

double residual_check(const ComplexField& field, double alpha, std::complex<double> lambda,
                      Axis axis) {
  const Grid2D& g = field.grid;
  require_off_axis(g, axis);
  const bool along_x = axis == Axis::X;
  const int n_long = along_x ? g.nx : g.ny;
  const int n_tran = along_x ? g.ny : g.nx;
  const double h = along_x ? g.dx : g.dy;
  const cplx minus_i{0.0, -1.0};
  double res2 = 0.0, ref2 = 0.0;
  for (int t = 0; t < n_tran; ++t) {
    auto f = [&](int s) { return along_x ? field.at(s, t) : field.at(t, s); };
    for (int s = 2; s + 2 < n_long; ++s) {
      const Vec2 p = along_x ? g.node(s, t) : g.node(t, s);
      const cplx d = (f(s - 2) - 8.0 * f(s - 1) + 8.0 * f(s + 1) - f(s + 2)) / (12.0 * h);
      const double r2 = p.x * p.x + p.y * p.y;
      // p_x = -i d_x - alpha y/r^2;  p_y = -i d_y + alpha x/r^2
      const double gauge = along_x ? -alpha * p.y / r2 : alpha * p.x / r2;
      const cplx r = minus_i * d + (gauge - lambda) * f(s);
      res2 += std::norm(r);
      ref2 += std::norm(f(s));
    }
  }
  if (!(ref2 > 0.0)) throw Error(ErrorCode::NotAField, "field vanishes on the residual stencil");
  return std::sqrt(res2 / ref2);
}

double plane_wave_dispersion(double k, double h) {
  const double kh = (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
  return std::abs(kh - k) / std::abs(k);
}

WitnessReport compact_support_witness(const EigenSolutionSpec& spec, const Grid2D& grid,
                                      double threshold) {
  if (spec.lambda.imag() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "compact-support witness needs a real eigenvalue");
  }
  if (spec.profile.amplitude == 0.0) throw Error(ErrorCode::NotAField, "C vanishes identically");
  const ComplexField phi = sample_eigen_solution(spec, grid);
  WitnessReport out;
  double cmax = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      const double c = std::abs(spec.profile(spec.axis == Axis::X ? p.y : p.x));
      cmax = std::max(cmax, c);
      out.deviation = std::max(out.deviation, std::abs(std::abs(phi.at(i, j)) - c));
    }
  }
  if (!(cmax > 0.0)) throw Error(ErrorCode::NotAField, "C underflows to zero on the grid");
  out.witness = out.deviation < threshold;
  std::ostringstream msg;
  msg << "max | |phi| - |C| | = " << out.deviation << " (threshold " << threshold << "); "
      << (out.witness ? "|phi| is constant along every sample line, so phi has no compact support"
                      : "modulus varies along sample lines");
  out.report = msg.str();
  return out;
}

}  // namespace ablab::eigen
