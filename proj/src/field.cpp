#include "ablab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ablab/errors.hpp"

namespace ablab {

void Grid2D::validate() const {
  if (nx < 16 || ny < 16) throw Error(ErrorCode::RangeError, "grid needs nx, ny >= 16");
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw Error(ErrorCode::RangeError, "grid spacing must be positive");
  }
  if (!is_finite(origin)) throw Error(ErrorCode::RangeError, "grid origin must be finite");
}

Vec2 flux_cell_offset() noexcept {
  return {0.5 + 1.0 / std::sqrt(2931.0), 0.5 + 1.0 / std::sqrt(4099.0)};
}

Grid2D grid_with_flux_in_cell(int nx, int ny, double dx, double dy, Vec2 flux_center, int cell_i,
                              int cell_j) {
  const Vec2 off = flux_cell_offset();
  Grid2D g{nx, ny, dx, dy,
           {flux_center.x - (cell_i + off.x) * dx, flux_center.y - (cell_j + off.y) * dy}};
  g.validate();
  return g;
}

double distance_to_grid_lines(const Grid2D& grid, Vec2 p) {
  const double u = (p.x - grid.origin.x) / grid.dx;
  const double v = (p.y - grid.origin.y) / grid.dy;
  if (u < 0.0 || v < 0.0 || u > grid.nx - 1 || v > grid.ny - 1) {
    return std::numeric_limits<double>::infinity();
  }
  const double du = std::abs(u - std::round(u)) * grid.dx;
  const double dv = std::abs(v - std::round(v)) * grid.dy;
  return std::min(du, dv);
}

double ComplexField::norm_squared() const {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return sum * grid.cell_area();
}

bool ComplexField::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

cplx inner_product(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::InvalidArgument, "inner product grid mismatch");
  cplx sum{};
  for (std::size_t k = 0; k < a.values.size(); ++k) sum += std::conj(a.values[k]) * b.values[k];
  return sum * a.grid.cell_area();
}

}  // namespace ablab
