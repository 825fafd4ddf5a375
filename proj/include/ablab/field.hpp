#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ablab/vec2.hpp"

namespace ablab {

using cplx = std::complex<double>;

/// Uniform node grid. Node (i, j) sits at origin + (i*dx, j*dy); storage is
/// row-major with x fastest, index = j*nx + i.
struct Grid2D {
  int nx{0};
  int ny{0};
  double dx{1.0};
  double dy{1.0};
  Vec2 origin{};

  /// Throws RangeError unless nx, ny >= 16 and dx, dy > 0.
  void validate() const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const noexcept { return {origin.x + i * dx, origin.y + j * dy}; }
  double cell_area() const noexcept { return dx * dy; }

  bool operator==(const Grid2D&) const = default;
};

/// Irrational sub-cell offset used to keep flux centers off every grid line and
/// link, in cell units.
Vec2 flux_cell_offset() noexcept;

/// Grid whose cell (cell_i, cell_j) contains `flux_center` at the standard
/// irrational offset from the cell's lower-left node.
Grid2D grid_with_flux_in_cell(int nx, int ny, double dx, double dy, Vec2 flux_center, int cell_i,
                              int cell_j);

/// Distance (in length units) from `p` to the nearest grid line within the grid
/// extent; +inf when `p` lies outside the grid.
double distance_to_grid_lines(const Grid2D& grid, Vec2 p);

struct ComplexField {
  Grid2D grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(const Grid2D& g) : grid(g), values(g.size(), cplx{}) {}

  cplx& at(int i, int j) { return values[grid.index(i, j)]; }
  const cplx& at(int i, int j) const { return values[grid.index(i, j)]; }

  /// Sum |psi|^2 dx dy.
  double norm_squared() const;
  bool all_finite() const;
};

/// <a, b> = sum conj(a) b dx dy. Grids must match.
cplx inner_product(const ComplexField& a, const ComplexField& b);

struct RealField {
  Grid2D grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
};

}  // namespace ablab
