#pragma once

// Data-parallel grid kernels behind the propagator.
//
// Every kernel exists twice: a serial reference (kernels_serial.cpp) and an
// OpenMP version (kernels_omp.cpp). Both call the same per-row routines from
// kernels_rows.hpp, so they perform identical floating-point operations on
// every node and agree bitwise. Reductions are returned as per-row partial
// sums; callers add them in row order, which keeps results independent of the
// worker count.

#include <span>
#include <string_view>

#include "ablab/field.hpp"
#include "ablab/gauge.hpp"

namespace ablab::kernels {

enum class Backend { Serial, OpenMP };

std::string_view to_string(Backend b) noexcept;

/// Five-point magnetic stencil.
///
///   (H psi)(p) = diag(p) psi(p)
///              - tx [conj(link_x(p)) psi(p+x) + link_x(p-x) psi(p-x)]
///              - ty [conj(link_y(p)) psi(p+y) + link_y(p-y) psi(p-y)]
///
/// link_x(p) is the Peierls phase of the hop p -> p+x, i.e.
/// exp(-i * integral of a along the link). Nodes outside the grid are zero
/// (Dirichlet). The last column of link_x and last row of link_y are unused.
struct StencilView {
  int nx{0};
  int ny{0};
  double tx{0.0};
  double ty{0.0};
  const cplx* diag{nullptr};
  const cplx* link_x{nullptr};
  const cplx* link_y{nullptr};
};

/// out = H in.
void apply_hamiltonian(Backend backend, const StencilView& h, std::span<const cplx> in,
                       std::span<cplx> out);

/// out = (I - i tau H) in, written with the precomputed diagonal of the
/// implicit operator, da = 1 + i tau diag.
void cn_rhs(Backend backend, const StencilView& h, std::span<const cplx> da, double tau,
            std::span<const cplx> in, std::span<cplx> out);

/// One Jacobi sweep for (I + i tau H) x = b:
///   x_next = (b - i tau O x) / da,  O = off-diagonal part of H.
/// Writes |da (x_next - x)|^2 summed per row into row_residual (size ny); that
/// is the squared residual of the incoming iterate x.
void jacobi_sweep(Backend backend, const StencilView& h, std::span<const cplx> da, double tau,
                  std::span<const cplx> b, std::span<const cplx> x, std::span<cplx> x_next,
                  std::span<double> row_residual);

/// One red-black Gauss-Seidel half sweep for (I + i tau H) x = b, updating in
/// place the nodes with (i + j) % 2 == color. Writes the squared residual of
/// the updated nodes before their update, summed per row, into row_residual.
/// After the colour-0 half sweep the colour-0 equations hold exactly, so the
/// colour-1 figure is the full residual of the intermediate iterate.
void red_black_sweep(Backend backend, const StencilView& h, std::span<const cplx> da, double tau,
                     std::span<const cplx> b, std::span<cplx> x, int color,
                     std::span<double> row_residual);

/// Per-row sums of |v|^2.
void row_norms(Backend backend, int nx, int ny, std::span<const cplx> v,
               std::span<double> row_sums);

/// Magnetic translation by a whole number of cells:
///   out(p) = exp(i * integral of a from p to p+d) * in(p+d),  d = (di dx, dj dy),
/// zero where p+d is off-grid. The segment integral is the exact subtended-angle
/// sum; the caller guarantees that no segment enters an exclusion disk.
void magnetic_shift(Backend backend, const Grid2D& grid, const gauge::FluxConfig& cfg, int di,
                    int dj, std::span<const cplx> in, std::span<cplx> out);

}  // namespace ablab::kernels
