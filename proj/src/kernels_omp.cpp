// OpenMP backend: rows are distributed with a static schedule.

#include "kernels_rows.hpp"

namespace ablab::kernels::omp {

void apply_hamiltonian(const StencilView& h, const cplx* in, cplx* out) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < h.ny; ++j) rows::apply_row(h, j, in, out);
}

void cn_rhs(const StencilView& h, const cplx* da, double tau, const cplx* in, cplx* out) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < h.ny; ++j) rows::rhs_row(h, da, tau, j, in, out);
}

void jacobi_sweep(const StencilView& h, const cplx* da, double tau, const cplx* b, const cplx* x,
                  cplx* x_next, double* row_residual) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < h.ny; ++j) row_residual[j] = rows::jacobi_row(h, da, tau, j, b, x, x_next);
}

void red_black_sweep(const StencilView& h, const cplx* da, double tau, const cplx* b, cplx* x,
                     int color, double* row_residual) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < h.ny; ++j) row_residual[j] = rows::red_black_row(h, da, tau, j, color, b, x);
}

void row_norms(int nx, int ny, const cplx* v, double* row_sums) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) row_sums[j] = rows::norm_row(nx, j, v);
}

void magnetic_shift(const Grid2D& g, const gauge::FluxConfig& cfg, int di, int dj, const cplx* in,
                    cplx* out) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j) rows::magnetic_shift_row(g, cfg, di, dj, j, in, out);
}

}  // namespace ablab::kernels::omp
