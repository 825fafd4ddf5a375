#include "ablab/kernels.hpp"

#include "ablab/errors.hpp"

namespace ablab::kernels {

namespace serial {
void apply_hamiltonian(const StencilView& h, const cplx* in, cplx* out);
void cn_rhs(const StencilView& h, const cplx* da, double tau, const cplx* in, cplx* out);
void jacobi_sweep(const StencilView& h, const cplx* da, double tau, const cplx* b, const cplx* x,
                  cplx* x_next, double* row_residual);
void red_black_sweep(const StencilView& h, const cplx* da, double tau, const cplx* b, cplx* x,
                     int color, double* row_residual);
void row_norms(int nx, int ny, const cplx* v, double* row_sums);
void magnetic_shift(const Grid2D& g, const gauge::FluxConfig& cfg, int di, int dj, const cplx* in,
                    cplx* out);
}  // namespace serial

namespace omp {
void apply_hamiltonian(const StencilView& h, const cplx* in, cplx* out);
void cn_rhs(const StencilView& h, const cplx* da, double tau, const cplx* in, cplx* out);
void jacobi_sweep(const StencilView& h, const cplx* da, double tau, const cplx* b, const cplx* x,
                  cplx* x_next, double* row_residual);
void red_black_sweep(const StencilView& h, const cplx* da, double tau, const cplx* b, cplx* x,
                     int color, double* row_residual);
void row_norms(int nx, int ny, const cplx* v, double* row_sums);
void magnetic_shift(const Grid2D& g, const gauge::FluxConfig& cfg, int di, int dj, const cplx* in,
                    cplx* out);
}  // namespace omp

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::InvalidArgument, std::string("kernel buffer size mismatch: ") + what);
  }
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  return b == Backend::Serial ? "serial" : "openmp";
}

void apply_hamiltonian(Backend backend, const StencilView& h, std::span<const cplx> in,
                       std::span<cplx> out) {
  const std::size_t n = static_cast<std::size_t>(h.nx) * h.ny;
  require_size(in.size(), n, "in");
  require_size(out.size(), n, "out");
  if (backend == Backend::Serial) serial::apply_hamiltonian(h, in.data(), out.data());
  else omp::apply_hamiltonian(h, in.data(), out.data());
}

void cn_rhs(Backend backend, const StencilView& h, std::span<const cplx> da, double tau,
            std::span<const cplx> in, std::span<cplx> out) {
  const std::size_t n = static_cast<std::size_t>(h.nx) * h.ny;
  require_size(da.size(), n, "da");
  require_size(in.size(), n, "in");
  require_size(out.size(), n, "out");
  if (backend == Backend::Serial) serial::cn_rhs(h, da.data(), tau, in.data(), out.data());
  else omp::cn_rhs(h, da.data(), tau, in.data(), out.data());
}

void jacobi_sweep(Backend backend, const StencilView& h, std::span<const cplx> da, double tau,
                  std::span<const cplx> b, std::span<const cplx> x, std::span<cplx> x_next,
                  std::span<double> row_residual) {
  const std::size_t n = static_cast<std::size_t>(h.nx) * h.ny;
  require_size(da.size(), n, "da");
  require_size(b.size(), n, "b");
  require_size(x.size(), n, "x");
  require_size(x_next.size(), n, "x_next");
  require_size(row_residual.size(), static_cast<std::size_t>(h.ny), "row_residual");
  if (backend == Backend::Serial) {
    serial::jacobi_sweep(h, da.data(), tau, b.data(), x.data(), x_next.data(), row_residual.data());
  } else {
    omp::jacobi_sweep(h, da.data(), tau, b.data(), x.data(), x_next.data(), row_residual.data());
  }
}

void red_black_sweep(Backend backend, const StencilView& h, std::span<const cplx> da, double tau,
                     std::span<const cplx> b, std::span<cplx> x, int color,
                     std::span<double> row_residual) {
  const std::size_t n = static_cast<std::size_t>(h.nx) * h.ny;
  require_size(da.size(), n, "da");
  require_size(b.size(), n, "b");
  require_size(x.size(), n, "x");
  require_size(row_residual.size(), static_cast<std::size_t>(h.ny), "row_residual");
  if (color != 0 && color != 1) throw Error(ErrorCode::InvalidArgument, "color must be 0 or 1");
  if (backend == Backend::Serial) {
    serial::red_black_sweep(h, da.data(), tau, b.data(), x.data(), color, row_residual.data());
  } else {
    omp::red_black_sweep(h, da.data(), tau, b.data(), x.data(), color, row_residual.data());
  }
}

void row_norms(Backend backend, int nx, int ny, std::span<const cplx> v,
               std::span<double> row_sums) {
  require_size(v.size(), static_cast<std::size_t>(nx) * ny, "v");
  require_size(row_sums.size(), static_cast<std::size_t>(ny), "row_sums");
  if (backend == Backend::Serial) serial::row_norms(nx, ny, v.data(), row_sums.data());
  else omp::row_norms(nx, ny, v.data(), row_sums.data());
}

void magnetic_shift(Backend backend, const Grid2D& grid, const gauge::FluxConfig& cfg, int di,
                    int dj, std::span<const cplx> in, std::span<cplx> out) {
  require_size(in.size(), grid.size(), "in");
  require_size(out.size(), grid.size(), "out");
  if (backend == Backend::Serial) serial::magnetic_shift(grid, cfg, di, dj, in.data(), out.data());
  else omp::magnetic_shift(grid, cfg, di, dj, in.data(), out.data());
}

}  // namespace ablab::kernels
