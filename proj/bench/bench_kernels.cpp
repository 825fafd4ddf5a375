#include <benchmark/benchmark.h>

#include "ablab/evolve.hpp"
#include "ablab/kernels.hpp"

using namespace ablab;
using kernels::Backend;

namespace {

struct Setup {
  Grid2D g;
  evolve::HamiltonianStencil h;
  std::vector<cplx> x, b, da;
  double tau{0.125};

  explicit Setup(int n) : g(grid_with_flux_in_cell(n, n, 1.0, 1.0, {n / 2.0, n / 2.0}, n / 2, n / 2)) {
    evolve::EvolutionParams p;
    p.dt = 0.25;
    p.cfg = gauge::FluxConfig({{{n / 2.0, n / 2.0}, 0.5}});
    h = evolve::build_hamiltonian_stencil(p, g);
    const ComplexField psi = evolve::init_gaussian(g, {n / 3.0, n / 2.0}, n / 10.0, {0.5, 0.0});
    x = psi.values;
    b = psi.values;
    for (std::size_t k = 0; k < g.size(); ++k) da.push_back(1.0 + cplx{0.0, tau} * h.diag[k]);
  }
};

void bm_apply_hamiltonian(benchmark::State& state, Backend backend) {
  Setup s(static_cast<int>(state.range(0)));
  std::vector<cplx> out(s.g.size());
  for (auto _ : state) {
    kernels::apply_hamiltonian(backend, s.h.view(), s.x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.g.size()));
}

void bm_red_black(benchmark::State& state, Backend backend) {
  Setup s(static_cast<int>(state.range(0)));
  std::vector<double> rows(s.g.ny);
  for (auto _ : state) {
    kernels::red_black_sweep(backend, s.h.view(), s.da, s.tau, s.b, s.x, 0, rows);
    kernels::red_black_sweep(backend, s.h.view(), s.da, s.tau, s.b, s.x, 1, rows);
    benchmark::DoNotOptimize(s.x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.g.size()));
}

}  // namespace

BENCHMARK_CAPTURE(bm_apply_hamiltonian, serial, Backend::Serial)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bm_apply_hamiltonian, openmp, Backend::OpenMP)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bm_red_black, serial, Backend::Serial)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bm_red_black, openmp, Backend::OpenMP)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
