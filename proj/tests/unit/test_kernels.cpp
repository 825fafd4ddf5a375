#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "ablab/errors.hpp"
#include "ablab/evolve.hpp"
#include "ablab/kernels.hpp"

using namespace ablab;
using kernels::Backend;

namespace {

struct Fixture {
  Grid2D g = grid_with_flux_in_cell(48, 40, 1.0, 1.0, {20.0, 18.0}, 20, 18);
  evolve::HamiltonianStencil h;
  std::vector<cplx> a, b, da;
  double tau = 0.125;

  Fixture() {
    evolve::EvolutionParams p;
    p.dt = 0.25;
    p.cfg = gauge::FluxConfig({{{20.0, 18.0}, 0.37}});
    p.absorber.width_cells = 6;
    p.absorber.strength = 0.4;
    p.potential = RealField(g, 0.0);
    for (int j = 10; j < 14; ++j) {
      for (int i = 0; i < g.nx; ++i) p.potential.at(i, j) = 3.0;
    }
    h = evolve::build_hamiltonian_stencil(p, g);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (std::size_t k = 0; k < g.size(); ++k) {
      a.emplace_back(n(rng), n(rng));
      b.emplace_back(n(rng), n(rng));
      da.push_back(1.0 + cplx{0.0, tau} * h.diag[k]);
    }
  }
};

bool same_bits(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), [](cplx u, cplx v) {
           return std::memcmp(&u, &v, sizeof(cplx)) == 0;
         });
}

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bitwise") {
  omp_set_num_threads(4);
  Fixture f;
  const auto view = f.h.view();
  const std::size_t n = f.g.size();

  SUBCASE("apply_hamiltonian") {
    std::vector<cplx> s(n), o(n);
    kernels::apply_hamiltonian(Backend::Serial, view, f.a, s);
    kernels::apply_hamiltonian(Backend::OpenMP, view, f.a, o);
    CHECK(same_bits(s, o));
  }
  SUBCASE("cn_rhs") {
    std::vector<cplx> s(n), o(n);
    kernels::cn_rhs(Backend::Serial, view, f.da, f.tau, f.a, s);
    kernels::cn_rhs(Backend::OpenMP, view, f.da, f.tau, f.a, o);
    CHECK(same_bits(s, o));
  }
  SUBCASE("jacobi_sweep") {
    std::vector<cplx> s(n), o(n);
    std::vector<double> rs(f.g.ny), ro(f.g.ny);
    kernels::jacobi_sweep(Backend::Serial, view, f.da, f.tau, f.b, f.a, s, rs);
    kernels::jacobi_sweep(Backend::OpenMP, view, f.da, f.tau, f.b, f.a, o, ro);
    CHECK(same_bits(s, o));
    CHECK(rs == ro);
  }
  SUBCASE("red_black_sweep") {
    std::vector<cplx> s = f.a, o = f.a;
    std::vector<double> rs(f.g.ny), ro(f.g.ny);
    for (int color : {0, 1, 0, 1}) {
      kernels::red_black_sweep(Backend::Serial, view, f.da, f.tau, f.b, s, color, rs);
      kernels::red_black_sweep(Backend::OpenMP, view, f.da, f.tau, f.b, o, color, ro);
    }
    CHECK(same_bits(s, o));
    CHECK(rs == ro);
  }
  SUBCASE("row_norms") {
    std::vector<double> rs(f.g.ny), ro(f.g.ny);
    kernels::row_norms(Backend::Serial, f.g.nx, f.g.ny, f.a, rs);
    kernels::row_norms(Backend::OpenMP, f.g.nx, f.g.ny, f.a, ro);
    CHECK(rs == ro);
  }
  SUBCASE("magnetic_shift") {
    const gauge::FluxConfig cfg({{{20.0, 18.0}, 0.37}});
    std::vector<cplx> s(n), o(n);
    kernels::magnetic_shift(Backend::Serial, f.g, cfg, 3, -2, f.a, s);
    kernels::magnetic_shift(Backend::OpenMP, f.g, cfg, 3, -2, f.a, o);
    CHECK(same_bits(s, o));
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("red-black sweep updates one colour only") {
  Fixture f;
  std::vector<cplx> x = f.a;
  std::vector<double> rows(f.g.ny);
  kernels::red_black_sweep(Backend::Serial, f.h.view(), f.da, f.tau, f.b, x, 0, rows);
  for (int j = 0; j < f.g.ny; ++j) {
    for (int i = 0; i < f.g.nx; ++i) {
      const std::size_t p = f.g.index(i, j);
      if ((i + j) % 2 == 1) CHECK(x[p] == f.a[p]);
    }
  }
}

TEST_CASE("kernel argument checks") {
  Fixture f;
  std::vector<double> rows(f.g.ny);
  std::vector<cplx> x = f.a;
  CHECK_THROWS_AS(kernels::red_black_sweep(Backend::Serial, f.h.view(), f.da, f.tau, f.b, x, 2, rows), Error);
  std::vector<cplx> small(10);
  CHECK_THROWS_AS(kernels::apply_hamiltonian(Backend::OpenMP, f.h.view(), f.a, small), Error);
}
