#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "ablab/errors.hpp"
#include "ablab/evolve.hpp"

using namespace ablab;
using namespace ablab::evolve;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexField random_field(const Grid2D& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ComplexField f(g);
  for (auto& v : f.values) v = {n(rng), n(rng)};
  return f;
}

double width_x(const ComplexField& psi) {
  const Grid2D& g = psi.grid;
  double m = 0, mx = 0, sx = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = std::norm(psi.at(i, j));
      m += w;
      mx += w * g.node(i, j).x;
    }
  mx /= m;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) sx += std::norm(psi.at(i, j)) * std::pow(g.node(i, j).x - mx, 2);
  return std::sqrt(sx / m);
}

}  // namespace

TEST_CASE("gaussian at rest is real, positive and normalised") {
  const Grid2D g{64, 64, 1.0, 1.0, {0.0, 0.0}};
  const ComplexField psi = init_gaussian(g, {32.0, 32.0}, 6.0, {0.0, 0.0});
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& v : psi.values) {
    CHECK(v.imag() == 0.0);
    CHECK(v.real() > 0.0);
  }
}

TEST_CASE("gaussian carries the requested momentum") {
  // spectral oracle: plain DFT along x, <k> = sum k |psi_hat|^2 / sum |psi_hat|^2
  const int n = 64;
  const Grid2D g{n, n, 1.0, 1.0, {0.0, 0.0}};
  const double k0 = 0.6;
  const ComplexField psi = init_gaussian(g, {32.0, 32.0}, 8.0, {k0, 0.0});
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) {
      const double k = 2.0 * kPi * (m < n / 2 ? m : m - n) / n;
      cplx s{};
      for (int i = 0; i < n; ++i) s += psi.at(i, j) * std::polar(1.0, -k * i);
      num += k * std::norm(s);
      den += std::norm(s);
    }
  }
  CHECK(num / den == doctest::Approx(k0).epsilon(0.01));
}

TEST_CASE("packet preconditions") {
  const Grid2D g{64, 64, 1.0, 1.0, {0.0, 0.0}};
  try {
    (void)init_gaussian(g, {32.0, 32.0}, 2.0, {0.0, 0.0});
    FAIL("expected PacketTooNarrow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PacketTooNarrow);
  }
  try {
    (void)init_gaussian(g, {5.0, 32.0}, 6.0, {0.0, 0.0});
    FAIL("expected PacketOffGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PacketOffGrid);
  }
}

TEST_CASE("stencil link phases and plaquettes") {
  const Grid2D g = grid_with_flux_in_cell(24, 24, 1.0, 1.0, {0.0, 0.0}, 11, 12);
  EvolutionParams p;
  p.dt = 0.25;
  SUBCASE("no flux: all hops exactly 1") {
    const auto h = build_hamiltonian_stencil(p, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(h.link_x[k] == cplx{1.0, 0.0});
      CHECK(h.link_y[k] == cplx{1.0, 0.0});
    }
  }
  SUBCASE("plaquette holonomy follows the winding oracle") {
    const double alpha = 0.37;
    p.cfg = gauge::FluxConfig({{{0.0, 0.0}, alpha}});
    const auto h = build_hamiltonian_stencil(p, g);
    double worst = 0.0;
    for (int j = 0; j + 1 < g.ny; ++j) {
      for (int i = 0; i + 1 < g.nx; ++i) {
        const std::vector<Vec2> sq{g.node(i, j), g.node(i + 1, j), g.node(i + 1, j + 1), g.node(i, j + 1)};
        const int w = oracle::crossing_winding(sq, {0.0, 0.0});
        const cplx expect = std::polar(1.0, -2.0 * kPi * alpha * w);
        worst = std::max(worst, std::abs(h.plaquette_holonomy(i, j) - expect));
      }
    }
    CHECK(worst < 1e-12);
  }
  SUBCASE("flux on a link is rejected") {
    p.cfg = gauge::FluxConfig({{g.node(3, 4) + Vec2{0.5, 0.0}, 0.5}});
    try {
      (void)build_hamiltonian_stencil(p, g);
      FAIL("expected FluxOnLink");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FluxOnLink);
    }
  }
}

TEST_CASE("hamiltonian is hermitian without absorber") {
  const Grid2D g = grid_with_flux_in_cell(32, 28, 1.0, 1.0, {0.0, 0.0}, 15, 13);
  EvolutionParams p;
  p.dt = 0.25;
  p.cfg = gauge::FluxConfig({{{0.0, 0.0}, 0.61}});
  p.potential = RealField(g, 0.0);
  for (int i = 0; i < g.nx; ++i) p.potential.at(i, 3) = 50.0;
  const auto h = build_hamiltonian_stencil(p, g);
  const auto phi = random_field(g, 1), psi = random_field(g, 2);
  const cplx l = inner_product(phi, apply_hamiltonian(h, psi));
  const cplx r = std::conj(inner_product(psi, apply_hamiltonian(h, phi)));
  CHECK(std::abs(l - r) < 1e-12 * std::abs(l));
}

TEST_CASE("stationary state evolves by a pure phase") {
  // dense diagonalisation on 32x32 as the eigen-oracle
  const Grid2D g = grid_with_flux_in_cell(32, 32, 1.0, 1.0, {0.0, 0.0}, 15, 15);
  EvolutionParams p;
  p.dt = 0.25;
  p.cfg = gauge::FluxConfig({{{0.0, 0.0}, 0.3}});
  p.potential = RealField(g, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 r = g.node(i, j);
      p.potential.at(i, j) = 0.002 * (r.x * r.x + r.y * r.y);
    }
  const auto h = build_hamiltonian_stencil(p, g);
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXcd m(n, n);
  ComplexField e(g);
  for (Eigen::Index c = 0; c < n; ++c) {
    std::fill(e.values.begin(), e.values.end(), cplx{});
    e.values[c] = 1.0;
    const auto col = apply_hamiltonian(h, e);
    for (Eigen::Index r = 0; r < n; ++r) m(r, c) = col.values[r];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  REQUIRE(es.info() == Eigen::Success);
  ComplexField psi(g);
  for (Eigen::Index r = 0; r < n; ++r) psi.values[r] = es.eigenvectors()(r, 0);
  const double s = 1.0 / std::sqrt(psi.norm_squared());
  for (auto& v : psi.values) v *= s;
  const ComplexField psi0 = psi;
  Propagator prop(p, g);
  for (int k = 0; k < 40; ++k) prop.advance(psi);
  CHECK(std::abs(inner_product(psi0, psi)) > 1.0 - 1e-8);
}

TEST_CASE("free gaussian spreads as in closed form") {
  const Grid2D g{160, 160, 1.0, 1.0, {0.0, 0.0}};
  EvolutionParams p;
  p.dt = 0.25;
  const double s0 = 8.0;
  ComplexField psi = init_gaussian(g, {80.0, 80.0}, s0, {0.0, 0.0});
  Propagator prop(p, g);
  const int steps = 480;
  for (int k = 0; k < steps; ++k) prop.advance(psi);
  const double expect = oracle::free_gaussian_width(s0, p.mass, steps * p.dt);
  CHECK(std::abs(width_x(psi) / expect - 1.0) < 5e-3);
}

TEST_CASE("norm is conserved without absorber") {
  const Grid2D g = grid_with_flux_in_cell(64, 64, 1.0, 1.0, {0.0, 0.0}, 40, 40);
  EvolutionParams p;
  p.dt = 0.25;
  p.cfg = gauge::FluxConfig({{{0.0, 0.0}, 0.5}});
  ComplexField psi = init_gaussian(g, g.node(24, 24), 6.0, {0.4, 0.3});
  const double n0 = psi.norm_squared();
  Propagator prop(p, g);
  for (int k = 0; k < 1000; ++k) prop.advance(psi);
  CHECK(std::abs(psi.norm_squared() - n0) < 1e-10);
}

TEST_CASE("absorber only removes norm") {
  const Grid2D g{64, 64, 1.0, 1.0, {0.0, 0.0}};
  EvolutionParams p;
  p.dt = 0.25;
  p.absorber.strength = tune_absorber_strength(1.0, 1.0, 1.0, 12);
  CHECK(absorber_reflection(1.0, 1.0, 1.0, 12, p.absorber.strength) < 1e-4);
  for (double w : p.absorber.profile(g).values) CHECK(w >= 0.0);
  ComplexField psi = init_gaussian(g, {32.0, 32.0}, 5.0, {1.0, 0.0});
  Propagator prop(p, g);
  double last = psi.norm_squared();
  for (int k = 0; k < 200; ++k) {
    prop.advance(psi);
    const double now = psi.norm_squared();
    CHECK(now <= last + 1e-13);
    last = now;
  }
  CHECK(last < 0.5);
}

TEST_CASE("parameter validation") {
  const Grid2D g{32, 32, 1.0, 1.0, {0.0, 0.0}};
  EvolutionParams p;
  p.dt = 0.3;  // above 0.25 m h^2
  CHECK_THROWS_AS(p.validate(g), Error);
  p.dt = 0.25;
  p.potential = RealField(g, -1.0);
  CHECK_THROWS_AS(p.validate(g), Error);
  p.potential = {};
  p.absorber.strength = -0.1;
  CHECK_THROWS_AS(p.validate(g), Error);
}

TEST_CASE("solver reports divergence") {
  const Grid2D g{32, 32, 1.0, 1.0, {0.0, 0.0}};
  EvolutionParams p;
  p.dt = 0.25;
  p.max_iterations = 1;
  p.solver_tolerance = 1e-15;
  ComplexField psi = init_gaussian(g, {16.0, 16.0}, 4.0, {0.5, 0.0});
  Propagator prop(p, g);
  try {
    prop.advance(psi);
    FAIL("expected SolverDiverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverDiverged);
  }
}

TEST_CASE("jacobi and red-black reach the same state") {
  const Grid2D g = grid_with_flux_in_cell(48, 48, 1.0, 1.0, {0.0, 0.0}, 30, 30);
  EvolutionParams p;
  p.dt = 0.25;
  p.cfg = gauge::FluxConfig({{{0.0, 0.0}, 0.25}});
  ComplexField a = init_gaussian(g, g.node(20, 20), 5.0, {0.5, 0.2});
  ComplexField b = a;
  Propagator rb(p, g);
  p.solver = Solver::Jacobi;
  Propagator jac(p, g);
  for (int k = 0; k < 50; ++k) {
    rb.advance(a);
    jac.advance(b);
  }
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) d = std::max(d, std::abs(a.values[k] - b.values[k]));
  CHECK(d < 1e-9);
}

TEST_CASE("second order in dt") {
  const Grid2D g = grid_with_flux_in_cell(64, 64, 1.0, 1.0, {0.0, 0.0}, 48, 48);
  EvolutionParams p;
  p.cfg = gauge::FluxConfig({{{0.0, 0.0}, 0.25}});
  GaussianSpec src{g.node(24, 24), 5.0, 5.0, {0.5, 0.25}, &p.cfg};
  const ComplexField init = init_gaussian(g, src);
  std::vector<ComplexField> r;
  for (int k = 0; k < 3; ++k) {
    p.dt = 0.25 / (1 << k);
    Propagator prop(p, g);
    ComplexField psi = init;
    for (int s = 0; s < (24 << k); ++s) prop.advance(psi);
    r.push_back(psi);
  }
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t k = 0; k < init.values.size(); ++k) {
    d1 += std::norm(r[0].values[k] - r[1].values[k]);
    d2 += std::norm(r[1].values[k] - r[2].values[k]);
  }
  const double ratio = std::sqrt(d1 / d2);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("closed box: nothing reaches the detector and the books balance") {
  const Grid2D g{64, 64, 1.0, 1.0, {0.0, 0.0}};
  EvolutionParams p;
  p.dt = 0.25;
  p.absorber.strength = tune_absorber_strength(1.0, 1.0, 1.0, 8);
  p.absorber.width_cells = 8;
  p.potential = RealField(g, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 30; i < 36; ++i) p.potential.at(i, j) = 5000.0;
  const ComplexField psi = init_gaussian(g, {16.0, 32.0}, 4.0, {1.0, 0.0});
  const auto r = run_to_detector(psi, p, {{44.0, 50.0}, {44.0, 14.0}}, 60.0);
  CHECK(r.segment_flux < 1e-6 * r.initial_norm);
  for (double v : r.intensity) CHECK(std::abs(v) < 1e-6);
  CHECK(std::abs(r.conservation_defect()) < 1e-6);
  CHECK(r.arclength.front() == 0.0);
  CHECK(r.arclength.back() == doctest::Approx(36.0));
}

TEST_CASE("open field: detector flux accounts for the packet") {
  const Grid2D g{96, 64, 1.0, 1.0, {0.0, 0.0}};
  EvolutionParams p;
  p.dt = 0.25;
  p.absorber.width_cells = 10;
  p.absorber.strength = tune_absorber_strength(1.0, 1.0, 1.0, 10);
  const ComplexField psi = init_gaussian(g, {30.0, 32.0}, 5.0, {1.0, 0.0});
  const auto r = run_to_detector(psi, p, {{60.0, 52.0}, {60.0, 12.0}}, 70.0);
  CHECK(std::abs(r.conservation_defect()) < 1e-6);
  CHECK(r.segment_flux > 0.9);
}
