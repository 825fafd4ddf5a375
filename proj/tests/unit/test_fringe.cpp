#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ablab/errors.hpp"
#include "ablab/fringe.hpp"

using namespace ablab;
using namespace ablab::experiment;

namespace {

constexpr double kPi = std::numbers::pi;

struct Profile {
  std::vector<double> s, i;
};

Profile synthetic(double v, double phi, double k, double noise = 0.0, std::uint64_t seed = 1) {
  Profile p;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  for (int t = 0; t <= 200; ++t) {
    const double s = t;
    const double env = 1.0 + 0.002 * s - 6e-6 * s * s;
    p.s.push_back(s);
    p.i.push_back(env * (1.0 + v * std::cos(k * s + phi)) + (noise > 0.0 ? n(rng) : 0.0));
  }
  return p;
}

double phase_gap(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace

TEST_CASE("noise-free profile is recovered") {
  const auto p = synthetic(0.5, 1.2, 0.3);
  const auto f = fringe_fit(p.s, p.i);
  CHECK(f.visibility == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(phase_gap(f.phase, 1.2) < 1e-6);
  CHECK(f.k == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(f.residual < 1e-8);
  CHECK_FALSE(f.degenerate);
}

TEST_CASE("phase shifts track the model") {
  for (double phi : {-3.0, -1.0, 0.0, 2.0, 3.1}) {
    const auto f = fringe_fit(synthetic(0.8, phi, 0.25).s, synthetic(0.8, phi, 0.25).i);
    CHECK(phase_gap(f.phase, phi) < 1e-6);
  }
}

TEST_CASE("noisy profile stays close") {
  const auto p = synthetic(0.6, -0.7, 0.2, 0.01, 3);
  const auto f = fringe_fit(p.s, p.i);
  CHECK(f.visibility == doctest::Approx(0.6).epsilon(0.05));
  CHECK(phase_gap(f.phase, -0.7) < 0.05);
}

TEST_CASE("flat profile is degenerate") {
  std::vector<double> s, i;
  for (int t = 0; t <= 200; ++t) {
    s.push_back(t);
    i.push_back(1.0 + 0.001 * t);
  }
  FringeFitOptions opt;
  opt.fixed_k = 0.3;
  const auto f = fringe_fit(s, i, opt);
  CHECK(f.visibility < 1e-6);
  CHECK(f.degenerate);
}

TEST_CASE("fixed wavenumber is respected") {
  const auto p = synthetic(0.4, 0.5, 0.3);
  FringeFitOptions opt;
  opt.fixed_k = 0.3;
  const auto f = fringe_fit(p.s, p.i, opt);
  CHECK(f.k == 0.3);
  CHECK(phase_gap(f.phase, 0.5) < 1e-6);
}

TEST_CASE("wrap_phase maps into (-pi, pi]") {
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
  CHECK(wrap_phase(0.25) == 0.25);
}

TEST_CASE("bad input") {
  std::vector<double> s{0, 1, 2}, i{1, 1, 1};
  CHECK_THROWS_AS(fringe_fit(s, i), Error);
  const auto p = synthetic(0.5, 0.0, 0.3);
  std::vector<double> zero(p.s.size(), 0.0);
  CHECK_THROWS_AS(fringe_fit(p.s, zero), Error);
  std::vector<double> shorter(p.i.begin(), p.i.end() - 1);
  CHECK_THROWS_AS(fringe_fit(p.s, shorter), Error);
}
