#include <doctest.h>

#include <cmath>

#include "ablab/errors.hpp"
#include "ablab/experiment.hpp"

using namespace ablab;
using namespace ablab::experiment;

namespace {

// small mirror-symmetric layout: y_mid = 96, grid rows 0 .. 192
NoninterferometerParams small_params() {
  NoninterferometerParams p;
  p.nx = 160;
  p.ny = 193;
  p.source_x = 40.0;
  p.source_width_x = 6.0;
  p.source_width_y = 16.0;
  p.barrier_x = 70.0;
  p.passage_length = 8.0;
  p.slit_width = 4.0;
  p.slit_separation = 16.0;
  p.chamber_wall = 4.0;
  p.detector_distance = 60.0;
  p.detector_length = 64.0;
  return p;
}

ErrorCode code_of(const NoninterferometerParams& p) {
  try {
    (void)build_noninterferometer(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("default layout") {
  const ScenarioConfig sc = build_noninterferometer({});
  CHECK(sc.grid.nx == 384);
  CHECK(sc.grid.ny == 768);
  CHECK(sc.y_mid == 384.0);
  CHECK(sc.walls.size() == 3);
  CHECK(sc.chamber_a.interior_contains(sc.flux_a.center));
  CHECK(sc.chamber_b.interior_contains(sc.flux_b.center));
  CHECK(sc.flux_a.center.y > sc.passage_b.y1);
  CHECK(sc.flux_a.center.y < sc.passage_a.y0);
  CHECK_FALSE(sc.chamber_a.interiors_overlap(sc.chamber_b));
  CHECK(sc.detector.start.y - sc.detector.end.y == 200.0);
  CHECK(sc.tags.empty());
  // flux centres sit off grid lines
  for (double v : {sc.flux_a.center.x, sc.flux_a.center.y, sc.flux_b.center.x, sc.flux_b.center.y}) {
    CHECK(std::abs(v - std::round(v)) > 1e-3);
  }
}

TEST_CASE("wall potential covers walls and blocked passages") {
  const ScenarioConfig sc = build_noninterferometer(small_params());
  const RealField open = wall_potential(sc);
  const RealField blocked = wall_potential(sc, Block::PathA);
  const auto node_in = [&](const Rect& r) {
    const int i = static_cast<int>(std::round(0.5 * (r.x0 + r.x1)));
    const int j = static_cast<int>(std::round(0.5 * (r.y0 + r.y1)));
    return std::pair{i, j};
  };
  const auto [ia, ja] = node_in(sc.passage_a);
  const auto [ib, jb] = node_in(sc.passage_b);
  CHECK(open.at(ia, ja) == 0.0);
  CHECK(blocked.at(ia, ja) == sc.wall_height);
  CHECK(blocked.at(ib, jb) == 0.0);
  const auto [is, js] = node_in(sc.walls[1]);
  CHECK(open.at(is, js) == sc.wall_height);
  CHECK(open.at(10, 10) == 0.0);
}

TEST_CASE("geometry errors") {
  auto p = small_params();
  p.slit_width = 20.0;
  CHECK(code_of(p) == ErrorCode::GeometryOverlap);
  p = small_params();
  p.source_x = 60.0;
  CHECK(code_of(p) == ErrorCode::GeometryOverlap);
  p = small_params();
  p.detector_distance = 75.0;
  CHECK(code_of(p) == ErrorCode::GeometryOverlap);
  p = small_params();
  p.detector_distance = 60.5;
  CHECK(code_of(p) == ErrorCode::RangeError);
  p = small_params();
  p.flux_a_center = Vec2{40.5, 96.5};
  CHECK(code_of(p) == ErrorCode::FluxOutsideChamber);
  p = small_params();
  p.flux_b_center = Vec2{74.5, 100.5};  // in chamber A
  CHECK(code_of(p) == ErrorCode::FluxOutsideChamber);
  p = small_params();
  p.h = 0.0;
  CHECK(code_of(p) == ErrorCode::RangeError);
}

TEST_CASE("reference loops wind once around their own flux") {
  auto p = small_params();
  const ScenarioConfig sc = build_noninterferometer(p);
  const ReferencePaths r = reference_paths(sc);
  CHECK(gauge::winding_number(r.loop_a, sc.flux_a.center) != 0);
  CHECK(gauge::winding_number(r.loop_a, sc.flux_b.center) == 0);
  CHECK(gauge::winding_number(r.loop_b, sc.flux_b.center) != 0);
  CHECK(gauge::winding_number(r.loop_b, sc.flux_a.center) == 0);
  CHECK(std::abs(gauge::winding_number(r.loop_a, sc.flux_a.center)) == 1);
  CHECK(gauge::winding_number(r.loop_a, sc.flux_a.center) == gauge::winding_number(r.loop_b, sc.flux_b.center));
  CHECK_FALSE(r.path_a.closed);
}

TEST_CASE("equal nonzero fluxes carry the control tag") {
  auto p = small_params();
  p.alpha_a = Rational(1, 2);
  p.alpha_b = Rational(1, 2);
  const ScenarioConfig sc = build_noninterferometer(p);
  REQUIRE(sc.tags.size() == 1);
  CHECK(sc.tags[0] == "standard AB control");
}

TEST_CASE("superseparability prediction and overlap") {
  const std::vector<double> a{1, 2, 0}, b{0, 1, 3}, c{5, 5, 5};
  CHECK(predict_superseparability(a, b, c, 2.0) == c);
  CHECK(predict_superseparability(a, b, c, 0.5) == std::vector<double>{1, 3, 3});
  CHECK(predict_superseparability(a, b, c, 1.0 + 1e-12) == c);
  CHECK_THROWS_AS(predict_superseparability(a, {1}, c, 0.5), Error);
  CHECK(is_near_integer(-3.0, 0.0));
  CHECK_FALSE(is_near_integer(0.25, 1e-9));
  CHECK(profile_overlap(a, a) == doctest::Approx(1.0));
  CHECK(profile_overlap({1, 0}, {0, 1}) == 0.0);
  CHECK(profile_overlap({1, 1}, {1, 4}) == doctest::Approx(3.0 / std::sqrt(2.0 * 5.0)));
}

TEST_CASE("mode parsing") {
  CHECK(parse_mode("standard") == Mode::StandardQM);
  CHECK(parse_mode("superseparability") == Mode::Superseparability);
  CHECK(to_string(Mode::StandardQM) == "standard");
  CHECK_THROWS_AS(parse_mode("both"), Error);
}

TEST_CASE("small scenario: symmetry at zero flux, shift at one half") {
  const ScenarioConfig sc = build_noninterferometer(small_params());
  const auto zero = run_job(sc, {0.0, 0.0});
  const auto half = run_job(sc, {0.0, 0.5});
  const auto& i0 = zero.intensity;
  const std::size_t n = i0.size();
  REQUIRE(n == 65);
  double diff = 0.0, tot = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    diff += std::abs(i0[k] - i0[n - 1 - k]);
    tot += std::abs(i0[k]);
  }
  CHECK(diff / tot < 1e-2);
  CHECK(std::abs(zero.conservation_defect()) < 1e-6);
  // relative phase pi: the central bright fringe turns dark
  const std::size_t mid = n / 2;
  CHECK(half.intensity[mid] < 0.5 * i0[mid]);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s0 += i0[k];
    s1 += half.intensity[k];
  }
  CHECK(s1 == doctest::Approx(s0).epsilon(0.3));
}
