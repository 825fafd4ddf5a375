#include <doctest.h>

#include <random>

#include "ablab/config.hpp"
#include "ablab/errors.hpp"
#include "ablab/io.hpp"

using namespace ablab;
using namespace ablab::config;

namespace {

bool logged(const Config& c, std::string_view needle) {
  for (const auto& l : c.log) {
    if (l.find(needle) != std::string::npos) return true;
  }
  return false;
}

Error error_of(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::InvalidArgument, "");
}

}  // namespace

TEST_CASE("empty text gives logged defaults") {
  const Config c = parse_config("");
  CHECK(c.grid.nx == 384);
  CHECK(c.grid.ny == 768);
  CHECK(c.sweep.delta_alpha.size() == 6);
  CHECK(c.sweep.delta_alpha[1].exact == Rational(1, 4));
  CHECK(c.eigen.ladder == std::vector<int>{64, 128, 256, 512, 1024});
  CHECK(c.commutator.cases == weyl::default_commutator_cases());
  CHECK(logged(c, "default: [grid].nx = 384"));
  CHECK(logged(c, "default: [eigen].ladder"));
  CHECK(c.fluxes.empty());
}

TEST_CASE("rational and decimal alpha values") {
  const Config c = parse_config("[flux]\ncenter = 10.5184, 20.5156\nalpha = 1/2\n[flux]\ncenter = -3.4816, 2.5156\nalpha = 0.3\n");
  REQUIRE(c.fluxes.size() == 2);
  CHECK(c.fluxes[0].alpha.is_exact);
  CHECK(c.fluxes[0].alpha.exact == Rational(1, 2));
  CHECK(c.fluxes[0].alpha.value == 0.5);
  CHECK_FALSE(c.fluxes[1].alpha.is_exact);
  CHECK(c.fluxes[1].alpha.value == 0.3);
  CHECK(logged(c, "warning:"));
  CHECK(c.flux_config().lines().size() == 2);
}

TEST_CASE("flux on a grid line cites the offset rule") {
  const Error e = error_of("[flux]\ncenter = 10, 20.5156\nalpha = 1/2\n");
  CHECK(e.code() == ErrorCode::RangeError);
  const std::string what = e.what();
  CHECK(what.find("line 2") != std::string::npos);
  CHECK(what.find("1/sqrt(2931)") != std::string::npos);
}

TEST_CASE("schema errors carry line and field") {
  struct Bad {
    const char* text;
    const char* needle;
  };
  for (const Bad& b : {Bad{"[grid]\nnx = 10x\n", "line 2"}, Bad{"[grid]\n\n\nfoo = 1\n", "line 4"},
                       Bad{"[nowhere]\n", "line 1"}, Bad{"[grid]\nnx = 100\nnx = 200\n", "line 3"},
                       Bad{"[grid]\n[grid]\n", "line 2"}, Bad{"[grid]\nnx\n", "line 2"},
                       Bad{"[sweep]\nmode = sideways\n", "[sweep].mode"},
                       Bad{"[flux]\nchamber = C\nalpha = 0\n", "[flux].chamber"},
                       Bad{"[flux]\nchamber = A\nalpha = 0.5\n", "[flux].alpha"},
                       Bad{"[grid]\norigin = 1\n", "[grid].origin"}}) {
    CAPTURE(b.text);
    const Error e = error_of(b.text);
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find(b.needle) != std::string::npos);
  }
}

TEST_CASE("range errors") {
  CHECK(error_of("[grid]\nh = 0\n").code() == ErrorCode::RangeError);
  CHECK(error_of("[sweep]\nworkers = 0\n").code() == ErrorCode::RangeError);
  CHECK(error_of("[eigen]\nx_min = 3\n").code() == ErrorCode::RangeError);
}

TEST_CASE("comments and chamber fluxes feed the scenario") {
  const Config c = parse_config(
      "# leading comment\n[flux]   # trailing\nchamber = A\nalpha = 1/4\n[flux]\nchamber = B\nalpha = 3/4 # note\n");
  const auto p = c.scenario_params();
  CHECK(p.alpha_a == Rational(1, 4));
  CHECK(p.alpha_b == Rational(3, 4));
  CHECK_FALSE(p.flux_a_center.has_value());
}

TEST_CASE("round trip") {
  SUBCASE("defaults") {
    const Config c = parse_config("");
    CHECK(parse_config(emit_config(c)) == c);
  }
  SUBCASE("shipped configs") {
    for (const char* name : {"example.conf", "commutator_default.conf"}) {
      const Config c = parse_config(io::read_text_file(std::string(ABLAB_SOURCE_DIR) + "/configs/" + name));
      const std::string once = emit_config(c);
      CHECK(parse_config(once) == c);
      CHECK(emit_config(parse_config(once)) == once);
    }
  }
  SUBCASE("random configs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> small(1, 9);
    for (int trial = 0; trial < 50; ++trial) {
      Config c = parse_config("");
      c.log.clear();
      c.grid.nx = 16 + small(rng) * 10;
      c.grid.h = 0.25 * small(rng);
      c.gauge.quadrature_step = 0.01 + u(rng);
      c.geometry.slit_width = 1.0 + 10.0 * u(rng);
      c.source.wave_number = u(rng) + 0.1;
      c.evolution.dt = u(rng);
      c.sweep.delta_alpha.clear();
      for (int k = 0; k < small(rng); ++k) {
        c.sweep.delta_alpha.push_back(k % 2 ? AlphaValue::of(Rational(small(rng) - 5, small(rng)))
                                            : AlphaValue::of_double(4.0 * u(rng) - 2.0));
      }
      c.sweep.mode = trial % 2 ? experiment::Mode::Superseparability : experiment::Mode::StandardQM;
      c.sweep.seed = rng();
      c.commutator.cases.resize(1 + trial % 5);
      c.eigen.lambda_im = u(rng) - 0.5;
      c.eigen.ladder = {8 * small(rng), 64};
      PathEntry path;
      for (int k = 0; k < 3 + trial % 4; ++k) path.vertices.push_back({8.0 * u(rng), -8.0 * u(rng)});
      path.closed = trial % 3 != 0;
      c.paths = {path};
      const double h = c.grid.h;
      FluxEntry f;
      f.center = Vec2{(small(rng) + 0.5 + 1e-2) * h, (small(rng) + 0.25) * h};
      f.alpha = AlphaValue::of(Rational(small(rng), 3));
      c.fluxes = {f};
      const Config back = parse_config(emit_config(c));
      CHECK(back == c);
    }
  }
}
