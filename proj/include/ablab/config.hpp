#pragma once

// Run configuration: sectioned key-value text.
//
//   # comment (also after values)
//   [grid]
//   nx = 384
//   [flux]            <- may repeat
//   center = 142.5, 392.5
//   alpha = 1/2
//
// Keys are unique inside a section except where a section documents a list
// key (commutator `case`). alpha-like values accept exact rationals "p/q";
// decimal floats are accepted with a warning in the log. See
// configs/example.conf for every section and key.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ablab/eigen.hpp"
#include "ablab/experiment.hpp"
#include "ablab/field.hpp"
#include "ablab/rational.hpp"
#include "ablab/weyl.hpp"

namespace ablab::config {

/// A dimensionless flux-like number kept exact when written as a rational.
struct AlphaValue {
  Rational exact;
  double value{0.0};
  bool is_exact{true};

  static AlphaValue of(Rational r) { return {r, r.to_double(), true}; }
  static AlphaValue of_double(double v);
  std::string str() const;
  bool operator==(const AlphaValue&) const = default;
};

struct FluxEntry {
  std::optional<Vec2> center;  // required unless chamber is set
  AlphaValue alpha;
  std::string chamber;         // "", "A" or "B"
  bool operator==(const FluxEntry&) const = default;
};

struct PathEntry {
  std::vector<Vec2> vertices;
  bool closed{true};
  bool operator==(const PathEntry&) const = default;
};

struct GridSection {
  int nx{384};
  int ny{768};
  double h{1.0};
  Vec2 origin{0.0, 0.0};
  bool operator==(const GridSection&) const = default;
};

struct GaugeSection {
  double singular_radius{1e-6};
  double quadrature_step{0.05};
  bool operator==(const GaugeSection&) const = default;
};

struct GeometrySection {
  double source_x{80.0};
  double barrier_x{130.0};
  double passage_length{24.0};
  double slit_width{8.0};
  double slit_separation{40.0};
  double chamber_wall{8.0};
  double detector_distance{196.0};
  double detector_length{200.0};
  double wall_factor{1e4};
  bool operator==(const GeometrySection&) const = default;
};

struct SourceSection {
  double mass{1.0};
  double wave_number{1.0};
  double width_x{12.0};
  double width_y{40.0};
  bool operator==(const SourceSection&) const = default;
};

struct EvolutionSection {
  double dt{0.0};      // 0: stability bound
  double t_max{0.0};   // 0: transit estimate
  int absorber_width{12};
  double absorber_strength{0.0};  // 0: tuned
  double solver_tolerance{1e-13};
  bool operator==(const EvolutionSection&) const = default;
};

struct SweepSection {
  std::vector<AlphaValue> delta_alpha;
  experiment::Mode mode{experiment::Mode::StandardQM};
  int workers{1};
  std::uint64_t seed{0};
  double integer_tolerance{1e-9};
  bool operator==(const SweepSection&) const = default;
};

struct CommutatorSection {
  int n{512};
  double h{1.0 / 32.0};
  std::vector<AlphaValue> alpha;
  std::vector<weyl::CommutatorCase> cases;  // alpha field unused
  int random_cases{0};                      // extra admissible cases drawn from the seed
  double probe_width{0.0};                  // 0: per-case default
  bool operator==(const CommutatorSection&) const;
};

struct EigenSection {
  double alpha{0.5};
  double lambda_re{1.0};
  double lambda_im{0.0};
  double amplitude{1.0};
  double profile_center{1.0};
  double profile_width{0.5};
  double x_min{-2.0};
  double x_max{2.0};
  double y_min{0.3};
  double dy{0.1};
  int rows{16};
  std::vector<int> ladder;  // points per unit length
  bool operator==(const EigenSection&) const = default;
};

struct Config {
  GridSection grid;
  GaugeSection gauge;
  std::vector<FluxEntry> fluxes;
  std::vector<PathEntry> paths;
  GeometrySection geometry;
  SourceSection source;
  EvolutionSection evolution;
  SweepSection sweep;
  CommutatorSection commutator;
  EigenSection eigen;

  /// Default substitutions and warnings, in order. Not part of equality.
  std::vector<std::string> log;

  bool operator==(const Config& o) const;

  Grid2D grid2d() const;
  gauge::FluxConfig flux_config() const;
  /// Scenario parameters from geometry/source/evolution, the grid and the
  /// chamber fluxes (alpha of chamber A and B; centres when given).
  experiment::NoninterferometerParams scenario_params() const;
  eigen::EigenSolutionSpec eigen_spec() const;
};

/// SchemaError (unknown section/key, malformed value, with line number and
/// field) or RangeError (invariant violations, e.g. a flux centre on a grid
/// line, citing the offset rule).
Config parse_config(std::string_view text);

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const Config& c);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace ablab::config
