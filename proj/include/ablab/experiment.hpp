#pragma once

// Two-chamber "noninterferometer" on the grid.
//
// A broad packet moving along +x hits a wall slab pierced by two straight
// passages. The upper passage and the upper half of the divider between the
// passages form chamber A, the lower ones chamber B. Flux line A sits inside
// the divider's upper half and flux line B inside its lower half, so the two
// beam paths enclose both lines between them and the relative AB phase of the
// paths is 2 pi (alpha_A + alpha_B). The sweep keeps alpha_A fixed and sets
// alpha_B = alpha_A + delta_alpha, so the fringes move by 2 pi delta_alpha
// (plus the constant 4 pi alpha_A). The detector is a vertical line behind the
// slab, traversed from the A side to the B side.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ablab/evolve.hpp"
#include "ablab/fringe.hpp"
#include "ablab/gauge.hpp"
#include "ablab/rational.hpp"

namespace ablab::experiment {

enum class Mode { StandardQM, Superseparability };
std::string_view to_string(Mode m) noexcept;
/// "standard" / "standard-qm" / "superseparability"; InvalidArgument otherwise.
Mode parse_mode(std::string_view text);

enum class Species { Deuteron, AlphaParticle };
std::string_view to_string(Species s) noexcept;
/// "deuteron" / "alpha" / "alpha-particle"; InvalidArgument otherwise.
Species parse_species(std::string_view text);

struct SpeciesChargeRule {
  Species species{Species::Deuteron};
  int charge_multiple{1};  // |q| / e

  static SpeciesChargeRule of(Species s);
};

/// Flux quantised as 2 e Phi = 2 pi n gives alpha = charge_multiple * n / 2,
/// so delta_alpha = charge_multiple * (n_B - n_A) / 2.
Rational quantized_delta_alpha(std::int64_t n_a, std::int64_t n_b, const SpeciesChargeRule& rule);

/// Axis-aligned closed rectangle [x0, x1] x [y0, y1].
struct Rect {
  std::string name;
  double x0{0.0};
  double y0{0.0};
  double x1{0.0};
  double y1{0.0};

  bool contains(Vec2 p, double tol = 1e-9) const noexcept;
  bool interior_contains(Vec2 p) const noexcept;
  bool interiors_overlap(const Rect& o) const noexcept;
  gauge::Polyline outline() const;  // counter-clockwise
  bool operator==(const Rect&) const = default;
};

struct NoninterferometerParams {
  int nx{384};
  int ny{768};
  double h{1.0};
  double mass{1.0};
  double wave_number{1.0};       // kinetic momentum of the beam along +x
  double source_x{80.0};
  double source_width_x{12.0};
  double source_width_y{40.0};
  double barrier_x{130.0};       // left face of the wall slab
  double passage_length{24.0};   // slab thickness
  double slit_width{8.0};
  double slit_separation{40.0};  // centre to centre
  double chamber_wall{8.0};      // outer wall strip counted as part of each chamber
  double detector_distance{196.0};  // from the slab's right face
  double detector_length{200.0};
  Rational alpha_a{0};
  Rational alpha_b{0};
  std::optional<Vec2> flux_a_center;  // default: inside the divider's upper half
  std::optional<Vec2> flux_b_center;
  Mode mode{Mode::StandardQM};
  double wall_factor{1e4};       // wall height in units of k^2 / (2 m)
  int absorber_width{12};
  double absorber_strength{0.0};  // 0 selects the tuned value at wave_number
  double dt{0.0};                 // 0 selects stability_constant * m * h^2
  double t_max{0.0};              // 0 selects a transit-time estimate
  double solver_tolerance{1e-13};

  bool operator==(const NoninterferometerParams&) const = default;
};

struct ScenarioConfig {
  NoninterferometerParams params;  // as supplied
  Grid2D grid;
  std::vector<Rect> walls;
  Rect chamber_a;
  Rect chamber_b;
  Rect passage_a;
  Rect passage_b;
  gauge::FluxLine flux_a;
  gauge::FluxLine flux_b;
  evolve::GaussianSpec source;  // dress pointer unset; set per run
  evolve::Detector detector;
  evolve::EvolutionParams evolution;  // cfg and potential filled per run
  double wall_height{0.0};
  double t_max{0.0};
  Mode mode{Mode::StandardQM};
  double y_mid{0.0};  // divider centre line
  std::vector<std::string> tags;
};

/// GeometryOverlap if regions that must be disjoint intersect (passages,
/// chambers, source or detector inside a chamber or wall, grid too small);
/// FluxOutsideChamber if a flux line is not strictly inside its chamber.
ScenarioConfig build_noninterferometer(const NoninterferometerParams& params);

enum class Block { None, PathA, PathB };  // which passage is closed by wall potential

RealField wall_potential(const ScenarioConfig& sc, Block block = Block::None);

struct ReferencePaths {
  gauge::Polyline path_a;   // source -> passage A -> detector midpoint
  gauge::Polyline path_b;
  gauge::Polyline midline;  // source -> along the divider centre -> detector midpoint
  gauge::Polyline loop_a;   // midline then path A backwards (closed)
  gauge::Polyline loop_b;   // path B then midline backwards (closed)
};
ReferencePaths reference_paths(const ScenarioConfig& sc);

struct JobKey {
  double alpha_a{0.0};
  double alpha_b{0.0};
  Block block{Block::None};
  auto operator<=>(const JobKey&) const = default;
};

/// One propagation from the source to t_max with the given fluxes.
evolve::DetectorResult run_job(const ScenarioConfig& sc, const JobKey& key,
                               kernels::Backend backend = kernels::Backend::OpenMP,
                               ComplexField* final_state = nullptr);

/// Coherent profile when delta_alpha is within integer_tolerance of an
/// integer, otherwise I_A + I_B.
std::vector<double> predict_superseparability(const std::vector<double>& path_a_profile,
                                              const std::vector<double>& path_b_profile,
                                              const std::vector<double>& coherent_profile,
                                              double delta_alpha, double integer_tolerance = 1e-9);

bool is_near_integer(double v, double tolerance) noexcept;

/// Bhattacharyya overlap sum sqrt(I_A I_B) / sqrt(sum I_A * sum I_B).
double profile_overlap(const std::vector<double>& a, const std::vector<double>& b);

struct FringeRecord {
  double delta_alpha{0.0};
  Mode mode{Mode::StandardQM};
  std::vector<double> arclength;
  std::vector<double> profile;
  double fitted_phase{0.0};
  double visibility{0.0};
  double fit_residual{0.0};
  double fringe_k{0.0};
  bool fit_degenerate{false};
  bool coherent{true};  // false when the record is an incoherent sum
  std::map<std::string, double> diagnostics;
};

struct SweepOptions {
  int workers{1};
  double integer_tolerance{1e-9};
  FringeFitOptions fit;
  /// Finished jobs to reuse instead of recomputing (same scenario only).
  const std::map<JobKey, evolve::DetectorResult>* reuse{nullptr};
};

struct SweepResult {
  std::vector<FringeRecord> records;  // in the order of the requested values
  std::map<JobKey, evolve::DetectorResult> jobs;
  double seconds{0.0};
};

/// Runs every distinct job the requested records need (concurrently up to
/// `workers`, results keyed so assembly does not depend on completion order)
/// and fits each record. Superseparability records at non-integer values are
/// fitted at the fringe wavenumber of the coherent run at the nearest integer.
SweepResult sweep_delta_alpha(const ScenarioConfig& scenario,
                              const std::vector<double>& delta_alpha_values,
                              const SweepOptions& options = {});

}  // namespace ablab::experiment
