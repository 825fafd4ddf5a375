#pragma once

// Fringe observables from a detector intensity profile:
//
//   I(s) = P(s) * (1 + V cos(k s + phi)),
//
// P a low-order polynomial envelope. k is seeded from a periodogram of the
// detrended profile, (P, V, phi) from a linear least-squares fit at that k,
// and everything is then refined by Levenberg-Marquardt.

#include <optional>
#include <span>

namespace ablab::experiment {

struct FringeFitOptions {
  int envelope_degree{4};
  std::optional<double> fixed_k;  // keep the fringe wavenumber fixed at this value
  double k_min{0.0};              // periodogram search range; 0 selects 4 pi / length
  double k_max{0.0};              // 0 selects the Nyquist wavenumber
  int max_iterations{200};
};

struct FringeFit {
  double phase{0.0};       // phi in (-pi, pi]
  double visibility{0.0};  // V clamped to [0, 1]
  double k{0.0};           // fringe wavenumber (rad per length)
  double residual{0.0};    // ||I - model|| / ||I||
  bool degenerate{false};  // FitDegenerate: V not distinguishable from 0 at this residual
  bool clamped{false};     // V left [0, 1] before clamping
  int iterations{0};
};

/// Needs at least envelope_degree + 8 samples, strictly increasing s and a
/// profile that is not identically zero (InvalidArgument otherwise).
FringeFit fringe_fit(std::span<const double> s, std::span<const double> intensity,
                     const FringeFitOptions& options = {});

/// Wraps an angle to (-pi, pi].
double wrap_phase(double phi);

}  // namespace ablab::experiment
