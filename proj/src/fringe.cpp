#include "ablab/fringe.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "ablab/errors.hpp"

namespace ablab::experiment {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Internal parametrisation: u = (s - mid) / half in [-1, 1] for the envelope,
// fringe argument k (s - mid) + psi. phi = psi - k mid.
struct Model {
  int degree;
  bool free_k;
  double mid;
  double half;
  // params: c_0..c_degree, V, psi, [k]
  int size() const { return degree + 3 + (free_k ? 1 : 0); }
};

double envelope(const Model& m, const VectorXd& p, double u) {
  double e = 0.0;
  for (int i = m.degree; i >= 0; --i) e = e * u + p[i];
  return e;
}

double eval_residuals(const Model& m, const VectorXd& p, double k_fixed, std::span<const double> s,
                      std::span<const double> y, VectorXd& r, MatrixXd* jac) {
  const int n = static_cast<int>(s.size());
  const int iv = m.degree + 1, ipsi = m.degree + 2, ik = m.degree + 3;
  const double k = m.free_k ? p[ik] : k_fixed;
  r.resize(n);
  if (jac) jac->resize(n, m.size());
  double ss = 0.0;
  for (int t = 0; t < n; ++t) {
    const double x = s[t] - m.mid;
    const double u = x / m.half;
    const double env = envelope(m, p, u);
    const double arg = k * x + p[ipsi];
    const double c = std::cos(arg), sn = std::sin(arg);
    const double mod = 1.0 + p[iv] * c;
    r[t] = env * mod - y[t];
    ss += r[t] * r[t];
    if (jac) {
      double ui = 1.0;
      for (int i = 0; i <= m.degree; ++i, ui *= u) (*jac)(t, i) = ui * mod;
      (*jac)(t, iv) = env * c;
      (*jac)(t, ipsi) = -env * p[iv] * sn;
      if (m.free_k) (*jac)(t, ik) = -env * p[iv] * sn * x;
    }
  }
  return ss;
}

// Linear least squares for y ~ E(u) * (1 + A cos(kx) + B sin(kx)) written as
// E(u) + A E0(u) cos + B E0(u) sin with E0 a fixed envelope estimate.
void linear_seed(const Model& m, std::span<const double> s, std::span<const double> y, double k,
                 const VectorXd& env0, VectorXd& p) {
  const int n = static_cast<int>(s.size());
  const int d = m.degree;
  MatrixXd a(n, d + 3);
  VectorXd b(n);
  for (int t = 0; t < n; ++t) {
    const double x = s[t] - m.mid;
    const double u = x / m.half;
    double ui = 1.0;
    for (int i = 0; i <= d; ++i, ui *= u) a(t, i) = ui;
    const double e0 = envelope(m, env0, u);
    a(t, d + 1) = e0 * std::cos(k * x);
    a(t, d + 2) = e0 * std::sin(k * x);
    b[t] = y[t];
  }
  const VectorXd sol = a.colPivHouseholderQr().solve(b);
  p = VectorXd::Zero(m.size());
  for (int i = 0; i <= d; ++i) p[i] = sol[i];
  // V cos(kx + psi) = V cos(psi) cos(kx) - V sin(psi) sin(kx)
  const double ca = sol[d + 1], cb = sol[d + 2];
  double scale = 1.0;
  // amplitudes are relative to env0; re-express relative to the new envelope
  // at the centre so V starts near the right magnitude.
  const double e_new = envelope(m, p, 0.0), e_old = envelope(m, env0, 0.0);
  if (e_new != 0.0) scale = e_old / e_new;
  p[d + 1] = std::hypot(ca, cb) * scale;
  p[d + 2] = std::atan2(-cb, ca);
  if (m.free_k) p[d + 3] = k;
}

VectorXd polynomial_fit(const Model& m, std::span<const double> s, std::span<const double> y) {
  const int n = static_cast<int>(s.size());
  MatrixXd a(n, m.degree + 1);
  VectorXd b(n);
  for (int t = 0; t < n; ++t) {
    const double u = (s[t] - m.mid) / m.half;
    double ui = 1.0;
    for (int i = 0; i <= m.degree; ++i, ui *= u) a(t, i) = ui;
    b[t] = y[t];
  }
  VectorXd c = a.colPivHouseholderQr().solve(b);
  VectorXd p = VectorXd::Zero(m.size());
  p.head(m.degree + 1) = c;
  return p;
}

double periodogram(std::span<const double> s, const std::vector<double>& r, double mid, double k) {
  double re = 0.0, im = 0.0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    const double a = k * (s[t] - mid);
    re += r[t] * std::cos(a);
    im += r[t] * std::sin(a);
  }
  return re * re + im * im;
}

}  // namespace

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

FringeFit fringe_fit(std::span<const double> s, std::span<const double> intensity,
                     const FringeFitOptions& options) {
  const int n = static_cast<int>(s.size());
  if (intensity.size() != s.size()) throw Error(ErrorCode::InvalidArgument, "s/intensity size mismatch");
  if (options.envelope_degree < 0 || options.envelope_degree > 8) {
    throw Error(ErrorCode::InvalidArgument, "envelope degree must be in [0, 8]");
  }
  if (n < options.envelope_degree + 8) throw Error(ErrorCode::InvalidArgument, "too few profile samples");
  for (int t = 1; t < n; ++t) {
    if (!(s[t] > s[t - 1])) throw Error(ErrorCode::InvalidArgument, "s must be strictly increasing");
  }
  double norm2 = 0.0;
  for (double v : intensity) norm2 += v * v;
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw Error(ErrorCode::InvalidArgument, "profile is zero or not finite");
  }

  const double length = s[n - 1] - s[0];
  Model m{options.envelope_degree, !options.fixed_k.has_value(), 0.5 * (s[0] + s[n - 1]), 0.5 * length};

  // Envelope-only fit, detrended residual, periodogram peak.
  const VectorXd env0 = polynomial_fit(m, s, intensity);
  double k = options.fixed_k.value_or(0.0);
  if (m.free_k) {
    std::vector<double> rel(n);
    for (int t = 0; t < n; ++t) {
      const double e = envelope(m, env0, (s[t] - m.mid) / m.half);
      rel[t] = e != 0.0 ? intensity[t] / e - 1.0 : 0.0;
    }
    const double spacing = length / (n - 1);
    const double k_lo = options.k_min > 0.0 ? options.k_min : 4.0 * std::numbers::pi / length;
    const double k_hi = options.k_max > 0.0 ? options.k_max : std::numbers::pi / spacing;
    const double dk = std::numbers::pi / (8.0 * length);
    double best = -1.0;
    for (double kk = k_lo; kk <= k_hi; kk += dk) {
      const double v = periodogram(s, rel, m.mid, kk);
      if (v > best) {
        best = v;
        k = kk;
      }
    }
    // golden-section refinement inside the bracketing bins
    double lo = std::max(k_lo, k - dk), hi = std::min(k_hi, k + dk);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
      const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      if (periodogram(s, rel, m.mid, a) > periodogram(s, rel, m.mid, b)) hi = b;
      else lo = a;
    }
    k = 0.5 * (lo + hi);
  }

  VectorXd p;
  linear_seed(m, s, intensity, k, env0, p);

  // Levenberg-Marquardt with Marquardt diagonal scaling.
  VectorXd r;
  MatrixXd jac;
  double cost = eval_residuals(m, p, k, s, intensity, r, &jac);
  double lambda = 1e-3;
  FringeFit out;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it + 1;
    const MatrixXd jtj = jac.transpose() * jac;
    const VectorXd g = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      MatrixXd a = jtj;
      for (int i = 0; i < a.rows(); ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-300);
      const VectorXd delta = a.ldlt().solve(-g);
      const VectorXd trial = p + delta;
      VectorXd rt;
      const double ct = eval_residuals(m, trial, k, s, intensity, rt, nullptr);
      if (std::isfinite(ct) && ct < cost) {
        const double rel_drop = (cost - ct) / std::max(cost, 1e-300);
        p = trial;
        cost = eval_residuals(m, p, k, s, intensity, r, &jac);
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (rel_drop < 1e-15 || delta.norm() < 1e-14 * (1.0 + p.norm())) it = options.max_iterations;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved || cost <= 1e-30 * norm2) break;
  }

  const int iv = m.degree + 1, ipsi = m.degree + 2;
  double v = p[iv];
  double psi = p[ipsi];
  if (m.free_k) k = p[m.degree + 3];
  if (v < 0.0) {
    v = -v;
    psi += std::numbers::pi;
  }
  if (k < 0.0) {
    // cos(-k x + psi) = cos(k x - psi)
    k = -k;
    psi = -psi;
  }
  out.k = k;
  out.clamped = v > 1.0;
  out.visibility = std::min(v, 1.0);
  out.phase = wrap_phase(psi - k * m.mid);
  out.residual = std::sqrt(cost / norm2);
  out.degenerate = out.visibility <= 2.0 * out.residual;
  return out;
}

}  // namespace ablab::experiment
