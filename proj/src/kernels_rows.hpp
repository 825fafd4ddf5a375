#pragma once

// Per-row bodies shared by the serial and OpenMP kernel backends. Complex
// products are spelled out on real/imaginary parts so that no libgcc
// NaN-recovery path (__muldc3) is involved and both backends compile to the
// same arithmetic.

#include <cmath>

#include "ablab/kernels.hpp"

namespace ablab::kernels::rows {

struct C {
  double re;
  double im;
};

inline C load(const cplx& z) { return {z.real(), z.imag()}; }
inline cplx store(C z) { return {z.re, z.im}; }
inline C mul(C a, C b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline C mul_conj(C a, C b) { return {a.re * b.re + a.im * b.im, a.re * b.im - a.im * b.re}; }  // conj(a) b
inline C add(C a, C b) { return {a.re + b.re, a.im + b.im}; }
inline C sub(C a, C b) { return {a.re - b.re, a.im - b.im}; }
inline C scale(C a, double s) { return {a.re * s, a.im * s}; }
inline C div(C a, C b) {
  const double inv = 1.0 / (b.re * b.re + b.im * b.im);
  return {(a.re * b.re + a.im * b.im) * inv, (a.im * b.re - a.re * b.im) * inv};
}
inline double abs2(C a) { return a.re * a.re + a.im * a.im; }

// Hopping sum  tx [conj(Lx(p)) x(p+1) + Lx(p-1) x(p-1)] + ty [...]  (note: the
// off-diagonal part of H is minus this).
inline C hop_sum(const StencilView& h, int i, int j, const cplx* x) {
  const std::size_t p = static_cast<std::size_t>(j) * h.nx + i;
  C sx{0.0, 0.0};
  C sy{0.0, 0.0};
  if (i + 1 < h.nx) sx = add(sx, mul_conj(load(h.link_x[p]), load(x[p + 1])));
  if (i > 0) sx = add(sx, mul(load(h.link_x[p - 1]), load(x[p - 1])));
  if (j + 1 < h.ny) sy = add(sy, mul_conj(load(h.link_y[p]), load(x[p + h.nx])));
  if (j > 0) sy = add(sy, mul(load(h.link_y[p - h.nx]), load(x[p - h.nx])));
  return add(scale(sx, h.tx), scale(sy, h.ty));
}

// Interior variant: caller guarantees 0 < i < nx-1 and 0 < j < ny-1.
inline C hop_sum_interior(const StencilView& h, std::size_t p, const cplx* x) {
  const std::size_t nx = static_cast<std::size_t>(h.nx);
  C sx = add(mul_conj(load(h.link_x[p]), load(x[p + 1])), mul(load(h.link_x[p - 1]), load(x[p - 1])));
  C sy = add(mul_conj(load(h.link_y[p]), load(x[p + nx])), mul(load(h.link_y[p - nx]), load(x[p - nx])));
  return add(scale(sx, h.tx), scale(sy, h.ty));
}

template <class Body>
inline void for_each_in_row(const StencilView& h, int j, const cplx* x, Body&& body) {
  const bool interior_row = j > 0 && j + 1 < h.ny;
  const std::size_t base = static_cast<std::size_t>(j) * h.nx;
  body(base, hop_sum(h, 0, j, x));
  if (interior_row) {
    for (int i = 1; i + 1 < h.nx; ++i) body(base + i, hop_sum_interior(h, base + i, x));
  } else {
    for (int i = 1; i + 1 < h.nx; ++i) body(base + i, hop_sum(h, i, j, x));
  }
  body(base + h.nx - 1, hop_sum(h, h.nx - 1, j, x));
}

inline void apply_row(const StencilView& h, int j, const cplx* in, cplx* out) {
  for_each_in_row(h, j, in, [&](std::size_t p, C hop) {
    out[p] = store(sub(mul(load(h.diag[p]), load(in[p])), hop));
  });
}

// (I - i tau H) x = (2 - da) x + i tau * hop
inline void rhs_row(const StencilView& h, const cplx* da, double tau, int j, const cplx* in,
                    cplx* out) {
  for_each_in_row(h, j, in, [&](std::size_t p, C hop) {
    const C d = load(da[p]);
    const C two_minus{2.0 - d.re, -d.im};
    const C ihop{-tau * hop.im, tau * hop.re};
    out[p] = store(add(mul(two_minus, load(in[p])), ihop));
  });
}

// s = b - i tau O x = b + i tau * hop;  x_next = s / da;  r = s - da x.
inline double jacobi_row(const StencilView& h, const cplx* da, double tau, int j, const cplx* b,
                         const cplx* x, cplx* x_next) {
  double res = 0.0;
  for_each_in_row(h, j, x, [&](std::size_t p, C hop) {
    const C d = load(da[p]);
    const C s = add(load(b[p]), C{-tau * hop.im, tau * hop.re});
    x_next[p] = store(div(s, d));
    res += abs2(sub(s, mul(d, load(x[p]))));
  });
  return res;
}

inline double red_black_row(const StencilView& h, const cplx* da, double tau, int j, int color,
                           const cplx* b, cplx* x) {
  double res = 0.0;
  const std::size_t base = static_cast<std::size_t>(j) * h.nx;
  const bool interior_row = j > 0 && j + 1 < h.ny;
  auto update = [&](int i, C hop) {
    const std::size_t p = base + i;
    const C d = load(da[p]);
    const C s = add(load(b[p]), C{-tau * hop.im, tau * hop.re});
    res += abs2(sub(s, mul(d, load(x[p]))));
    x[p] = store(div(s, d));
  };
  int i = ((color - j) % 2 + 2) % 2;
  if (i == 0) {
    update(0, hop_sum(h, 0, j, x));
    i = 2;
  }
  for (; i + 1 < h.nx; i += 2) {
    update(i, interior_row ? hop_sum_interior(h, base + i, x) : hop_sum(h, i, j, x));
  }
  if (i == h.nx - 1) update(i, hop_sum(h, i, j, x));
  return res;
}

inline double norm_row(int nx, int j, const cplx* v) {
  double s = 0.0;
  const std::size_t base = static_cast<std::size_t>(j) * nx;
  for (int i = 0; i < nx; ++i) s += abs2(load(v[base + i]));
  return s;
}

inline void magnetic_shift_row(const Grid2D& g, const gauge::FluxConfig& cfg, int di, int dj, int j,
                               const cplx* in, cplx* out) {
  const std::size_t base = static_cast<std::size_t>(j) * g.nx;
  const int js = j + dj;
  for (int i = 0; i < g.nx; ++i) {
    const int is = i + di;
    if (is < 0 || is >= g.nx || js < 0 || js >= g.ny) {
      out[base + i] = cplx{0.0, 0.0};
      continue;
    }
    const cplx v = in[g.index(is, js)];
    if (v == cplx{0.0, 0.0}) {  // underflowed tails of localized probes
      out[base + i] = v;
      continue;
    }
    const double theta = gauge::segment_phase_unchecked(cfg, g.node(i, j), g.node(is, js));
    const C ph{std::cos(theta), std::sin(theta)};
    out[base + i] = store(mul(ph, load(v)));
  }
}

}  // namespace ablab::kernels::rows
