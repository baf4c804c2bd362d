#pragma once

// Reference implementations written from the defining formulas, kept apart
// from the library code paths they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fput2d/dispersion.hpp"
#include "fput2d/fft.hpp"
#include "fput2d/grid.hpp"
#include "fput2d/lattice.hpp"
#include "fput2d/nls.hpp"

namespace oracle {

using fput2d::cplx;
using fput2d::ComplexGrid;
using fput2d::RealGrid;
inline constexpr double pi = 3.14159265358979323846;
inline const cplx I{0.0, 1.0};

// omega^2 = (2 - e^{-ik} - e^{ik}) + (2 - e^{-il} - e^{il})
inline double omega(double k, double l) {
  const cplx wx2 = 2.0 - std::exp(-I * k) - std::exp(I * k);
  const cplx wy2 = 2.0 - std::exp(-I * l) - std::exp(I * l);
  return std::sqrt((wx2 + wy2).real());
}

inline double omega_x2(double k) { return (2.0 - std::exp(-I * k) - std::exp(I * k)).real(); }

// Exact gradient and Hessian of omega from omega^2 = f(k) + f(l) with
// f'(k) = i e^{-ik} - i e^{ik}, f''(k) = e^{-ik} + e^{ik}.
struct Grad2 {
  double wk, wl, wkk, wkl, wll;
};
inline Grad2 omega_derivs(double k, double l) {
  const double w = omega(k, l);
  const double fk = (I * std::exp(-I * k) - I * std::exp(I * k)).real() / 2;
  const double fl = (I * std::exp(-I * l) - I * std::exp(I * l)).real() / 2;
  const double fkk = (std::exp(-I * k) + std::exp(I * k)).real() / 2;
  const double fll = (std::exp(-I * l) + std::exp(I * l)).real() / 2;
  Grad2 g;
  g.wk = fk / w;
  g.wl = fl / w;
  g.wkk = (fkk - g.wk * g.wk) / w;
  g.wll = (fll - g.wl * g.wl) / w;
  g.wkl = -g.wk * g.wl / w;
  return g;
}

struct Derivs {
  double wx, wy, wxx, wxy, wyy;
};

// Central differences of omega.
inline Derivs fd_derivs(double k, double l, double h = 1e-5) {
  Derivs d;
  d.wx = (omega(k + h, l) - omega(k - h, l)) / (2 * h);
  d.wy = (omega(k, l + h) - omega(k, l - h)) / (2 * h);
  const double hh = 1e-4;
  const double w = omega(k, l);
  d.wxx = (omega(k + hh, l) - 2 * w + omega(k - hh, l)) / (hh * hh);
  d.wyy = (omega(k, l + hh) - 2 * w + omega(k, l - hh)) / (hh * hh);
  d.wxy = (omega(k + hh, l + hh) - omega(k + hh, l - hh) - omega(k - hh, l + hh) + omega(k - hh, l - hh)) /
          (4 * hh * hh);
  return d;
}

// 3 wx^2 / (8 i w) + 3 wy^4 / (8 i wx^2 w); the v-strain coefficient scales
// by wx^2 / wy^2.
inline cplx gamma_a(double k, double l) {
  const double a = omega_x2(k), b = omega_x2(l), w = omega(k, l);
  return 3.0 * a / (8.0 * I * w) + 3.0 * b * b / (8.0 * I * a * w);
}
inline cplx gamma_b(double k, double l) { return gamma_a(k, l) * omega_x2(k) / omega_x2(l); }
inline cplx gamma_q(double k, double l) {
  const double a = omega_x2(k), b = omega_x2(l);
  return -3.0 * I * (a * a + b * b) / (2.0 * omega(k, l));
}

inline double kernel_n(double k1, double k2, double k3) {
  const cplx p = (std::exp(I * k1) - 1.0) * (std::exp(I * k2) - 1.0) * (std::exp(I * k3) - 1.0);
  return (p + std::conj(p)).real();
}

inline double kernel_n_closed(double k1, double k2, double k3) {
  const double k = k1 + k2 + k3;
  return 2 * (std::cos(k) - 1) * (1 - std::cos(k1) - std::cos(k2) - std::cos(k3)) -
         2 * std::sin(k) * (std::sin(k1) + std::sin(k2) + std::sin(k3));
}

// e^{3 i theta} amplitude of q from the second-order lattice equation with
// q = A e^{i theta} + c.c.: (omega(3k)^2 - 9 omega^2) a3 = N3 A^3.
inline cplx third_harmonic_q(double k, double l) {
  auto part = [](double x) {
    const cplx e = std::exp(I * x) - 1.0;
    return e * e * e * (1.0 - std::exp(-3.0 * I * x));
  };
  const cplx n3 = -(part(k) + part(l));
  const double w = omega(k, l), w3 = omega(3 * k, 3 * l);
  return n3 / (w3 * w3 - 9 * w * w);
}

// Site-by-site force balance with explicit periodic neighbours.
inline RealGrid rhs_displacement(const RealGrid& q, const std::function<double(double)>& wprime) {
  const std::size_t n = q.side();
  RealGrid out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
      const double c = q(i, j);
      out(i, j) = wprime(q.wrapped(ii + 1, jj) - c) - wprime(c - q.wrapped(ii - 1, jj)) +
                  wprime(q.wrapped(ii, jj + 1) - c) - wprime(c - q.wrapped(ii, jj - 1));
    }
  return out;
}

// Naive 2D DFT, same sign convention as Fft2::forward.
inline ComplexGrid dft(const ComplexGrid& f) {
  const std::size_t n = f.side();
  ComplexGrid out(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      cplx s = 0;
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t p = 0; p < n; ++p)
          s += f(m, p) * std::exp(-2.0 * pi * I * static_cast<double>(a * m + b * p) / static_cast<double>(n));
      out(a, b) = s;
    }
  return out;
}

// Free anisotropic Schrodinger flow dA/dT = -(i/2) grad^T H grad A of
// a exp(-(X^2 + Y^2) / sigma^2) on R^2, via the eigenbasis of H: each
// principal axis evolves as a 1D Gaussian with complex width.
inline cplx free_gaussian(const fput2d::Mat2& h, double a, double sigma, double x, double y, double t) {
  const double tr = h.xx + h.yy, det = h.xx * h.yy - h.xy * h.xy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
  double e1x, e1y;
  if (std::abs(h.xy) > 1e-15) {
    e1x = h.xy;
    e1y = l1 - h.xx;
  } else if (h.xx >= h.yy) {
    e1x = 1;
    e1y = 0;
  } else {
    e1x = 0;
    e1y = 1;
  }
  const double nrm = std::hypot(e1x, e1y);
  e1x /= nrm;
  e1y /= nrm;
  const double xi = e1x * x + e1y * y, eta = -e1y * x + e1x * y;
  // dA/dT = i beta A'' with beta = -lambda / 2: width^2 -> sigma^2 + 4 i beta T
  auto axis = [&](double lam, double s) {
    const cplx w2 = sigma * sigma + 4.0 * I * (-lam / 2.0) * t;
    return std::sqrt(sigma * sigma / w2) * std::exp(-s * s / w2);
  };
  return a * axis(l1, xi) * axis(l2, eta);
}

// Classical RK4 on the Fourier-truncated system dA^/dT = (i/2) K^T H K A^ +
// F[g |A|^2 A], Nyquist wavenumbers set to zero.
inline ComplexGrid rk4_nls(ComplexGrid a, double box, const fput2d::Mat2& h, cplx g, double t_end, double step) {
  const std::size_t m = a.side();
  fput2d::Fft2 fft(m);
  std::vector<double> kv(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto s = fput2d::signed_index(j, m);
    kv[j] = (2 * s == -static_cast<std::ptrdiff_t>(m)) ? 0.0 : 2 * pi * static_cast<double>(s) / box;
  }
  auto rhs = [&](const ComplexGrid& f) {
    ComplexGrid lin = f;
    fft.forward(lin);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        lin(i, j) *= 0.5 * I * h.quadratic(kv[i], kv[j]) / static_cast<double>(m * m);
    fft.backward(lin);
    for (std::size_t k = 0; k < f.size(); ++k) lin[k] += g * std::norm(f[k]) * f[k];
    return lin;
  };
  auto axpy = [](const ComplexGrid& x, double s, const ComplexGrid& y) {
    ComplexGrid r = x;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += s * y[k];
    return r;
  };
  const auto steps = static_cast<std::size_t>(std::llround(t_end / step));
  for (std::size_t s = 0; s < steps; ++s) {
    const auto k1 = rhs(a);
    const auto k2 = rhs(axpy(a, step / 2, k1));
    const auto k3 = rhs(axpy(a, step / 2, k2));
    const auto k4 = rhs(axpy(a, step, k3));
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += step / 6 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return a;
}

inline double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs_diff(const RealGrid& a, const RealGrid& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(const RealGrid& a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// Smooth random displacement field: a few low Fourier modes.
inline fput2d::LatticeState smooth_displacement(std::size_t n, double amp, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto s = fput2d::LatticeState::displacement(n);
  for (int mode = 0; mode < 6; ++mode) {
    const int kx = static_cast<int>(gen() % 4), ky = static_cast<int>(gen() % 4);
    const double a = u(gen), b = u(gen), phase = pi * u(gen), vphase = pi * u(gen);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double th = 2 * pi * (kx * static_cast<double>(i) + ky * static_cast<double>(j)) / static_cast<double>(n);
        s.q(i, j) += amp / 6 * a * std::cos(th + phase);
        s.w(i, j) += amp / 6 * b * std::sin(th + vphase);
      }
  }
  return s;
}

inline fput2d::LatticeState random_displacement(std::size_t n, double amp, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  auto s = fput2d::LatticeState::displacement(n);
  for (auto& x : s.q) x = u(gen);
  for (auto& x : s.w) x = u(gen);
  return s;
}

}  // namespace oracle
