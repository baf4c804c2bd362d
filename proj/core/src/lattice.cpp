#include "fput2d/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fput2d/errors.hpp"

namespace fput2d {

namespace {

using index_t = std::ptrdiff_t;

void require_form(const LatticeState& s, LatticeForm form) {
  if (s.form != form)
    throw Error(ErrorKind::FormMismatch, form == LatticeForm::displacement ? "displacement state required"
                                                                           : "strain state required");
}

void require_side(std::size_t n) {
  if (n < kMinLatticeSide) throw Error(ErrorKind::InvalidArgument, "lattice side must be at least 8");
}

inline std::size_t next(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }
inline std::size_t prev(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }

// Bond forces W'(s) for every x- and y-bond. The strain of the x-bond at
// (m, n) is sx(m, n); callers supply it either from u, v directly or by
// differencing q.
template <class StrainX, class StrainY>
void bond_forces(const ForceLaw& f, std::size_t n, StrainX sx, StrainY sy, RealGrid& fx, RealGrid& fy) {
  const index_t rows = static_cast<index_t>(n);
  switch (f.kind()) {
    case ForceKind::cubic_baseline:
#pragma omp parallel for schedule(static)
      for (index_t mi = 0; mi < rows; ++mi) {
        const auto m = static_cast<std::size_t>(mi);
        for (std::size_t j = 0; j < n; ++j) {
          const double a = sx(m, j);
          const double b = sy(m, j);
          fx(m, j) = a - a * a * a;
          fy(m, j) = b - b * b * b;
        }
      }
      break;
    case ForceKind::linear:
#pragma omp parallel for schedule(static)
      for (index_t mi = 0; mi < rows; ++mi) {
        const auto m = static_cast<std::size_t>(mi);
        for (std::size_t j = 0; j < n; ++j) {
          fx(m, j) = sx(m, j);
          fy(m, j) = sy(m, j);
        }
      }
      break;
    case ForceKind::perturbed:
#pragma omp parallel for schedule(static)
      for (index_t mi = 0; mi < rows; ++mi) {
        const auto m = static_cast<std::size_t>(mi);
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t k = m * n + j;
          const auto px = f.bond(0, k);
          const auto py = f.bond(1, k);
          const double a = sx(m, j);
          const double b = sy(m, j);
          fx(m, j) = px.c1 * a + px.c2 * a * a + px.c3 * (a * a * a);
          fy(m, j) = py.c1 * b + py.c2 * b * b + py.c3 * (b * b * b);
        }
      }
      break;
  }
}

void displacement_forces(const ForceLaw& f, const RealGrid& q, RealGrid& fx, RealGrid& fy) {
  const std::size_t n = q.side();
  bond_forces(
      f, n, [&](std::size_t m, std::size_t j) { return q(next(m, n), j) - q(m, j); },
      [&](std::size_t m, std::size_t j) { return q(m, next(j, n)) - q(m, j); }, fx, fy);
}

void strain_forces(const ForceLaw& f, const RealGrid& u, const RealGrid& v, RealGrid& fx, RealGrid& fy) {
  bond_forces(
      f, u.side(), [&](std::size_t m, std::size_t j) { return u(m, j); },
      [&](std::size_t m, std::size_t j) { return v(m, j); }, fx, fy);
}

// Net force on each site from its four bonds.
void site_balance(const RealGrid& fx, const RealGrid& fy, RealGrid& site) {
  const std::size_t n = fx.side();
  const index_t rows = static_cast<index_t>(n);
#pragma omp parallel for schedule(static)
  for (index_t mi = 0; mi < rows; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    const std::size_t mp = prev(m, n);
    for (std::size_t j = 0; j < n; ++j)
      site(m, j) = fx(m, j) - fx(mp, j) + fy(m, j) - fy(m, prev(j, n));
  }
}

// Strain accelerations are forward differences of the site accelerations.
void strain_from_site(const RealGrid& site, RealGrid& utt, RealGrid& vtt) {
  const std::size_t n = site.side();
  const index_t rows = static_cast<index_t>(n);
#pragma omp parallel for schedule(static)
  for (index_t mi = 0; mi < rows; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    const std::size_t mn = next(m, n);
    for (std::size_t j = 0; j < n; ++j) {
      utt(m, j) = site(mn, j) - site(m, j);
      vtt(m, j) = site(m, next(j, n)) - site(m, j);
    }
  }
}

double max_abs(const RealGrid& g) {
  double r = 0.0;
  for (double x : g) r = std::max(r, std::abs(x));
  return r;
}

// Half kick, drift and bounds check fused into one sweep; returns false on
// overflow or non-finite values.
bool kick_drift(RealGrid& x, RealGrid& xt, const RealGrid& acc, double h, double dt) {
  const index_t total = static_cast<index_t>(x.size());
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (index_t ki = 0; ki < total; ++ki) {
    const auto k = static_cast<std::size_t>(ki);
    xt[k] += h * acc[k];
    x[k] += dt * xt[k];
    ok = ok && std::abs(x[k]) <= kOverflowGuard && std::abs(xt[k]) <= kOverflowGuard;
  }
  return ok;
}

bool kick(RealGrid& xt, const RealGrid& acc, double h) {
  const index_t total = static_cast<index_t>(xt.size());
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (index_t ki = 0; ki < total; ++ki) {
    const auto k = static_cast<std::size_t>(ki);
    xt[k] += h * acc[k];
    ok = ok && std::abs(xt[k]) <= kOverflowGuard;
  }
  return ok;
}

[[noreturn]] void unstable(double t) {
  throw Error(ErrorKind::UnstableStep, "state left the overflow guard near t = " + std::to_string(t));
}

}  // namespace

LatticeState LatticeState::displacement(std::size_t n_side) {
  require_side(n_side);
  LatticeState s;
  s.form = LatticeForm::displacement;
  s.n_side = n_side;
  s.q = RealGrid(n_side);
  s.w = RealGrid(n_side);
  return s;
}

LatticeState LatticeState::strain(std::size_t n_side) {
  require_side(n_side);
  LatticeState s;
  s.form = LatticeForm::strain;
  s.n_side = n_side;
  s.u = RealGrid(n_side);
  s.v = RealGrid(n_side);
  s.ut = RealGrid(n_side);
  s.vt = RealGrid(n_side);
  return s;
}

LatticeState LatticeState::strain_from_displacement(const LatticeState& disp) {
  require_form(disp, LatticeForm::displacement);
  const std::size_t n = disp.n_side;
  LatticeState s = strain(n);
  s.time = disp.time;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t j = 0; j < n; ++j) {
      s.u(m, j) = disp.q(next(m, n), j) - disp.q(m, j);
      s.v(m, j) = disp.q(m, next(j, n)) - disp.q(m, j);
      s.ut(m, j) = disp.w(next(m, n), j) - disp.w(m, j);
      s.vt(m, j) = disp.w(m, next(j, n)) - disp.w(m, j);
    }
  return s;
}

BondPerturbation BondPerturbation::random(std::size_t n_side, double bound, std::uint64_t seed) {
  if (!(bound >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coefficient bound must be non-negative");
  std::mt19937_64 gen(seed);
  // Top 53 bits give a uniform double in [0, 1) independent of the standard
  // library's distribution implementation.
  auto draw = [&] {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return bound * (2.0 * unit - 1.0);
  };
  BondPerturbation p = zero(n_side);
  for (RealGrid* g : {&p.alpha_x, &p.alpha_y, &p.beta_x, &p.beta_y, &p.gamma_x, &p.gamma_y})
    for (double& x : *g) x = draw();
  return p;
}

BondPerturbation BondPerturbation::zero(std::size_t n_side) {
  const RealGrid z(n_side);
  return {z, z, z, z, z, z};
}

double BondPerturbation::max_abs() const {
  double r = 0.0;
  for (const RealGrid* g : {&alpha_x, &alpha_y, &beta_x, &beta_y, &gamma_x, &gamma_y})
    r = std::max(r, fput2d::max_abs(*g));
  return r;
}

ForceLaw ForceLaw::cubic() { return {}; }

ForceLaw ForceLaw::linear() {
  ForceLaw f;
  f.kind_ = ForceKind::linear;
  return f;
}

ForceLaw ForceLaw::perturbed(double eps, BondPerturbation coeffs, double coeff_bound) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  const std::size_t n = coeffs.alpha_x.side();
  for (const RealGrid* g : {&coeffs.alpha_y, &coeffs.beta_x, &coeffs.beta_y, &coeffs.gamma_x, &coeffs.gamma_y})
    if (g->side() != n) throw Error(ErrorKind::InvalidArgument, "perturbation arrays differ in size");
  if (coeffs.max_abs() > coeff_bound)
    throw Error(ErrorKind::InvalidArgument, "perturbation coefficient exceeds its bound");

  ForceLaw f;
  f.kind_ = ForceKind::perturbed;
  f.eps_ = eps;
  const double e3 = eps * eps * eps;
  const double e2 = eps * eps;
  auto fill = [&](const RealGrid& alpha, const RealGrid& beta, const RealGrid& gamma, RealGrid& c1, RealGrid& c2,
                  RealGrid& c3) {
    c1 = RealGrid(n);
    c2 = RealGrid(n);
    c3 = RealGrid(n);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      c1[k] = 1.0 + alpha[k] * e3;
      c2[k] = beta[k] * e2;
      c3[k] = gamma[k] * eps - 1.0;
    }
  };
  fill(coeffs.alpha_x, coeffs.beta_x, coeffs.gamma_x, f.c1x_, f.c2x_, f.c3x_);
  fill(coeffs.alpha_y, coeffs.beta_y, coeffs.gamma_y, f.c1y_, f.c2y_, f.c3y_);
  f.coeffs_ = std::move(coeffs);
  return f;
}

ForceLaw::BondPoly ForceLaw::bond(int axis, std::size_t k) const noexcept {
  switch (kind_) {
    case ForceKind::cubic_baseline:
      return {1.0, 0.0, -1.0};
    case ForceKind::linear:
      return {1.0, 0.0, 0.0};
    case ForceKind::perturbed:
      break;
  }
  if (axis == 0) return {c1x_[k], c2x_[k], c3x_[k]};
  return {c1y_[k], c2y_[k], c3y_[k]};
}

RealGrid rhs_displacement(const LatticeState& s, const ForceLaw& f) {
  require_form(s, LatticeForm::displacement);
  const std::size_t n = s.n_side;
  RealGrid fx(n), fy(n), acc(n);
  displacement_forces(f, s.q, fx, fy);
  site_balance(fx, fy, acc);
  return acc;
}

StrainAcceleration rhs_strain(const LatticeState& s, const ForceLaw& f) {
  require_form(s, LatticeForm::strain);
  const std::size_t n = s.n_side;
  RealGrid fx(n), fy(n), site(n);
  strain_forces(f, s.u, s.v, fx, fy);
  site_balance(fx, fy, site);
  StrainAcceleration out{RealGrid(n), RealGrid(n)};
  strain_from_site(site, out.utt, out.vtt);
  return out;
}

VerletIntegrator::VerletIntegrator(ForceLaw force, double dt) : force_(std::move(force)), dt_(dt) {
  if (!(std::abs(dt) > 0.0 && std::abs(dt) <= kMaxLatticeStep))
    throw Error(ErrorKind::InvalidArgument, "lattice step must satisfy 0 < |dt| <= 0.5");
}

void VerletIntegrator::accelerate(const LatticeState& s) {
  const std::size_t n = s.n_side;
  if (fx_.side() != n) {
    fx_ = RealGrid(n);
    fy_ = RealGrid(n);
    site_ = RealGrid(n);
    acc0_ = RealGrid(n);
    acc1_ = RealGrid(n);
  }
  if (s.form == LatticeForm::displacement) {
    displacement_forces(force_, s.q, fx_, fy_);
    site_balance(fx_, fy_, acc0_);
  } else {
    strain_forces(force_, s.u, s.v, fx_, fy_);
    site_balance(fx_, fy_, site_);
    strain_from_site(site_, acc0_, acc1_);
  }
}

void VerletIntegrator::advance(LatticeState& s, std::size_t steps) {
  if (steps == 0) return;
  const double h = 0.5 * dt_;
  accelerate(s);
  for (std::size_t i = 0; i < steps; ++i) {
    bool ok;
    if (s.form == LatticeForm::displacement) {
      ok = kick_drift(s.q, s.w, acc0_, h, dt_);
      accelerate(s);
      ok = kick(s.w, acc0_, h) && ok;
    } else {
      ok = kick_drift(s.u, s.ut, acc0_, h, dt_);
      ok = kick_drift(s.v, s.vt, acc1_, h, dt_) && ok;
      accelerate(s);
      ok = kick(s.ut, acc0_, h) && ok;
      ok = kick(s.vt, acc1_, h) && ok;
    }
    s.time += dt_;
    if (!ok) unstable(s.time);
  }
}

LatticeState verlet_step(const LatticeState& s, const ForceLaw& f, double dt) {
  LatticeState out = s;
  VerletIntegrator(f, dt).advance(out, 1);
  return out;
}

double energy(const LatticeState& s, const ForceLaw& f) {
  require_form(s, LatticeForm::displacement);
  const std::size_t n = s.n_side;
  std::vector<double> rows(n, 0.0);
  auto w_bond = [](ForceLaw::BondPoly p, double d) {
    const double d2 = d * d;
    return p.c1 * d2 / 2.0 + p.c2 * d2 * d / 3.0 + p.c3 * d2 * d2 / 4.0;
  };
  const index_t nr = static_cast<index_t>(n);
#pragma omp parallel for schedule(static)
  for (index_t mi = 0; mi < nr; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = m * n + j;
      const double w = s.w(m, j);
      acc += 0.5 * w * w;
      acc += w_bond(f.bond(0, k), s.q(next(m, n), j) - s.q(m, j));
      acc += w_bond(f.bond(1, k), s.q(m, next(j, n)) - s.q(m, j));
    }
    rows[m] = acc;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

double compatibility_defect(const LatticeState& s) {
  require_form(s, LatticeForm::strain);
  const std::size_t n = s.n_side;
  double worst0 = 0.0, worst1 = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t mn = next(m, n), jn = next(j, n);
      const double d0 = s.u(m, jn) - s.u(m, j) - s.v(mn, j) + s.v(m, j);
      const double d1 = s.ut(m, jn) - s.ut(m, j) - s.vt(mn, j) + s.vt(m, j);
      worst0 = std::max(worst0, std::abs(d0));
      worst1 = std::max(worst1, std::abs(d1));
    }
  return worst0 + worst1;
}

double max_amplitude(const LatticeState& s) {
  if (s.form == LatticeForm::displacement) return max_abs(s.q);
  return std::max(max_abs(s.u), max_abs(s.v));
}

}  // namespace fput2d
