#include "fput2d/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fput2d/errors.hpp"

namespace fput2d {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kSlowTimeTolerance = 1e-9;

// Harmonic number and triple product of each correction carrier.
constexpr int kHarmonics[3] = {-1, 3, -3};

ComplexGrid complexify(const RealGrid& g) {
  ComplexGrid c(g.side());
  for (std::size_t k = 0; k < g.size(); ++k) c[k] = g[k];
  return c;
}

void take_real(const ComplexGrid& c, RealGrid& g, double scale) {
  for (std::size_t k = 0; k < c.size(); ++k) g[k] = scale * c[k].real();
}

double max_diff(const RealGrid& a, const RealGrid& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
  return r;
}

ComplexGrid directional(const ComplexGrid& ax, const ComplexGrid& ay, const GroupVelocity& c) {
  ComplexGrid out(ax.side());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = c.cx * ax[k] + c.cy * ay[k];
  return out;
}

}  // namespace

std::size_t compat_project(ComplexGrid& u_hat, ComplexGrid& ut_hat, ComplexGrid& v_hat, ComplexGrid& vt_hat,
                           ProjectionKind kind, double threshold) {
  const std::size_t n = u_hat.side();
  for (const ComplexGrid* g : {&ut_hat, &v_hat, &vt_hat})
    if (g->side() != n) throw Error(ErrorKind::InvalidArgument, "projection spectra differ in size");
  std::size_t skipped = 0;
  std::vector<cplx> e(n);
  for (std::size_t j = 0; j < n; ++j) e[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / n) - 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx a = e[i];
      const cplx b = e[j];
      cplx den, ca, cb;
      if (kind == ProjectionKind::oblique) {
        den = a * a + b * b;
        ca = a;
        cb = b;
      } else {
        den = std::norm(a) + std::norm(b);
        ca = std::conj(a);
        cb = std::conj(b);
      }
      if (std::abs(den) < threshold) {
        ++skipped;
        continue;
      }
      const cplx s0 = (ca * u_hat(i, j) + cb * v_hat(i, j)) / den;
      const cplx s1 = (ca * ut_hat(i, j) + cb * vt_hat(i, j)) / den;
      u_hat(i, j) = a * s0;
      v_hat(i, j) = b * s0;
      ut_hat(i, j) = a * s1;
      vt_hat(i, j) = b * s1;
    }
  return skipped;
}

std::size_t compat_project(ComplexGrid& u_hat, ComplexGrid& v_hat, ProjectionKind kind, double threshold) {
  ComplexGrid zu(u_hat.side()), zv(u_hat.side());
  return compat_project(u_hat, zu, v_hat, zv, kind, threshold);
}

EnvelopeResampler::EnvelopeResampler(std::size_t grid_side, double box_length, std::size_t n_side, double eps)
    : m_(grid_side), n_(n_side), length_(box_length), eps_(eps), exact_(false), env_fft_(grid_side) {
  const double footprint = eps * static_cast<double>(n_side);
  if (footprint > box_length * (1.0 + 1e-12))
    throw Error(ErrorKind::FootprintExceeded, "eps * N = " + std::to_string(footprint) +
                                                  " exceeds the envelope box " + std::to_string(box_length));
  exact_ = std::abs(footprint - box_length) <= 1e-12 * box_length;
  if (exact_) lat_fft_.emplace(n_side);
}

ComplexGrid EnvelopeResampler::resample(const ComplexGrid& f, double shift_x, double shift_y) {
  ComplexGrid spec = f;
  env_fft_.forward(spec);
  const auto m = static_cast<std::ptrdiff_t>(m_);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  const double norm = 1.0 / static_cast<double>(m_ * m_);
  // Retained envelope modes: |p| < M/2, which drops the ambiguous Nyquist slot.
  auto kept = [&](std::ptrdiff_t p) { return 2 * std::abs(p) < m && (!exact_ || 2 * std::abs(p) < n); };

  if (exact_) {
    std::vector<cplx> ex(m_), ey(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      const auto p = static_cast<double>(signed_index(j, m_));
      ex[j] = std::polar(1.0, 2.0 * kPi * p * shift_x / static_cast<double>(n_));
      ey[j] = std::polar(1.0, 2.0 * kPi * p * shift_y / static_cast<double>(n_));
    }
    ComplexGrid out(n_);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto p = signed_index(i, m_);
      if (!kept(p)) continue;
      const std::size_t oi = static_cast<std::size_t>((p + n) % n);
      for (std::size_t j = 0; j < m_; ++j) {
        const auto q = signed_index(j, m_);
        if (!kept(q)) continue;
        const std::size_t oj = static_cast<std::size_t>((q + n) % n);
        out(oi, oj) = spec(i, j) * (ex[i] * ey[j] * norm);
      }
    }
    lat_fft_->backward(out);
    return out;
  }

  // Separable sum: out(a, b) = sum_{p,q} Ex(a, p) spec(p, q) Ey(b, q).
  std::vector<std::size_t> slots;
  for (std::size_t j = 0; j < m_; ++j)
    if (kept(signed_index(j, m_))) slots.push_back(j);
  const std::size_t r = slots.size();
  auto basis = [&](double shift) {
    std::vector<cplx> e(n_ * r);
    for (std::size_t a = 0; a < n_; ++a) {
      const double x = eps_ * (static_cast<double>(a) - 0.5 * static_cast<double>(n_) + shift) + 0.5 * length_;
      for (std::size_t s = 0; s < r; ++s) {
        const double k = 2.0 * kPi * static_cast<double>(signed_index(slots[s], m_)) / length_;
        e[a * r + s] = std::polar(1.0, k * x);
      }
    }
    return e;
  };
  const auto ex = basis(shift_x);
  const auto ey = basis(shift_y);
  std::vector<cplx> tmp(r * n_);  // tmp(p, b) = sum_q spec(p, q) Ey(b, q)
  for (std::size_t ps = 0; ps < r; ++ps)
    for (std::size_t b = 0; b < n_; ++b) {
      cplx acc{};
      for (std::size_t qs = 0; qs < r; ++qs) acc += spec(slots[ps], slots[qs]) * ey[b * r + qs];
      tmp[ps * n_ + b] = acc;
    }
  ComplexGrid out(n_);
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b) {
      cplx acc{};
      for (std::size_t ps = 0; ps < r; ++ps) acc += ex[a * r + ps] * tmp[ps * n_ + b];
      out(a, b) = acc * norm;
    }
  return out;
}

LatticeState AnsatzSample::as_state() const {
  const std::size_t n = form == LatticeForm::strain ? psi_u.side() : psi_q.side();
  LatticeState s = form == LatticeForm::strain ? LatticeState::strain(n) : LatticeState::displacement(n);
  s.time = t;
  if (form == LatticeForm::strain) {
    s.u = psi_u;
    s.v = psi_v;
    s.ut = psi_ut;
    s.vt = psi_vt;
  } else {
    s.q = psi_q;
    s.w = psi_qt;
  }
  return s;
}

CorrectionSet build_corrections(const ComplexGrid& a, const CorrectionAmplitudeCoefficients& c) {
  CorrectionSet set{ComplexGrid(a.side()), ComplexGrid(a.side()), ComplexGrid(a.side()), true};
  for (std::size_t k = 0; k < a.size(); ++k) {
    const cplx z = a[k];
    const cplx zc = std::conj(z);
    set.a_1m1[k] = 4.0 * c.c_1m1 * (z * zc * zc);
    set.a_13[k] = 4.0 * c.c_13 * (z * z * z);
    set.a_1m3[k] = 4.0 * c.c_1m3 * (zc * zc * zc);
  }
  return set;
}

AnsatzBuilder::AnsatzBuilder(const DispersionData& disp, double eps, std::size_t n_side, AnsatzOptions options)
    : disp_(disp), eps_(eps), n_(n_side), options_(options), lattice_fft_(n_side) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  if (n_side < kMinLatticeSide) throw Error(ErrorKind::InvalidArgument, "lattice side must be at least 8");
}

NlsSolver& AnsatzBuilder::solver_for(const EnvelopeField& env) {
  const int key = static_cast<int>(env.variant);
  auto it = solvers_.find(key);
  if (it == solvers_.end() || it->second->grid_side() != env.grid_side || it->second->box_length() != env.box_length) {
    NlsProblem problem = NlsProblem::from_dispersion(disp_, env.variant, 1e-3);
    if (options_.linear_envelope) problem.nonlin_coeff = 0.0;
    auto solver = std::make_unique<NlsSolver>(env.grid_side, env.box_length, problem);
    it = solvers_.insert_or_assign(key, std::move(solver)).first;
  }
  return *it->second;
}

EnvelopeResampler& AnsatzBuilder::resampler_for(const EnvelopeField& env) {
  if (!resampler_ || resampler_m_ != env.grid_side || resampler_l_ != env.box_length) {
    resampler_ = std::make_unique<EnvelopeResampler>(env.grid_side, env.box_length, n_, eps_);
    resampler_m_ = env.grid_side;
    resampler_l_ = env.box_length;
  }
  return *resampler_;
}

void AnsatzBuilder::add_carrier(const EnvelopeField& env, double t, const cplx& scale,
                                const CorrectionAmplitudeCoefficients* cc, RealGrid& psi, RealGrid& psi_t,
                                RealGrid* psi_tt) {
  NlsSolver& solver = solver_for(env);
  EnvelopeResampler& rs = resampler_for(env);
  const GroupVelocity c = disp_.group_velocity;
  const double w0 = disp_.omega0;
  const double e = eps_;
  const double sx = c.cx * t;
  const double sy = c.cy * t;

  ComplexGrid a = env.a;
  if (scale != 1.0)
    for (cplx& z : a) z *= scale;

  const ComplexGrid a_t = solver.rhs(a);
  ComplexGrid ax, ay;
  solver.gradient(a, ax, ay);
  const ComplexGrid g = directional(ax, ay, c);

  // Envelope-side amplitudes of position, velocity and acceleration.
  ComplexGrid p1(a.side()), p2;
  for (std::size_t k = 0; k < a.size(); ++k) p1[k] = kI * w0 * a[k] + e * g[k] + e * e * a_t[k];
  if (psi_tt) {
    const ComplexGrid a_tt = solver.second_derivative(a, a_t);
    solver.gradient(a_t, ax, ay);
    const ComplexGrid gt = directional(ax, ay, c);
    solver.gradient(g, ax, ay);
    const ComplexGrid gg = directional(ax, ay, c);
    p2 = ComplexGrid(a.side());
    for (std::size_t k = 0; k < a.size(); ++k)
      p2[k] = -w0 * w0 * a[k] + 2.0 * kI * w0 * (e * g[k] + e * e * a_t[k]) + e * e * gg[k] +
              2.0 * e * e * e * gt[k] + e * e * e * e * a_tt[k];
  }

  const WaveVector kv = disp_.carrier;
  auto accumulate = [&](int harmonic, const ComplexGrid& env_field, double weight, RealGrid& target) {
    const ComplexGrid lat = rs.resample(env_field, sx, sy);
    const double mw = harmonic * w0 * t;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double theta = harmonic * (kv.k() * static_cast<double>(i) + kv.l() * static_cast<double>(j)) + mw;
        target(i, j) += weight * (lat(i, j) * std::polar(1.0, theta)).real();
      }
  };

  accumulate(1, a, 2.0 * e, psi);
  accumulate(1, p1, 2.0 * e, psi_t);
  if (psi_tt) accumulate(1, p2, 2.0 * e, *psi_tt);

  if (!cc) return;
  const CorrectionSet corr = build_corrections(a, *cc);
  // Slow-time derivatives of the triple products, from dA/dT.
  CorrectionSet rate{ComplexGrid(a.side()), ComplexGrid(a.side()), ComplexGrid(a.side()), true};
  for (std::size_t k = 0; k < a.size(); ++k) {
    const cplx z = a[k], zc = std::conj(z);
    const cplx zt = a_t[k], ztc = std::conj(zt);
    rate.a_1m1[k] = 4.0 * cc->c_1m1 * (zt * zc * zc + 2.0 * z * zc * ztc);
    rate.a_13[k] = 4.0 * cc->c_13 * (3.0 * z * z * zt);
    rate.a_1m3[k] = 4.0 * cc->c_1m3 * (3.0 * zc * zc * ztc);
  }
  const ComplexGrid* fields[3] = {&corr.a_1m1, &corr.a_13, &corr.a_1m3};
  const ComplexGrid* rates[3] = {&rate.a_1m1, &rate.a_13, &rate.a_1m3};
  const double w3 = 2.0 * e * e * e;
  for (int h = 0; h < 3; ++h) {
    const int m = kHarmonics[h];
    const ComplexGrid& am = *fields[h];
    const ComplexGrid& am_t = *rates[h];
    solver.gradient(am, ax, ay);
    const ComplexGrid ga = directional(ax, ay, c);
    ComplexGrid vel(am.side()), acc;
    for (std::size_t k = 0; k < am.size(); ++k) vel[k] = kI * (m * w0) * am[k] + e * ga[k] + e * e * am_t[k];
    accumulate(m, am, w3, psi);
    accumulate(m, vel, w3, psi_t);
    if (!psi_tt) continue;
    // The second slow-time derivative of the corrections enters at eps^7 and
    // is dropped.
    solver.gradient(ga, ax, ay);
    const ComplexGrid gga = directional(ax, ay, c);
    solver.gradient(am_t, ax, ay);
    const ComplexGrid gat = directional(ax, ay, c);
    acc = ComplexGrid(am.side());
    for (std::size_t k = 0; k < am.size(); ++k)
      acc[k] = -(m * m * w0 * w0) * am[k] + 2.0 * kI * (m * w0) * (e * ga[k] + e * e * am_t[k]) + e * e * gga[k] +
               2.0 * e * e * e * gat[k];
    accumulate(m, acc, w3, *psi_tt);
  }
}

AnsatzSample AnsatzBuilder::sample(const EnvelopeField& env, double t, LatticeForm form, const EnvelopeField* env_b,
                                   bool with_acceleration) {
  if (std::abs(env.slow_time - eps_ * eps_ * t) > kSlowTimeTolerance)
    throw Error(ErrorKind::InvalidArgument, "envelope slow time does not match eps^2 t");
  AnsatzSample s;
  s.eps = eps_;
  s.carrier = disp_.carrier;
  s.t = t;
  s.form = form;
  const WaveVector kv = disp_.carrier;

  if (form == LatticeForm::displacement) {
    if (env.variant != EnvelopeVariant::displacement)
      throw Error(ErrorKind::InvalidArgument, "displacement ansatz needs a displacement envelope");
    s.psi_q = RealGrid(n_);
    s.psi_qt = RealGrid(n_);
    if (with_acceleration) s.psi_qtt = RealGrid(n_);
    std::optional<CorrectionAmplitudeCoefficients> cc;
    if (options_.corrections) cc = correction_coefficients(kv, EnvelopeVariant::displacement, options_.delta_res);
    add_carrier(env, t, 1.0, cc ? &*cc : nullptr, s.psi_q, s.psi_qt, with_acceleration ? &s.psi_qtt : nullptr);
    return s;
  }

  if (env.variant != EnvelopeVariant::strain_u)
    throw Error(ErrorKind::InvalidArgument, "strain ansatz needs the A envelope");
  if (kv.k() == 0.0 && !env_b)
    throw Error(ErrorKind::MissingB, "carrier with k0 = 0 requires the B envelope");
  s.psi_u = RealGrid(n_);
  s.psi_v = RealGrid(n_);
  s.psi_ut = RealGrid(n_);
  s.psi_vt = RealGrid(n_);
  if (with_acceleration) {
    s.psi_utt = RealGrid(n_);
    s.psi_vtt = RealGrid(n_);
  }

  // u carries A; with k0 = 0 the A envelope vanishes identically.
  if (kv.k() != 0.0) {
    std::optional<CorrectionAmplitudeCoefficients> cc;
    if (options_.corrections) cc = correction_coefficients(kv, EnvelopeVariant::strain_u, options_.delta_res);
    add_carrier(env, t, 1.0, cc ? &*cc : nullptr, s.psi_u, s.psi_ut, with_acceleration ? &s.psi_utt : nullptr);
  }
  // v carries B, given directly or as r A.
  if (kv.l() != 0.0) {
    std::optional<CorrectionAmplitudeCoefficients> cc;
    if (options_.corrections) cc = correction_coefficients(kv, EnvelopeVariant::strain_v, options_.delta_res);
    RealGrid* vtt = with_acceleration ? &s.psi_vtt : nullptr;
    if (env_b) {
      if (env_b->variant != EnvelopeVariant::strain_v)
        throw Error(ErrorKind::InvalidArgument, "B envelope must have variant strain_v");
      add_carrier(*env_b, t, 1.0, cc ? &*cc : nullptr, s.psi_v, s.psi_vt, vtt);
    } else {
      EnvelopeField b = env;
      b.variant = EnvelopeVariant::strain_v;
      add_carrier(b, t, b_over_a(kv), cc ? &*cc : nullptr, s.psi_v, s.psi_vt, vtt);
    }
  }
  return s;
}

ProjectionDiagnostics AnsatzBuilder::project(AnsatzSample& s) {
  if (s.form != LatticeForm::strain) throw Error(ErrorKind::FormMismatch, "projection applies to strain samples");
  ComplexGrid u = complexify(s.psi_u), v = complexify(s.psi_v);
  ComplexGrid ut = complexify(s.psi_ut), vt = complexify(s.psi_vt);
  for (ComplexGrid* g : {&u, &v, &ut, &vt}) lattice_fft_.forward(*g);
  ProjectionDiagnostics d;
  d.degenerate_modes = compat_project(u, ut, v, vt, options_.projection, options_.projection_threshold);
  if (!s.psi_utt.empty()) {
    ComplexGrid utt = complexify(s.psi_utt), vtt = complexify(s.psi_vtt);
    lattice_fft_.forward(utt);
    lattice_fft_.forward(vtt);
    compat_project(utt, vtt, options_.projection, options_.projection_threshold);
    lattice_fft_.backward(utt);
    lattice_fft_.backward(vtt);
    const double scale = 1.0 / static_cast<double>(n_ * n_);
    take_real(utt, s.psi_utt, scale);
    take_real(vtt, s.psi_vtt, scale);
  }
  for (ComplexGrid* g : {&u, &v, &ut, &vt}) lattice_fft_.backward(*g);
  const double scale = 1.0 / static_cast<double>(n_ * n_);
  const RealGrid raw[4] = {s.psi_u, s.psi_v, s.psi_ut, s.psi_vt};
  take_real(u, s.psi_u, scale);
  take_real(v, s.psi_v, scale);
  take_real(ut, s.psi_ut, scale);
  take_real(vt, s.psi_vt, scale);
  const RealGrid* now[4] = {&s.psi_u, &s.psi_v, &s.psi_ut, &s.psi_vt};
  for (int k = 0; k < 4; ++k) d.max_projection_displacement = std::max(d.max_projection_displacement, max_diff(raw[k], *now[k]));
  return d;
}

InitialData AnsatzBuilder::build_initial_data(const EnvelopeField& env, LatticeForm form, const EnvelopeField* env_b) {
  AnsatzSample s = sample(env, 0.0, form, env_b);
  InitialData out;
  if (form == LatticeForm::strain) out.diagnostics = project(s);
  out.state = s.as_state();
  return out;
}

double AnsatzBuilder::residual_norm(const EnvelopeField& env, double t, LatticeForm form, const ForceLaw& force,
                                    const EnvelopeField* env_b) {
  AnsatzSample s = sample(env, t, form, env_b, true);
  auto l1 = [&](const RealGrid& r) {
    ComplexGrid c = complexify(r);
    lattice_fft_.forward(c);
    double acc = 0.0;
    for (const cplx& z : c) acc += std::abs(z);
    return acc / static_cast<double>(n_ * n_);
  };
  if (form == LatticeForm::displacement) {
    const RealGrid acc = rhs_displacement(s.as_state(), force);
    RealGrid r(n_);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = s.psi_qtt[k] - acc[k];
    return l1(r);
  }
  project(s);
  const StrainAcceleration acc = rhs_strain(s.as_state(), force);
  RealGrid ru(n_), rv(n_);
  for (std::size_t k = 0; k < ru.size(); ++k) {
    ru[k] = s.psi_utt[k] - acc.utt[k];
    rv[k] = s.psi_vtt[k] - acc.vtt[k];
  }
  return l1(ru) + l1(rv);
}

}  // namespace fput2d
