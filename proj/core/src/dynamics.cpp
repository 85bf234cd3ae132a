#include "vela/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vela/error.hpp"

namespace vela {

namespace {

/// Pointwise nonlinear terms. dh[p](r,q) = d_p hdot(r,q); dv(i,p) = d_p v^i.
struct PointTerms {
  Mat3 nh;
  Vec3 nv;
  double q;
};

PointTerms point_terms(const MaterialModel& model, const Rank4Tensor& id, const Mat3& X, const Mat3* dh,
                       const Vec3& v, const Mat3& dv) {
  PointTerms out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int p = 0; p < 3; ++p) s -= v[p] * dh[p](i, j) + X(i, p) * dv(p, j);
      out.nh(i, j) = s;
    }
  const Vec3 force = model.stress_force(Mat3::identity() + X, dh);
  for (int i = 0; i < 3; ++i) {
    double lin = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r) lin += id(p, q, i, r) * dh[p](r, q);
    const double conv = v[0] * dv(i, 0) + v[1] * dv(i, 1) + v[2] * dv(i, 2);
    out.nv[i] = -conv - (force[i] - lin);
  }
  // Potential of M^H. Since det(I + X) - 1 = tr X + this quadratic and cubic
  // part, the constraint makes it equal to -tr X up to the det residual.
  const double tr = trace(X);
  out.q = -(0.5 * (tr * tr - frob(X, transpose(X))) + det(X));
  return out;
}

bool all_finite(const std::vector<Spectrum>& u) {
  double s = 0.0;
  for (const auto& c : u)
    for (const auto& z : c) s += std::abs(z.real()) + std::abs(z.imag());
  return std::isfinite(s);
}

}  // namespace

NonlinearTerms nonlinear_rhs(Spectral& sp, const State& s, const MaterialModel& model, bool dealias) {
  const Grid& g = s.grid();
  auto gh = sp.gradient_all(s.hdot);
  auto gv = sp.gradient_all(s.vdot);
  const Rank4Tensor id = model.ahat(Mat3::identity());
  const double c1 = model.params().c1;
  NonlinearTerms out(g);
  ScalarField q(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Mat3 X = matrix_at(s.hdot, idx);
    Mat3 dh[3];
    Mat3 dv;
    for (int p = 0; p < 3; ++p) {
      dh[p] = matrix_at(gh[p], idx);
      for (int i = 0; i < 3; ++i) dv(i, p) = gv[p].at(i, idx);
    }
    const PointTerms t = point_terms(model, id, X, dh, vector_at(s.vdot, idx), dv);
    set_matrix(out.nh, idx, t.nh);
    set_vector(out.nv, idx, t.nv);
    q.at(0, idx) = t.q;
  }
  if (dealias) {
    out.nh = sp.dealias(out.nh);
    out.nv = sp.dealias(out.nv);
    q = sp.dealias(q);
  }
  out.mh = sp.gradient(q);
  out.forcing = out.nv - (c1 * c1 - 1.0) * out.mh;
  return out;
}

VectorField pressure_gradient(Spectral& sp, const State& s, const VectorField& forcing) {
  return sp.gradient_part(forcing - sp.divergence(s.hdot));
}

VectorField pressure_gradient_poisson(Spectral& sp, const NonlinearTerms& terms, double c1) {
  ScalarField rhs = sp.divergence(terms.nv) - (c1 * c1) * sp.divergence(terms.mh);
  return sp.gradient(sp.poisson_solve(rhs).phi);
}

double base_energy(const State& s, const MaterialModel& model, bool at_identity) {
  const Grid& g = s.grid();
  const Rank4Tensor id = model.ahat(Mat3::identity());
  double e = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Mat3 X = matrix_at(s.hdot, idx);
    const Vec3 v = vector_at(s.vdot, idx);
    const double hq = at_identity ? contract_quadratic(id, X) : model.quadratic(Mat3::identity() + X, X);
    e += hq + dot(v, v);
  }
  return 0.5 * g.cell_volume() * e;
}

ConstraintResiduals constraint_residuals(Spectral& sp, const State& s) {
  ConstraintResiduals r;
  r.div_v = max_abs(sp.divergence(s.vdot));
  const Grid& g = s.grid();
  auto gh = sp.gradient_all(s.hdot);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    r.det = std::max(r.det, std::abs(det(Mat3::identity() + matrix_at(s.hdot, idx)) - 1.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k)
          r.curl = std::max(r.curl, std::abs(gh[k].at(3 * i + j, idx) - gh[j].at(3 * i + k, idx)));
  }
  return r;
}

// ---- Solver

Solver::Solver(const Grid& g, const MaterialModel& model, SolverConfig cfg)
    : sp_(g), model_(model), cfg_(cfg), id_(model.ahat(Mat3::identity())), c1_(model.params().c1) {
  if (!(cfg_.dt > 0.0) || !std::isfinite(cfg_.dt)) throw DomainError("time step must be positive");
  if (model.params().c2 != 1.0) throw DomainError("the solver assumes c2 = 1");
  const double nu = model.params().nu;
  const std::size_t ns = sp_.spectral_size();
  e_full_.resize(ns);
  e_half_.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    e_full_[s] = std::exp(-nu * sp_.k2()[s] * cfg_.dt);
    e_half_[s] = std::exp(-0.5 * nu * sp_.k2()[s] * cfg_.dt);
  }
  if (!cfg_.linear) phys_.assign(61 * g.size(), 0.0);
}

void Solver::to_spectral(const State& s, Spec& u) {
  s.hdot.check_grid(sp_.grid());
  u.resize(12);
  for (std::size_t c = 0; c < 12; ++c) {
    u[c].resize(sp_.spectral_size());
    sp_.forward(c < 9 ? s.hdot.comp(c) : s.vdot.comp(c - 9), u[c].data());
  }
}

void Solver::to_physical(const Spec& u, State& s) {
  for (std::size_t c = 0; c < 12; ++c) sp_.inverse(u[c].data(), c < 9 ? s.hdot.comp(c) : s.vdot.comp(c - 9));
}

void Solver::decay(Spec& u, const std::vector<double>& factor) {
  for (std::size_t c = 9; c < 12; ++c)
    for (std::size_t s = 0; s < factor.size(); ++s) u[c][s] *= factor[s];
}

void Solver::rhs(const Spec& u, Spec& du, StageScalars* acc) {
  const std::size_t ns = sp_.spectral_size();
  const std::size_t np = sp_.grid().size();
  const auto& k0 = sp_.k(0);
  const auto& k1 = sp_.k(1);
  const auto& k2 = sp_.k(2);
  const std::vector<double>* kk[3] = {&k0, &k1, &k2};
  const Complex I(0.0, 1.0);
  du.resize(12);
  for (auto& c : du) c.assign(ns, Complex(0.0, 0.0));
  Spectrum qhat;

  if (!cfg_.linear) {
    double* P = phys_.data();
    auto comp = [&](std::size_t c) { return P + c * np; };
    Spectrum tmp(ns);
    for (std::size_t c = 0; c < 12; ++c) {
      sp_.inverse(u[c].data(), comp(c));
      for (int p = 0; p < 3; ++p) {
        const auto& kp = *kk[p];
        for (std::size_t s = 0; s < ns; ++s) tmp[s] = I * kp[s] * u[c][s];
        sp_.inverse(tmp.data(), comp(12 + 12 * p + c));
      }
    }
    for (std::size_t idx = 0; idx < np; ++idx) {
      Mat3 X, dh[3], dv;
      Vec3 v;
      for (std::size_t c = 0; c < 9; ++c) X.a[c] = comp(c)[idx];
      for (int i = 0; i < 3; ++i) v[i] = comp(9 + i)[idx];
      for (int p = 0; p < 3; ++p) {
        for (std::size_t c = 0; c < 9; ++c) dh[p].a[c] = comp(12 + 12 * p + c)[idx];
        for (int i = 0; i < 3; ++i) dv(i, p) = comp(12 + 12 * p + 9 + i)[idx];
      }
      const PointTerms t = point_terms(model_, id_, X, dh, v, dv);
      for (std::size_t c = 0; c < 9; ++c) comp(48 + c)[idx] = t.nh.a[c];
      for (int i = 0; i < 3; ++i) comp(57 + i)[idx] = t.nv[i];
      comp(60)[idx] = t.q;
    }
    for (std::size_t c = 0; c < 12; ++c) {
      sp_.forward(comp(48 + c), du[c].data());
      if (cfg_.dealias) sp_.apply_mask(du[c].data());
    }
    qhat.resize(ns);
    sp_.forward(comp(60), qhat.data());
    if (cfg_.dealias) sp_.apply_mask(qhat.data());
  }

  const double g2 = c1_ * c1_ - 1.0;
  for (std::size_t s = 0; s < ns; ++s) {
    const double kv[3] = {k0[s], k1[s], k2[s]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) du[3 * i + j][s] -= I * kv[j] * u[9 + i][s];
    Complex w[3];
    for (int i = 0; i < 3; ++i) {
      w[i] = du[9 + i][s] - I * (kv[0] * u[3 * i][s] + kv[1] * u[3 * i + 1][s] + kv[2] * u[3 * i + 2][s]);
      if (!qhat.empty()) w[i] -= g2 * I * kv[i] * qhat[s];
    }
    const double ksq = sp_.k2()[s];
    if (ksq > 0.0) {
      const Complex f = (kv[0] * w[0] + kv[1] * w[1] + kv[2] * w[2]) / ksq;
      for (int i = 0; i < 3; ++i) w[i] -= kv[i] * f;
    }
    for (int i = 0; i < 3; ++i) du[9 + i][s] = w[i];
  }

  if (!acc) return;
  const double nu = model_.params().nu;
  const double vol_n = sp_.grid().cell_volume() / static_cast<double>(np);
  double d = 0.0;
  for (std::size_t c = 9; c < 12; ++c)
    for (std::size_t s = 0; s < ns; ++s) d += sp_.weight(s) * sp_.k2()[s] * std::norm(u[c][s]);
  acc->diss = nu * d * vol_n;

  if (cfg_.linear) {
    double f = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      double a = 0.0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          for (int m = 0; m < 3; ++m)
            for (int r = 0; r < 3; ++r) {
              const double t = id_(p, q, m, r);
              if (t == 0.0) continue;
              const Complex x = u[3 * m + p][s], y = du[3 * r + q][s];
              a += t * (x.real() * y.real() + x.imag() * y.imag());
            }
      for (std::size_t c = 9; c < 12; ++c) a += u[c][s].real() * du[c][s].real() + u[c][s].imag() * du[c][s].imag();
      f += sp_.weight(s) * a;
    }
    acc->flux = f * vol_n;
    return;
  }

  // Nonlinear flux: d/dt of the base energy minus the viscous part.
  double* P = phys_.data();
  auto comp = [&](std::size_t c) { return P + c * np; };
  for (std::size_t c = 0; c < 12; ++c) sp_.inverse(du[c].data(), comp(12 + c));
  double xt_max = 0.0;
  for (std::size_t c = 0; c < 9; ++c)
    for (std::size_t idx = 0; idx < np; ++idx) xt_max = std::max(xt_max, std::abs(comp(12 + c)[idx]));
  const double step = 1e-4 / std::max(xt_max, 1e-300);
  double f = 0.0;
  for (std::size_t idx = 0; idx < np; ++idx) {
    Mat3 X, Xt;
    for (std::size_t c = 0; c < 9; ++c) {
      X.a[c] = comp(c)[idx];
      Xt.a[c] = comp(12 + c)[idx];
    }
    const Mat3 H = Mat3::identity() + X;
    const Rank4Tensor a = model_.ahat(H);
    const double qa = contract_quadratic(a, X);
    double e = 0.5 * (contract_bilinear(a, X, Xt) + contract_bilinear(a, Xt, X));
    // One-sided derivative of the weight: the flux is already cubic, so its
    // O(step) error sits far below the balance tolerance.
    e += 0.5 * (contract_quadratic(model_.ahat(H + step * Xt), X) - qa) / step;
    for (int i = 0; i < 3; ++i) e += comp(9 + i)[idx] * comp(21 + i)[idx];
    f += e;
  }
  acc->flux = f * sp_.grid().cell_volume();
}

State Solver::step(const State& s) {
  const double dt = cfg_.dt;
  Spec u0, k1, k2, k3, k4, tmp;
  to_spectral(s, u0);
  if (!all_finite(u0)) throw BlowUpError("non-finite values before step", s.t);
  const bool track = cfg_.track_energy;
  StageScalars a1, a2, a3, a4;
  const std::size_t ns = sp_.spectral_size();
  auto axpy = [&](Spec& y, double a, const Spec& x) {
    for (std::size_t c = 0; c < 12; ++c)
      for (std::size_t i = 0; i < ns; ++i) y[c][i] += a * x[c][i];
  };

  // A deformation that stops being invertible mid-step has left the model's domain.
  try {
    rhs(u0, k1, track ? &a1 : nullptr);
    tmp = u0;
    axpy(tmp, 0.5 * dt, k1);
    decay(tmp, e_half_);
    rhs(tmp, k2, track ? &a2 : nullptr);
    tmp = u0;
    decay(tmp, e_half_);
    axpy(tmp, 0.5 * dt, k2);
    rhs(tmp, k3, track ? &a3 : nullptr);
    tmp = u0;
    decay(tmp, e_full_);
    {
      Spec k3h = k3;
      decay(k3h, e_half_);
      axpy(tmp, dt, k3h);
    }
    rhs(tmp, k4, track ? &a4 : nullptr);
  } catch (const InversionError& e) {
    throw BlowUpError(std::string("deformation lost invertibility: ") + e.what(), s.t);
  }

  // u1 = E u0 + dt/6 (E k1 + 2 E_h (k2 + k3) + k4)
  Spec& out = u0;
  decay(out, e_full_);
  decay(k1, e_full_);
  axpy(k2, 1.0, k3);
  decay(k2, e_half_);
  axpy(out, dt / 6.0, k1);
  axpy(out, dt / 3.0, k2);
  axpy(out, dt / 6.0, k4);

  if (!all_finite(out)) throw BlowUpError("non-finite values after step", s.t + dt);
  if (track) {
    flux_ += dt / 6.0 * (a1.flux + 2.0 * a2.flux + 2.0 * a3.flux + a4.flux);
    diss_ += dt / 6.0 * (a1.diss + 2.0 * a2.diss + 2.0 * a3.diss + a4.diss);
  }
  State next(sp_.grid());
  to_physical(out, next);
  next.t = s.t + dt;
  return next;
}

FieldPair Solver::time_derivative(const State& s) {
  Spec u, du;
  to_spectral(s, u);
  rhs(u, du, nullptr);
  const double nu = model_.params().nu;
  for (std::size_t c = 9; c < 12; ++c)
    for (std::size_t i = 0; i < sp_.spectral_size(); ++i) du[c][i] -= nu * sp_.k2()[i] * u[c][i];
  FieldPair out(sp_.grid());
  for (std::size_t c = 0; c < 12; ++c) sp_.inverse(du[c].data(), out.comp(c));
  return out;
}

}  // namespace vela
