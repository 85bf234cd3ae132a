#include "vela/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "vela/error.hpp"

namespace vela {

namespace {

FieldPair upsilon(const FieldPair& u, const std::array<FieldPair, 3>& du, int b) {
  if (b < 3) return du[b];
  return omega_tilde(u, du, b - 3);
}

/// integral of |grad v|^2 through Parseval: forward transforms only.
double grad_sq(Spectral& sp, const VectorField& v) {
  Spectrum s(sp.spectral_size());
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    sp.forward(v.comp(c), s.data());
    for (std::size_t i = 0; i < s.size(); ++i) acc += sp.weight(i) * sp.k2()[i] * std::norm(s[i]);
  }
  return acc * sp.grid().cell_volume() / static_cast<double>(sp.grid().size());
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

// ---- projections

PointSplit split_at(const Mat3& H, const Vec3& v, const Vec3& w) {
  PointSplit p;
  const Vec3 hw = matvec(H, w);
  const Vec3 a{v[0] + hw[0], v[1] + hw[1], v[2] + hw[2]};
  const Vec3 b{v[0] - hw[0], v[1] - hw[1], v[2] - hw[2]};
  p.h[0] = 0.5 * outer(a, w);
  p.v[0] = {0.5 * a[0], 0.5 * a[1], 0.5 * a[2]};
  p.h[1] = -0.5 * outer(b, w);
  p.v[1] = {0.5 * b[0], 0.5 * b[1], 0.5 * b[2]};
  p.h[2] = H - outer(hw, w);
  p.v[2] = {0.0, 0.0, 0.0};
  return p;
}

SplitFields spectral_split(const FieldPair& u) {
  const Grid& g = u.grid();
  SplitFields out(g);
  FieldPair* dst[3] = {&out.plus, &out.minus, &out.zero};
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const PointSplit p = split_at(matrix_at(u.h, idx), vector_at(u.v, idx), unit_radial_at(g.point(idx)));
    for (int i = 0; i < 3; ++i) {
      set_matrix(dst[i]->h, idx, p.h[i]);
      set_vector(dst[i]->v, idx, p.v[i]);
    }
  }
  return out;
}

FieldPair symbol_apply(const FieldPair& u) {
  const Grid& g = u.grid();
  FieldPair out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 w = unit_radial_at(g.point(idx));
    set_matrix(out.h, idx, outer(vector_at(u.v, idx), w));
    set_vector(out.v, idx, matvec(matrix_at(u.h, idx), w));
  }
  return out;
}

// ---- energy hierarchy

Hierarchy hierarchy(Spectral& sp, const State& s, const FieldPair& dudt, const MaterialModel& model,
                    const HierarchyOptions& opt) {
  if (opt.sigma < 0 || opt.sigma > 2 || opt.theta < 0 || opt.theta > 1 || opt.theta > opt.sigma)
    throw CapabilityError("supported energies: sigma <= 2, theta <= min(sigma, 1)");
  const Grid& g = s.grid();
  dudt.h.check_grid(g);
  const std::size_t np = g.size();
  const double vol = g.cell_volume();
  const double t = s.t;
  const double nu = model.params().nu;
  const FieldPair U = s.pair();

  std::vector<Rank4Tensor> weight;
  const Rank4Tensor id = model.ahat(Mat3::identity());
  if (!opt.at_identity) {
    weight.resize(np);
    for (std::size_t idx = 0; idx < np; ++idx) weight[idx] = model.ahat(Mat3::identity() + matrix_at(s.hdot, idx));
  }

  Hierarchy out;
  auto add = [&](int a, int k, const FieldPair& T) {
    double e = 0.0, pl = 0.0;
    for (std::size_t idx = 0; idx < np; ++idx) {
      const Mat3 M = matrix_at(T.h, idx);
      const Vec3 v = vector_at(T.v, idx);
      const double vv = dot(v, v);
      e += contract_quadratic(weight.empty() ? id : weight[idx], M) + vv;
      pl += frob(M, M) + vv;
    }
    e *= 0.5 * vol;
    pl *= 0.5 * vol;
    const double d = opt.dissipation && nu > 0.0 ? nu * grad_sq(sp, T.v) : 0.0;
    for (int sg = a + k; sg <= opt.sigma; ++sg)
      for (int th = a; th <= std::min(opt.theta, sg); ++th) {
        out.energy[sg][th] += e;
        out.plain[sg][th] += pl;
        out.dissipation[sg][th] += d;
        out.terms[sg][th] += 1;
      }
    if (a == 0) out.upsilon_norm_sum += std::sqrt(2.0 * pl);
  };

  // Weighted norms on the terms with a + |alpha| <= 1.
  const Cutoffs cut = cutoffs(g, t, opt.m);
  const double bt = bracket(t);
  auto add_weighted = [&](const std::array<FieldPair, 3>& dT) {
    double xs[3][3] = {}, xis[3][3] = {};
    double ps = 0.0;
    for (std::size_t idx = 0; idx < np; ++idx) {
      const Vec3 x = g.point(idx);
      const double r = norm(x);
      const Vec3 w = unit_radial_at(x);
      const double eta = cut.eta.at(0, idx), gam = cut.gamma.at(0, idx);
      for (int j = 0; j < 3; ++j) {
        const Mat3 H = matrix_at(dT[j].h, idx);
        const Vec3 v = vector_at(dT[j].v, idx);
        ps += eta * eta * bt * bt * (frob(H, H) + dot(v, v));
        const PointSplit p = split_at(H, v, w);
        for (int i = 0; i < 3; ++i) {
          const double wt = bracket(kSplitEigenvalues[i] * t - r);
          const double q = wt * wt * (frob(p.h[i], p.h[i]) + dot(p.v[i], p.v[i]));
          xs[i][j] += q;
          xis[i][j] += gam * gam * q;
        }
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double xv = std::sqrt(vol * xs[i][j]), xiv = std::sqrt(vol * xis[i][j]);
        out.X += xv;
        out.Xi += xiv;
        if (xiv > xv) out.xi_dominated = false;
      }
    out.Psi += std::sqrt(vol * ps);
  };

  const auto G0 = gradient_all(sp, U);
  add(0, 0, U);
  if (opt.weighted_norms) add_weighted(G0);

  std::optional<std::array<FieldPair, 3>> T0;
  if (opt.theta >= 1) T0 = gradient_all(sp, dudt);

  const bool need_level1 = opt.sigma >= 1;
  const bool need_g1 = opt.sigma >= 2 || opt.weighted_norms || (opt.theta >= 1 && opt.sigma >= 2);
  if (need_level1) {
    for (int b = 0; b < 6; ++b) {
      const FieldPair L1 = upsilon(U, G0, b);
      add(0, 1, L1);
      if (!need_g1) continue;
      const auto G1 = gradient_all(sp, L1);
      if (opt.weighted_norms) add_weighted(G1);
      if (opt.sigma >= 2)
        for (int c = 0; c < 6; ++c) add(0, 2, upsilon(L1, G1, c));
      if (opt.theta >= 1 && opt.sigma >= 2) {
        // S Y_b U = t Y_b(dU/dt) + x . grad(Y_b U) - Y_b U
        const FieldPair L1t = upsilon(dudt, *T0, b);
        add(1, 1, s_tilde(L1, G1, t, L1t));
      }
    }
  }
  if (opt.theta >= 1) {
    const FieldPair SU = s_tilde(U, G0, t, dudt);
    add(1, 0, SU);
    if (opt.weighted_norms) add_weighted(gradient_all(sp, SU));
  }
  return out;
}

double energy(Spectral& sp, const State& s, const MaterialModel& model, int sigma, int theta, const FieldPair* dudt,
              bool at_identity) {
  if (sigma < 0 || sigma > 2 || theta < 0 || theta > 1 || theta > sigma)
    throw CapabilityError("supported energies: sigma <= 2, theta <= min(sigma, 1)");
  if (theta == 1 && !dudt) throw DomainError("the time derivative is required when theta = 1");
  HierarchyOptions opt;
  opt.sigma = sigma;
  opt.theta = theta;
  opt.dissipation = false;
  opt.weighted_norms = false;
  opt.at_identity = at_identity;
  const FieldPair zero(s.grid());
  return hierarchy(sp, s, dudt ? *dudt : zero, model, opt).energy[sigma][theta];
}

WeightedNorms weighted_norms(Spectral& sp, const State& s, const FieldPair& dudt, double m) {
  const ConstantModel unit({});
  HierarchyOptions opt;
  opt.sigma = 1;
  opt.theta = 1;
  opt.dissipation = false;
  opt.weighted_norms = true;
  opt.at_identity = true;
  opt.m = m;
  const Hierarchy h = hierarchy(sp, s, dudt, unit, opt);
  return {h.X, h.Xi, h.Psi};
}

// ---- local energy decay

DecayEntry led_ratio(Spectral& sp, const State& s, const FieldPair& dudt, const MatrixField& f, const VectorField& g,
                     double nu, double m) {
  const Grid& gr = s.grid();
  const std::size_t np = gr.size();
  const double vol = gr.cell_volume();
  const double t = s.t;
  const double bt = bracket(t);
  const FieldPair U = s.pair();
  const auto G0 = gradient_all(sp, U);
  const Cutoffs cut = cutoffs(gr, t, m);
  const VectorField lap = sp.laplacian(s.vdot);
  const FieldPair SU = s_tilde(U, G0, t, dudt);
  const auto gSH = sp.gradient_all(SU.h);
  const VectorField divf = sp.divergence(f);

  double grad_u = 0, grad_v = 0, eta_grad = 0, eta_lap = 0, gam_lap = 0;
  double eta_f = 0, eta_g = 0, gam_f = 0, gam_g = 0, eta_divf = 0, grad_sh = 0, ext = 0;
  for (std::size_t idx = 0; idx < np; ++idx) {
    const Vec3 x = gr.point(idx);
    const double eta = cut.eta.at(0, idx), gam = cut.gamma.at(0, idx);
    double gu = 0.0, gv = 0.0, gsh = 0.0;
    for (int j = 0; j < 3; ++j) {
      for (std::size_t c = 0; c < 12; ++c) gu += G0[j].comp(c)[idx] * G0[j].comp(c)[idx];
      for (std::size_t c = 9; c < 12; ++c) gv += G0[j].comp(c)[idx] * G0[j].comp(c)[idx];
      for (std::size_t c = 0; c < 9; ++c) gsh += gSH[j].at(c, idx) * gSH[j].at(c, idx);
    }
    grad_u += gu;
    grad_v += gv;
    grad_sh += gsh;
    eta_grad += eta * eta * bt * bt * gu;
    const Vec3 l = vector_at(lap, idx);
    eta_lap += eta * eta * dot(l, l);
    gam_lap += gam * gam * dot(l, l);
    const Mat3 F = matrix_at(f, idx);
    const Vec3 G = vector_at(g, idx);
    const double ff = frob(F, F), gg = dot(G, G);
    eta_f += eta * eta * ff;
    eta_g += eta * eta * gg;
    gam_f += gam * gam * ff;
    gam_g += gam * gam * gg;
    const Vec3 df = vector_at(divf, idx);
    eta_divf += eta * eta * dot(df, df);
    // [r d_r - t A(grad)] U = (x.grad H - t grad v, x.grad v - t div H)
    double e = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const std::size_t c = 3 * i + j;
        const double rr = x[0] * G0[0].h.at(c, idx) + x[1] * G0[1].h.at(c, idx) + x[2] * G0[2].h.at(c, idx);
        const double a = rr - t * G0[j].v.at(i, idx);
        e += a * a;
      }
      const double rr = x[0] * G0[0].v.at(i, idx) + x[1] * G0[1].v.at(i, idx) + x[2] * G0[2].v.at(i, idx);
      const double dv = G0[0].h.at(3 * i, idx) + G0[1].h.at(3 * i + 1, idx) + G0[2].h.at(3 * i + 2, idx);
      const double a = rr - t * dv;
      e += a * a;
    }
    ext += gam * gam * e;
  }
  auto nrm = [&](double q) { return std::sqrt(vol * q); };

  double omega_h = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double n = l2_norm(omega_tilde(U, G0, i).h);
    omega_h += n * n;
  }
  omega_h = std::sqrt(omega_h);

  DecayEntry d;
  d.t = t;
  d.int_lhs = nrm(eta_grad) + nu * t * nrm(eta_lap);
  d.int_rhs = nu * nrm(grad_sh) + l2_norm(SU) + nrm(grad_u) + l2_norm(U) + t * nrm(eta_f) + t * nrm(eta_g) +
              nu * t * nrm(eta_divf);
  d.ext_lhs = nrm(ext) + nu * t * nrm(gam_lap);
  d.ext_rhs = omega_h + l2_norm(SU) + nrm(grad_v) + l2_norm(s.vdot) + t * nrm(gam_f) + t * nrm(gam_g);
  auto ratio = [](double l, double r, bool& flag) {
    if (r > 0.0) return l / r;
    flag = true;
    return l > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  d.int_ratio = ratio(d.int_lhs, d.int_rhs, d.int_flag);
  d.ext_ratio = ratio(d.ext_lhs, d.ext_rhs, d.ext_flag);
  return d;
}

// ---- pointwise monitors

CorollaryRatios corollary_monitors(Spectral& sp, const State& s, const VectorField& mh, double upsilon_sum, double X,
                                   double Psi, double m) {
  const Grid& g = s.grid();
  const double t = s.t;
  const double bt = bracket(t);
  const Cutoffs cut = cutoffs(g, t, m);

  // sum over |beta| <= 1 of ||r Y^beta M^H||
  const auto dm = sp.gradient_all(mh);
  const ScalarField r = radius_field(g);
  auto r_norm = [&](const VectorField& f) {
    double q = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const double rr = r.at(0, idx);
      const Vec3 v = vector_at(f, idx);
      q += rr * rr * dot(v, v);
    }
    return std::sqrt(g.cell_volume() * q);
  };
  double mh_sum = r_norm(mh);
  for (int b = 0; b < 6; ++b) mh_sum += r_norm(b < 3 ? dm[b] : omega_tilde(mh, dm, b - 3));

  double s4 = 0, s5 = 0, s6 = 0, s7 = 0, s8 = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    const double rr = norm(x);
    const Vec3 w = unit_radial_at(x);
    const Mat3 H = matrix_at(s.hdot, idx);
    const Vec3 v = vector_at(s.vdot, idx);
    const double u = std::sqrt(frob(H, H) + dot(v, v));
    s4 = std::max(s4, bracket(rr) * u);
    const PointSplit p = split_at(H, v, w);
    for (int i = 0; i < 3; ++i) {
      const double pu = std::sqrt(frob(p.h[i], p.h[i]) + dot(p.v[i], p.v[i]));
      s5 = std::max(s5, bracket(rr) * std::sqrt(bracket(kSplitEigenvalues[i] * t - rr)) * pu);
    }
    if (cut.eta.at(0, idx) > 0.0) s6 = std::max(s6, bt * u);
    const double r32 = rr * std::sqrt(rr);
    s7 = std::max(s7, r32 * std::abs(dot(w, matvec(H, w))));
    s8 = std::max(s8, r32 * std::abs(dot(w, v)));
  }
  CorollaryRatios c;
  c.sob4 = ratio_or_zero(s4, upsilon_sum);
  c.sob5 = ratio_or_zero(s5, upsilon_sum + X);
  c.sob6 = ratio_or_zero(s6, upsilon_sum + Psi);
  c.sob7 = ratio_or_zero(s7, upsilon_sum + mh_sum);
  c.sob8 = ratio_or_zero(s8, upsilon_sum);
  return c;
}

double hardy_ratio(Spectral& sp, const ScalarField& f) {
  const Grid& g = f.grid();
  const VectorField gf = sp.gradient(f);
  double num = 0.0, den = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    const double r = norm(x);
    if (r == 0.0) continue;
    const double fr = f.at(0, idx) / r;
    const double dr = dot(unit_radial_at(x), vector_at(gf, idx));
    num += fr * fr;
    den += dr * dr;
  }
  if (!(num > 0.0) || !(den > 0.0)) throw DegenerateInputError("hardy ratio of a vanishing function");
  return std::sqrt(num / den);
}

double sobolev3_check(Spectral& sp, const ScalarField& f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 2.0)) throw DomainError("lambda must lie in [0, 2]");
  const Grid& g = f.grid();
  const std::size_t np = g.size();
  if (max_abs(f) == 0.0) throw DegenerateInputError("sobolev check of a vanishing function");

  // first[a]: Omega^alpha f for |alpha| <= 1; second: |alpha| <= 2.
  const auto df = sp.gradient_all(f);
  std::vector<ScalarField> first{f};
  std::vector<std::array<ScalarField, 3>> grads{df};
  for (int i = 0; i < 3; ++i) {
    first.push_back(rotation(f, df, i));
    grads.push_back(sp.gradient_all(first.back()));
  }
  std::vector<ScalarField> second = first;
  for (int i = 1; i <= 3; ++i)
    for (int j = 0; j < 3; ++j) second.push_back(rotation(first[i], grads[i], j));

  std::vector<std::size_t> order(np);
  for (std::size_t i = 0; i < np; ++i) order[i] = i;
  std::vector<double> rad(np);
  for (std::size_t i = 0; i < np; ++i) rad[i] = norm(g.point(i));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rad[a] > rad[b]; });

  std::vector<double> ca(first.size(), 0.0), cb(second.size(), 0.0);
  const double vol = g.cell_volume();
  double best = 0.0;
  std::size_t pos = 0;
  while (pos < np) {
    std::size_t end = pos;
    const double r0 = rad[order[pos]];
    while (end < np && rad[order[end]] == r0) ++end;
    for (std::size_t q = pos; q < end; ++q) {
      const std::size_t idx = order[q];
      const double rho = rad[idx];
      if (rho == 0.0) continue;
      const Vec3 w = unit_radial_at(g.point(idx));
      const double wa = std::pow(rho, -lambda), wb = std::pow(rho, lambda - 2.0);
      for (std::size_t a = 0; a < first.size(); ++a) {
        const double dr = w[0] * grads[a][0].at(0, idx) + w[1] * grads[a][1].at(0, idx) + w[2] * grads[a][2].at(0, idx);
        ca[a] += wa * wa * dr * dr;
      }
      for (std::size_t b = 0; b < second.size(); ++b) {
        const double v = wb * second[b].at(0, idx);
        cb[b] += v * v;
      }
    }
    double sa = 0.0, sb = 0.0;
    for (double v : ca) sa += std::pow(vol * v, 0.25);
    for (double v : cb) sb += std::pow(vol * v, 0.25);
    const double rhs = sa * sb;
    for (std::size_t q = pos; q < end; ++q) {
      const double fv = std::abs(f.at(0, order[q]));
      if (fv == 0.0) continue;
      best = std::max(best, rhs > 0.0 ? fv / rhs : std::numeric_limits<double>::infinity());
    }
    pos = end;
  }
  return best;
}

double projection_bound_ratio(Spectral& sp, const FieldPair& u, double t) {
  const Grid& g = u.grid();
  const auto G = gradient_all(sp, u);
  double lhs[3][3] = {}, a_part = 0.0, o_part = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    const double r = norm(x);
    const Vec3 w = unit_radial_at(x);
    for (int j = 0; j < 3; ++j) {
      const PointSplit p = split_at(matrix_at(G[j].h, idx), vector_at(G[j].v, idx), w);
      for (int i = 0; i < 3; ++i) {
        const double wt = kSplitEigenvalues[i] * t - r;
        lhs[i][j] += wt * wt * (frob(p.h[i], p.h[i]) + dot(p.v[i], p.v[i]));
      }
    }
    double e = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const std::size_t c = 3 * i + j;
        const double a = t * G[j].v.at(i, idx) -
                         (x[0] * G[0].h.at(c, idx) + x[1] * G[1].h.at(c, idx) + x[2] * G[2].h.at(c, idx));
        e += a * a;
      }
      const double dv = G[0].h.at(3 * i, idx) + G[1].h.at(3 * i + 1, idx) + G[2].h.at(3 * i + 2, idx);
      const double a = t * dv - (x[0] * G[0].v.at(i, idx) + x[1] * G[1].v.at(i, idx) + x[2] * G[2].v.at(i, idx));
      e += a * a;
    }
    a_part += e;
    if (r > 0.0) {
      const double wt = t / r + 1.0;
      for (int i = 0; i < 3; ++i)
        for (std::size_t c = 0; c < 12; ++c) {
          const double o = rotation_of(x, G[0].comp(c), G[1].comp(c), G[2].comp(c), idx, i);
          o_part += wt * wt * o * o;
        }
    }
  }
  const double vol = g.cell_volume();
  double l = 0.0;
  for (auto& row : lhs)
    for (double q : row) l += std::sqrt(vol * q);
  return ratio_or_zero(l, std::sqrt(vol * a_part) + std::sqrt(vol * o_part));
}

double boundary_shell_max(const FieldPair& u, double fraction) {
  const Grid& g = u.grid();
  const double r0 = fraction * g.L();
  double m = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (norm(g.point(idx)) < r0) continue;
    double q = 0.0;
    for (std::size_t c = 0; c < 12; ++c) q += u.comp(c)[idx] * u.comp(c)[idx];
    m = std::max(m, q);
  }
  return std::sqrt(m);
}

// ---- theorem monitor

TheoremVerdict theorem_monitor(const std::vector<MonitorSample>& history, double delta, double bound) {
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0, 1)");
  TheoremVerdict v;
  v.delta = delta;
  v.bound = bound;
  if (history.empty()) return v;
  const double lo0 = history.front().e_low, hi0 = history.front().e_high;
  v.c_low = v.c_high = 1.0;
  for (const auto& s : history) {
    if (!std::isfinite(s.e_low) || !std::isfinite(s.e_high)) {
      v.blew_up = true;
      v.failure_time = s.t;
      break;
    }
    if (lo0 > 0.0) v.c_low = std::max(v.c_low, (s.e_low + s.d_low) / lo0);
    if (hi0 > 0.0) v.c_high = std::max(v.c_high, (s.e_high + s.d_high) / (hi0 * std::pow(bracket(s.t), delta)));
  }
  return v;
}

// ---- CSV

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "t,E_0_0,E_1_0,E_2_0,E_2_1,dissip_int,div_v_max,det_res_max,curl_res_max,X,Xi,Psi,led_int_ratio,"
         "led_ext_ratio,p_ratio,sob4,sob5,sob6,sob7,sob8";
}

std::string csv_row(const EnergyReport& r) {
  const double vals[] = {r.t,          r.e00,       r.e10,         r.e20,         r.e21,      r.dissip_int,
                         r.residuals.div_v, r.residuals.det, r.residuals.curl, r.X,    r.Xi,       r.Psi,
                         r.led_int,    r.led_ext,   r.p_ratio,     r.sob.sob4,    r.sob.sob5, r.sob.sob6,
                         r.sob.sob7,   r.sob.sob8};
  std::string out;
  for (std::size_t i = 0; i < std::size(vals); ++i) {
    if (i) out += ',';
    out += format_double(vals[i]);
  }
  return out;
}

}  // namespace vela
