#include "vela/vector_fields.hpp"

#include <cmath>

namespace vela {

Mat3 rotation_generator(int i) {
  Mat3 v;
  const int j = (i + 1) % 3, l = (i + 2) % 3;
  v(j, l) = 1.0;
  v(l, j) = -1.0;
  return v;
}

double rotation_of(const Vec3& x, const double* g0, const double* g1, const double* g2, std::size_t idx, int i) {
  switch (i) {
    case 0: return x[1] * g2[idx] - x[2] * g1[idx];
    case 1: return x[2] * g0[idx] - x[0] * g2[idx];
    default: return x[0] * g1[idx] - x[1] * g0[idx];
  }
}

std::array<FieldPair, 3> gradient_all(Spectral& sp, const FieldPair& u) {
  auto gh = sp.gradient_all(u.h);
  auto gv = sp.gradient_all(u.v);
  return {FieldPair(std::move(gh[0]), std::move(gv[0])), FieldPair(std::move(gh[1]), std::move(gv[1])),
          FieldPair(std::move(gh[2]), std::move(gv[2]))};
}

FieldPair omega_tilde(const FieldPair& u, const std::array<FieldPair, 3>& du, int i) {
  const Grid& g = u.grid();
  FieldPair out(g);
  const Mat3 V = rotation_generator(i);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    for (std::size_t c = 0; c < 12; ++c)
      out.comp(c)[idx] = rotation_of(x, du[0].comp(c), du[1].comp(c), du[2].comp(c), idx, i);
    const Mat3 H = matrix_at(u.h, idx);
    const Mat3 comm = matmul(V, H) - matmul(H, V);
    for (std::size_t c = 0; c < 9; ++c) out.h.at(c, idx) += comm.a[c];
    const Vec3 vv = matvec(V, vector_at(u.v, idx));
    for (std::size_t c = 0; c < 3; ++c) out.v.at(c, idx) += vv[c];
  }
  return out;
}

FieldPair omega_tilde(Spectral& sp, const FieldPair& u, int i) { return omega_tilde(u, gradient_all(sp, u), i); }

VectorField omega_tilde(const VectorField& v, const std::array<VectorField, 3>& dv, int i) {
  VectorField out = rotation(v, dv, i);
  const Mat3 V = rotation_generator(i);
  for (std::size_t idx = 0; idx < v.points(); ++idx) {
    const Vec3 vv = matvec(V, vector_at(v, idx));
    for (std::size_t c = 0; c < 3; ++c) out.at(c, idx) += vv[c];
  }
  return out;
}

FieldPair radial_scaling(const FieldPair& u, const std::array<FieldPair, 3>& du) {
  const Grid& g = u.grid();
  FieldPair out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    for (std::size_t c = 0; c < 12; ++c)
      out.comp(c)[idx] = x[0] * du[0].comp(c)[idx] + x[1] * du[1].comp(c)[idx] + x[2] * du[2].comp(c)[idx];
  }
  return out;
}

FieldPair s_tilde(const FieldPair& u, const std::array<FieldPair, 3>& du, double t, const FieldPair& dudt) {
  FieldPair out = radial_scaling(u, du);
  const std::size_t np = u.grid().size();
  for (std::size_t c = 0; c < 12; ++c) {
    double* o = out.comp(c);
    const double* a = u.comp(c);
    const double* b = dudt.comp(c);
    for (std::size_t idx = 0; idx < np; ++idx) o[idx] += t * b[idx] - a[idx];
  }
  return out;
}

FieldPair s_tilde(Spectral& sp, const FieldPair& u, double t, const FieldPair& dudt) {
  return s_tilde(u, gradient_all(sp, u), t, dudt);
}

ScalarField s0(Spectral& sp, const ScalarField& f) { return radial_scaling(f, sp.gradient_all(f)); }

double smooth_step(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - s));
  const double b = std::exp(-1.0 / (s - 1.0));
  return a / (a + b);
}

Cutoffs cutoffs(const Grid& g, double t, double m) {
  Cutoffs c{ScalarField(g), ScalarField(g)};
  const double bt = bracket(t);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double e = smooth_step(m * norm(g.point(idx)) / bt);
    c.eta.at(0, idx) = e;
    c.gamma.at(0, idx) = 1.0 - e;
  }
  return c;
}

VectorField unit_radial(const Grid& g) {
  VectorField w(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) set_vector(w, idx, unit_radial_at(g.point(idx)));
  return w;
}

}  // namespace vela
