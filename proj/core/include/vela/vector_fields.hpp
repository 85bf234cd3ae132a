#pragma once

#include <array>

#include "vela/grid.hpp"
#include "vela/spectral.hpp"

namespace vela {

/// Generator of rotations about axis i acting on vectors: V(j, l) = eps(i, j, l).
Mat3 rotation_generator(int i);

/// (x ^ grad)_i f = eps(i, j, k) x_j d_k f, from precomputed derivatives g[k].
double rotation_of(const Vec3& x, const double* g0, const double* g1, const double* g2, std::size_t idx, int i);

/// d_k U for k = 0, 1, 2.
std::array<FieldPair, 3> gradient_all(Spectral& sp, const FieldPair& u);

/// Rotation field acting on a pair: Omega_i H + [V_i, H] and Omega_i v + V_i v.
FieldPair omega_tilde(const FieldPair& u, const std::array<FieldPair, 3>& du, int i);
FieldPair omega_tilde(Spectral& sp, const FieldPair& u, int i);
VectorField omega_tilde(const VectorField& v, const std::array<VectorField, 3>& dv, int i);
/// Plain rotation field applied componentwise (no V term).
template <std::size_t N>
Field<N> rotation(const Field<N>& f, const std::array<Field<N>, 3>& df, int i) {
  Field<N> out(f.grid());
  for (std::size_t idx = 0; idx < f.points(); ++idx) {
    const Vec3 x = f.grid().point(idx);
    for (std::size_t c = 0; c < N; ++c) out.at(c, idx) = rotation_of(x, df[0].comp(c), df[1].comp(c), df[2].comp(c), idx, i);
  }
  return out;
}

/// x . grad U.
FieldPair radial_scaling(const FieldPair& u, const std::array<FieldPair, 3>& du);
template <std::size_t N>
Field<N> radial_scaling(const Field<N>& f, const std::array<Field<N>, 3>& df) {
  Field<N> out(f.grid());
  for (std::size_t idx = 0; idx < f.points(); ++idx) {
    const Vec3 x = f.grid().point(idx);
    for (std::size_t c = 0; c < N; ++c)
      out.at(c, idx) = x[0] * df[0].at(c, idx) + x[1] * df[1].at(c, idx) + x[2] * df[2].at(c, idx);
  }
  return out;
}

/// Scaling field minus the identity: t dU/dt + x . grad U - U.
FieldPair s_tilde(const FieldPair& u, const std::array<FieldPair, 3>& du, double t, const FieldPair& dudt);
FieldPair s_tilde(Spectral& sp, const FieldPair& u, double t, const FieldPair& dudt);
/// Time-independent scaling r d_r f.
ScalarField s0(Spectral& sp, const ScalarField& f);

/// Smooth step: 1 on [0, 1], 0 on [2, inf), C-infinity in between.
double smooth_step(double s);
/// <x> = sqrt(1 + x^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

struct Cutoffs {
  ScalarField eta;    ///< interior cutoff zeta(m r / <t>)
  ScalarField gamma;  ///< exterior cutoff 1 - eta
};
Cutoffs cutoffs(const Grid& g, double t, double m = 5.0);

/// x / |x|, set to zero at the origin node.
VectorField unit_radial(const Grid& g);
inline Vec3 unit_radial_at(const Vec3& x) {
  const double r = norm(x);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  return {x[0] / r, x[1] / r, x[2] / r};
}

}  // namespace vela
