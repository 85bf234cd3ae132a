#include "vela/nullcheck.hpp"

#include <cmath>

#include "vela/error.hpp"
#include "vela/rng.hpp"

namespace vela {

Rank6Tensor b_derivative(const MaterialModel& model, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  Rank6Tensor d;
  for (int k = 0; k < 3; ++k)
    for (int n = 0; n < 3; ++n) {
      Mat3 hp = Mat3::identity(), hm = Mat3::identity();
      hp(k, n) += h;
      hm(k, n) -= h;
      const Rank4Tensor diff = (1.0 / (2.0 * h)) * (model.ahat(hp) - model.ahat(hm));
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m)
          for (int p = 0; p < 3; ++p)
            for (int j = 0; j < 3; ++j) d(l, m, n, p, j, k) = diff(l, m, p, j);
    }
  return d;
}

BTensor b_tensor(const MaterialModel& model, double h, double tol) {
  BTensor out;
  out.step = h;
  out.derivative = b_derivative(model, h);
  out.richardson_diff = max_abs_diff(out.derivative, b_derivative(model, 0.5 * h));
  out.converged = out.richardson_diff <= tol;
  const Rank4Tensor id = model.ahat(Mat3::identity());
  out.total = out.derivative;
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n)
        for (int p = 0; p < 3; ++p)
          for (int j = 0; j < 3; ++j) out.total(l, m, n, p, j, n) += id(l, m, p, j);
  return out;
}

Vec3 tangential(const Vec3& xi, const Vec3& w) {
  const double s = dot(xi, w);
  return {xi[0] - s * w[0], xi[1] - s * w[1], xi[2] - s * w[2]};
}

Vec3 normal_part(const Vec3& xi, const Vec3& w) {
  const double s = dot(xi, w);
  return {s * w[0], s * w[1], s * w[2]};
}

double null_residual(const Rank6Tensor& b, const Vec3& w, const Vec3& xi1, const Vec3& xi2, const Vec3& xi3) {
  const Vec3 a = tangential(xi1, w), c = tangential(xi2, w), e = tangential(xi3, w);
  double s = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) {
        const double www = w[l] * w[m] * w[n];
        for (int p = 0; p < 3; ++p)
          for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) s += b(l, m, n, p, j, k) * www * a[p] * c[j] * e[k];
      }
  return std::abs(s);
}

NullReport null_condition_check(const MaterialModel& model, std::size_t samples, std::uint64_t seed,
                                double threshold, double h) {
  if (samples == 0) throw DomainError("need at least one sample");
  const BTensor b = b_tensor(model, h);
  Rank6Tensor delta_part = b.total;
  for (std::size_t i = 0; i < 729; ++i) delta_part.data()[i] -= b.derivative.data()[i];

  NullReport rep;
  rep.samples = samples;
  rep.threshold = threshold;
  rep.converged = b.converged;
  rep.richardson_diff = b.richardson_diff;
  CounterRng rng(seed, 0x4e554c4c);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec3 w = rng.next_on_sphere();
    const Vec3 x1 = rng.next_in_ball(), x2 = rng.next_in_ball(), x3 = rng.next_in_ball();
    const double rt = null_residual(b.total, w, x1, x2, x3);
    rep.max_derivative = std::max(rep.max_derivative, null_residual(b.derivative, w, x1, x2, x3));
    rep.max_delta = std::max(rep.max_delta, null_residual(delta_part, w, x1, x2, x3));
    if (rt > rep.max_total || s == 0) {
      rep.max_total = rt;
      rep.worst_omega = w;
      rep.worst_xi1 = x1;
      rep.worst_xi2 = x2;
      rep.worst_xi3 = x3;
    }
  }
  return rep;
}

}  // namespace vela
