#pragma once

#include <cstdint>

#include "vela/constitutive.hpp"
#include "vela/tensor.hpp"

namespace vela {

/// Derivative of the transformed tensor at H = I, stored as
/// b(l,m,n,p,j,k) = d ahat(l,m,p,j) / d H(k,n), plus the total tensor that
/// also carries the ahat(I)(l,m,p,j) d(n,k) part.
struct BTensor {
  Rank6Tensor derivative;
  Rank6Tensor total;
  double step = 0.0;
  /// Max entry difference between steps h and h/2.
  double richardson_diff = 0.0;
  bool converged = true;
};

/// Central differences with step h, cross-checked against h/2; `converged` is
/// false when the two disagree by more than `tol`.
BTensor b_tensor(const MaterialModel& model, double h = 1e-5, double tol = 1e-6);
Rank6Tensor b_derivative(const MaterialModel& model, double h);

/// Component of xi orthogonal to the unit vector w.
Vec3 tangential(const Vec3& xi, const Vec3& w);
/// Component of xi along the unit vector w.
Vec3 normal_part(const Vec3& xi, const Vec3& w);

/// |sum b(l,m,n,p,j,k) w_l w_m w_n (P xi1)_p (P xi2)_j (P xi3)_k| with P the
/// tangential projection.
double null_residual(const Rank6Tensor& b, const Vec3& w, const Vec3& xi1, const Vec3& xi2, const Vec3& xi3);

struct NullReport {
  std::size_t samples = 0;
  double threshold = 0.0;
  double max_derivative = 0.0;
  double max_delta = 0.0;
  double max_total = 0.0;
  Vec3 worst_omega{};
  Vec3 worst_xi1{}, worst_xi2{}, worst_xi3{};
  bool converged = true;
  double richardson_diff = 0.0;
  bool pass() const { return max_total <= threshold; }
};

/// Samples unit w and xi in the unit ball from one seed.
NullReport null_condition_check(const MaterialModel& model, std::size_t samples, std::uint64_t seed,
                                double threshold = 1e-6, double h = 1e-5);

}  // namespace vela
