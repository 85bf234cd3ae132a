#include <doctest.h>

#include <cmath>

#include "vela/constitutive.hpp"
#include "vela/nullcheck.hpp"
#include "vela/rng.hpp"

using namespace vela;

namespace {

int kd(int a, int b) { return a == b ? 1 : 0; }

}  // namespace

TEST_CASE("tangential and normal parts split a vector") {
  CounterRng rng(2);
  for (int s = 0; s < 100; ++s) {
    const Vec3 w = rng.next_on_sphere();
    const Vec3 xi = rng.next_normal3();
    const Vec3 t = tangential(xi, w), n = normal_part(xi, w);
    CHECK(std::abs(dot(t, w)) < 1e-14);
    CHECK(norm(cross(n, w)) < 1e-14);
    for (int i = 0; i < 3; ++i) CHECK(t[i] + n[i] == doctest::Approx(xi[i]).epsilon(1e-14));
  }
}

TEST_CASE("Oldroyd-B derivative matches the hand-derived tensor") {
  // With dF = -dH at the identity, B = F F^T and C = F^T F both move by -(dH + dH^T).
  const OldroydBModel model({1.0, 1.0, 0.0});
  const Rank6Tensor b = b_derivative(model, 1e-5);
  double err = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n)
        for (int p = 0; p < 3; ++p)
          for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
              const double exact = -(kd(l, k) * kd(m, n) + kd(l, n) * kd(m, k)) * kd(p, j) -
                                   kd(l, m) * (kd(p, n) * kd(j, k) + kd(p, k) * kd(j, n));
              err = std::max(err, std::abs(b(l, m, n, p, j, k) - exact));
            }
  CHECK(err < 1e-8);
}

TEST_CASE("constant model has a vanishing derivative") {
  const ConstantModel model({1.3, 1.0, 0.0});
  const BTensor b = b_tensor(model);
  double m = 0.0;
  for (double v : b.derivative.data()) m = std::max(m, std::abs(v));
  CHECK(m == 0.0);
  CHECK(b.converged);
}

TEST_CASE("residual is multilinear in the three directions") {
  const NullViolatingModel model({1.0, 1.0, 0.0});
  const BTensor b = b_tensor(model);
  CounterRng rng(4);
  const Vec3 w = rng.next_on_sphere();
  const Vec3 x1 = rng.next_normal3(), x2 = rng.next_normal3(), x3 = rng.next_normal3();
  const double r = null_residual(b.total, w, x1, x2, x3);
  const Vec3 x2s{3.0 * x2[0], 3.0 * x2[1], 3.0 * x2[2]};
  CHECK(null_residual(b.total, w, x1, x2s, x3) == doctest::Approx(3.0 * r).epsilon(1e-12));
  // Normal components are projected away.
  const Vec3 x1n{x1[0] + 5.0 * w[0], x1[1] + 5.0 * w[1], x1[2] + 5.0 * w[2]};
  CHECK(null_residual(b.total, w, x1n, x2, x3) == doctest::Approx(r).epsilon(1e-10));
}

TEST_CASE("null condition holds for the physical models and fails for the planted one") {
  const MaterialParams p{1.0, 1.0, 0.0};
  const OldroydBModel oldroyd(p);
  const IsotropicModel builtin(p);
  const NullViolatingModel bad(p);
  const NullReport ro = null_condition_check(oldroyd, 200, 1);
  const NullReport rb = null_condition_check(builtin, 200, 1);
  const NullReport rv = null_condition_check(bad, 200, 1);
  CHECK(ro.pass());
  CHECK(rb.pass());
  CHECK(ro.converged);
  CHECK(rb.converged);
  CHECK_FALSE(rv.pass());
  CHECK(rv.max_total > 0.1);
  CHECK(ro.samples == 200);
}

TEST_CASE("compressible speeds keep the condition") {
  const IsotropicModel builtin({1.8, 1.0, 0.0});
  CHECK(null_condition_check(builtin, 200, 9).pass());
}

TEST_CASE("reports are reproducible from the seed") {
  const NullViolatingModel bad({1.0, 1.0, 0.0});
  const NullReport a = null_condition_check(bad, 50, 77), b = null_condition_check(bad, 50, 77);
  CHECK(a.max_total == b.max_total);
  CHECK(a.worst_omega == b.worst_omega);
  const NullReport c = null_condition_check(bad, 50, 78);
  CHECK(a.max_total != c.max_total);
}
