#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <thread>

#include "oracles.hpp"
#include "vela/error.hpp"
#include "vela/grid.hpp"
#include "vela/rng.hpp"
#include "vela/spectral.hpp"
#include "vela/vector_fields.hpp"

using namespace vela;

namespace {

constexpr double kL = 6.283185307179586;

/// Smooth random periodic field: a few low modes with random amplitudes.
ScalarField random_smooth(const Grid& g, std::uint64_t seed, int kmax = 2) {
  CounterRng rng(seed);
  ScalarField f(g);
  const double dk = g.dk();
  for (int t = 0; t < 8; ++t) {
    const double a = rng.next_normal();
    const double phase = 2.0 * std::numbers::pi * rng.next_uniform();
    double kv[3];
    for (double& k : kv) k = dk * static_cast<int>(rng.next_uniform() * (2 * kmax + 1) - kmax);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const Vec3 x = g.point(idx);
      f.at(0, idx) += a * std::cos(kv[0] * x[0] + kv[1] * x[1] + kv[2] * x[2] + phase);
    }
  }
  return f;
}

VectorField random_vector(const Grid& g, std::uint64_t seed, int kmax = 2) {
  VectorField v(g);
  for (std::size_t c = 0; c < 3; ++c) {
    const ScalarField s = random_smooth(g, seed * 7 + c, kmax);
    std::copy(s.raw().begin(), s.raw().end(), v.comp(c));
  }
  return v;
}

/// Unstructured random values on every node, exercising every resolved mode.
VectorField random_noise(const Grid& g, std::uint64_t seed) {
  CounterRng rng(seed);
  VectorField v(g);
  for (double& x : v.raw()) x = rng.next_normal();
  return v;
}

ScalarField gaussian(const Grid& g, double sigma) {
  ScalarField f(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    f.at(0, idx) = std::exp(-dot(x, x) / (2.0 * sigma * sigma));
  }
  return f;
}

/// Dense spectral differentiation matrices on an n^3 grid, built from the
/// trigonometric interpolant: D(j, l) = -(1/n) sum_k kappa_k sin(2 pi k (j - l) / n)
/// over |k| < n/2.
struct DenseOps {
  int n;
  std::array<Eigen::MatrixXd, 3> D;
  Eigen::MatrixXd lap;

  DenseOps(int nn, double L) : n(nn) {
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = -n / 2 + 1; k < n / 2; ++k)
          d1(j, l) -= k * std::numbers::pi / L * std::sin(2.0 * std::numbers::pi * k * (j - l) / n) / n;
    const int N = n * n * n;
    for (auto& m : D) m = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const int row = (i * n + j) * n + k;
          for (int t = 0; t < n; ++t) {
            D[0](row, (t * n + j) * n + k) = d1(i, t);
            D[1](row, (i * n + t) * n + k) = d1(j, t);
            D[2](row, (i * n + j) * n + t) = d1(k, t);
          }
        }
    lap = D[0] * D[0] + D[1] * D[1] + D[2] * D[2];
  }
};

Eigen::VectorXd as_vec(const double* f, int N) { return Eigen::Map<const Eigen::VectorXd>(f, N); }

double max_diff(const Eigen::VectorXd& a, const double* b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g(16, kL);
  const Vec3 o = g.point(g.index(8, 8, 8));
  CHECK(o[0] == 0.0);
  CHECK(o[1] == 0.0);
  CHECK(o[2] == 0.0);
  CHECK(g.coord(0) == -kL);
  CHECK(g.dk() == doctest::Approx(0.5));
  const ScalarField r = radius_field(g);
  CHECK(r.at(0, g.index(8, 8, 8)) == 0.0);
  CHECK(r.at(0, g.index(8, 8, 9)) == doctest::Approx(g.spacing()));
  const VectorField w = unit_radial(g);
  CHECK(w.at(0, g.index(8, 8, 8)) == 0.0);
  CHECK(norm(vector_at(w, g.index(1, 2, 3))) == doctest::Approx(1.0));
}

TEST_CASE("operations on mismatched grids throw") {
  const Grid a(8, kL), b(16, kL);
  ScalarField fa(a), fb(b);
  CHECK_THROWS_AS(fa += fb, ShapeError);
  Spectral sp(a);
  CHECK_THROWS_AS(sp.laplacian(fb), ShapeError);
}

TEST_CASE("derivatives match dense differentiation matrices") {
  const int n = 8;
  const Grid g(n, kL);
  Spectral sp(g);
  const DenseOps ops(n, kL);
  const VectorField v = random_noise(g, 1);
  const int N = static_cast<int>(g.size());
  for (int ax = 0; ax < 3; ++ax) {
    const VectorField d = sp.derivative(v, ax);
    for (int c = 0; c < 3; ++c) CHECK(max_diff(ops.D[ax] * as_vec(v.comp(c), N), d.comp(c)) < 1e-12);
  }
}

TEST_CASE("Leray projection and Poisson solve match a dense pseudo-inverse") {
  const int n = 8;
  const Grid g(n, kL);
  Spectral sp(g);
  const DenseOps ops(n, kL);
  const int N = static_cast<int>(g.size());
  const VectorField v = random_noise(g, 2);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ops.lap);

  Eigen::VectorXd div = Eigen::VectorXd::Zero(N);
  for (int c = 0; c < 3; ++c) div += ops.D[c] * as_vec(v.comp(c), N);
  const Eigen::VectorXd phi = cod.solve(div);
  const VectorField p = sp.leray_project(v);
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd expected = as_vec(v.comp(c), N) - ops.D[c] * phi;
    CHECK(max_diff(expected, p.comp(c)) < 1e-11);
  }

  ScalarField rhs(g);
  std::copy(v.comp(0), v.comp(0) + N, rhs.comp(0));
  const PoissonSolution sol = sp.poisson_solve(rhs);
  const Eigen::VectorXd ref = cod.solve(as_vec(rhs.comp(0), N));
  CHECK(max_diff(ref, sol.phi.comp(0)) < 1e-11);
  CHECK(sol.removed_mean == doctest::Approx(as_vec(rhs.comp(0), N).mean()).epsilon(1e-12));
}

TEST_CASE("Leray projection matches the naive transform oracle") {
  const int n = 16;
  const Grid g(n, kL);
  Spectral sp(g);
  const VectorField v = random_noise(g, 3);
  const auto ref = oracle::leray({v.comp(0), v.comp(1), v.comp(2)}, n, kL);
  const VectorField p = sp.leray_project(v);
  for (int c = 0; c < 3; ++c) CHECK(oracle::max_abs_diff(ref[c], p.comp(c)) < 1e-11);
}

TEST_CASE("projection identities") {
  const Grid g(16, kL);
  Spectral sp(g);
  const VectorField v = random_noise(g, 4);
  const VectorField p = sp.leray_project(v);
  const VectorField q = sp.gradient_part(v);
  CHECK(max_abs(sp.divergence(p)) < 1e-11);
  CHECK(max_abs(sp.leray_project(p) - p) < 1e-12);
  CHECK(max_abs(p + q - v) < 1e-12);
  CHECK(max_abs(sp.curl(q)) < 1e-11);
  double ip = 0.0;
  for (std::size_t i = 0; i < p.raw().size(); ++i) ip += p.raw()[i] * q.raw()[i];
  CHECK(std::abs(ip) * g.cell_volume() < 1e-10 * l2_norm(v) * l2_norm(v));
}

TEST_CASE("vector calculus identities hold discretely") {
  const Grid g(16, kL);
  Spectral sp(g);
  const ScalarField f = random_smooth(g, 5, 3);
  const VectorField v = random_vector(g, 6, 3);
  CHECK(max_abs(sp.curl(sp.gradient(f))) < 1e-11);
  CHECK(max_abs(sp.divergence(sp.curl(v))) < 1e-11);
  const ScalarField lap = sp.laplacian(f);
  CHECK(max_abs(sp.divergence(sp.gradient(f)) - lap) < 1e-11);
  CHECK(max_abs(sp.derivative(sp.derivative(f, 0), 1) - sp.derivative(sp.derivative(f, 1), 0)) < 1e-11);
  // Matrix convention: out(i, j) = d_j v^i, and the matrix divergence sums over j.
  const MatrixField G = sp.gradient(v);
  const VectorField d1 = sp.derivative(v, 1);
  double err = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(G.at(3 * i + 1, idx) - d1.at(i, idx)));
  CHECK(err < 1e-14);
  const VectorField dG = sp.divergence(G);
  const VectorField lv = sp.laplacian(v);
  CHECK(max_abs(dG - lv) < 1e-11);
}

TEST_CASE("derivatives of resolved modes are exact and the Nyquist mode is dropped") {
  const int n = 16;
  const Grid g(n, kL);
  Spectral sp(g);
  ScalarField f(g), ny(g);
  const double k = 3.0 * g.dk();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    f.at(0, idx) = std::sin(k * x[2]);
    ny.at(0, idx) = std::cos(0.5 * n * g.dk() * x[0]);
  }
  const ScalarField d = sp.derivative(f, 2);
  double err = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) err = std::max(err, std::abs(d.at(0, idx) - k * std::cos(k * g.point(idx)[2])));
  CHECK(err < 1e-13);
  CHECK(max_abs(sp.derivative(ny, 0)) < 1e-13);
  CHECK(max_abs(sp.derivative(f, 0)) < 1e-13);
}

TEST_CASE("derivatives match the naive transform oracle") {
  const int n = 16;
  const Grid g(n, kL);
  Spectral sp(g);
  const VectorField v = random_noise(g, 8);
  for (int ax = 0; ax < 3; ++ax) {
    const ScalarField d = [&] {
      ScalarField s(g);
      std::copy(v.comp(1), v.comp(1) + g.size(), s.comp(0));
      return sp.derivative(s, ax);
    }();
    CHECK(oracle::max_abs_diff(oracle::derivative(v.comp(1), n, kL, ax), d.comp(0)) < 1e-11);
  }
}

TEST_CASE("dealiasing keeps the two-thirds band and is idempotent") {
  // At n = 32 the band 3|m| < n keeps |m| <= 10 and drops |m| = 11.
  const int n = 32;
  const Grid g(n, kL);
  Spectral sp(g);
  ScalarField low(g), high(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    low.at(0, idx) = std::cos(10.0 * g.dk() * x[0]) * std::sin(3.0 * g.dk() * x[1]);
    high.at(0, idx) = std::cos(11.0 * g.dk() * x[2]);
  }
  CHECK(max_abs(sp.dealias(low) - low) < 1e-13);
  CHECK(max_abs(sp.dealias(high)) < 1e-13);
  const VectorField v = random_noise(g, 9);
  const VectorField once = sp.dealias(v);
  CHECK(max_abs(sp.dealias(once) - once) < 1e-13);
}

TEST_CASE("spectral inner product equals the physical sum") {
  const Grid g(16, kL);
  Spectral sp(g);
  const VectorField a = random_noise(g, 10), b = random_noise(g, 11);
  const Spectrum fa = sp.forward(a.comp(0)), fb = sp.forward(b.comp(0));
  double direct = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) direct += a.at(0, idx) * b.at(0, idx);
  direct *= g.cell_volume();
  CHECK(sp.inner(fa.data(), fb.data()) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("rotation fields annihilate rotation-equivariant pairs") {
  // Narrow enough that the periodic images and the truncated spectrum are negligible.
  const Grid g(64, kL);
  Spectral sp(g);
  const double sigma = 0.1 * kL;
  const ScalarField gs = gaussian(g, sigma);
  FieldPair u(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    const double w = gs.at(0, idx);
    set_matrix(u.h, idx, w * outer(x, x) + w * Mat3::identity());
    set_vector(u.v, idx, {w * x[0], w * x[1], w * x[2]});
  }
  const double scale = l2_norm(u);
  for (int i = 0; i < 3; ++i) CHECK(l2_norm(omega_tilde(sp, u, i)) < 1e-9 * scale);

  // Without the algebraic part the same field is not annihilated.
  const auto du = gradient_all(sp, u);
  VectorField plain = rotation(u.v, {du[0].v, du[1].v, du[2].v}, 2);
  CHECK(l2_norm(plain) > 0.1 * l2_norm(u.v));
  // A shifted field has a genuine angular profile.
  FieldPair shifted(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    Vec3 x = g.point(idx);
    x[0] -= 0.5;
    shifted.v.at(1, idx) = std::exp(-dot(x, x) / (2.0 * sigma * sigma));
  }
  CHECK(l2_norm(omega_tilde(sp, shifted, 2)) > 0.01 * l2_norm(shifted));
}

TEST_CASE("rotation of a radial scalar vanishes and matches x ^ grad") {
  const Grid g(64, kL);
  Spectral sp(g);
  const ScalarField f = gaussian(g, 0.1 * kL);
  const auto df = sp.gradient_all(f);
  for (int i = 0; i < 3; ++i) CHECK(max_abs(rotation(f, df, i)) < 1e-10);
  const ScalarField h = random_smooth(g, 12);
  const auto dh = sp.gradient_all(h);
  const ScalarField r2 = rotation(h, dh, 2);
  for (std::size_t idx = 0; idx < g.size(); idx += 97) {
    const Vec3 x = g.point(idx);
    CHECK(r2.at(0, idx) == doctest::Approx(x[0] * dh[1].at(0, idx) - x[1] * dh[0].at(0, idx)).epsilon(1e-13));
  }
  const Mat3 V = rotation_generator(0);
  CHECK(V(1, 2) == 1.0);
  CHECK(V(2, 1) == -1.0);
}

TEST_CASE("scaling fields on a Gaussian") {
  // For f = exp(-r^2 / 2 s^2): r d_r f = -(r^2 / s^2) f.
  const Grid g(64, kL);
  Spectral sp(g);
  const double sigma = 0.1 * kL;
  const ScalarField f = gaussian(g, sigma);
  const ScalarField s = s0(sp, f);
  double err = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    err = std::max(err, std::abs(s.at(0, idx) + dot(x, x) / (sigma * sigma) * f.at(0, idx)));
  }
  CHECK(err < 1e-9);

  FieldPair u(g), dudt(g);
  std::copy(f.raw().begin(), f.raw().end(), u.v.comp(0));
  for (std::size_t idx = 0; idx < g.size(); ++idx) dudt.v.at(0, idx) = 2.0 * f.at(0, idx);
  const double t = 0.75;
  const FieldPair st = s_tilde(sp, u, t, dudt);
  err = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    const double expected = (2.0 * t - dot(x, x) / (sigma * sigma) - 1.0) * f.at(0, idx);
    err = std::max(err, std::abs(st.v.at(0, idx) - expected));
  }
  CHECK(err < 1e-9);
  CHECK(max_abs(st.h) == 0.0);
}

TEST_CASE("smooth step and cutoffs") {
  CHECK(smooth_step(0.0) == 1.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(2.0) == 0.0);
  CHECK(smooth_step(5.0) == 0.0);
  CHECK(smooth_step(1.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double s = 1.0; s <= 2.0; s += 0.01) {
    const double v = smooth_step(s);
    CHECK(v <= prev + 1e-15);
    CHECK(smooth_step(3.0 - s) == doctest::Approx(1.0 - v).epsilon(1e-12));
    prev = v;
  }
  const Grid g(16, kL);
  const double t = 3.0, m = 5.0;
  const Cutoffs c = cutoffs(g, t, m);
  const double bt = bracket(t);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double r = norm(g.point(idx));
    CHECK(c.eta.at(0, idx) + c.gamma.at(0, idx) == doctest::Approx(1.0));
    if (m * r <= bt) CHECK(c.eta.at(0, idx) == 1.0);
    if (m * r >= 2.0 * bt) CHECK(c.eta.at(0, idx) == 0.0);
  }
}

TEST_CASE("separate spectral instances run concurrently") {
  const Grid g(16, kL);
  const VectorField v = random_noise(g, 13);
  VectorField a(g), b(g);
  std::thread t1([&] { Spectral sp(g); a = sp.leray_project(v); });
  std::thread t2([&] { Spectral sp(g); b = sp.leray_project(v); });
  t1.join();
  t2.join();
  CHECK(max_abs(a - b) == 0.0);
}

