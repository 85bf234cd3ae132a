#include "vela/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vela/error.hpp"
#include "vela/rng.hpp"

namespace vela {

Mat3 Mat3::identity() { return diagonal(1.0, 1.0, 1.0); }

Mat3 Mat3::diagonal(double d0, double d1, double d2) {
  Mat3 m;
  m(0, 0) = d0;
  m(1, 1) = d1;
  m(2, 2) = d2;
  return m;
}

Mat3 operator+(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

Mat3 operator-(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

Mat3 operator*(double s, const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
  return r;
}

Mat3 matmul(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

Vec3 matvec(const Mat3& x, const Vec3& v) {
  return {x(0, 0) * v[0] + x(0, 1) * v[1] + x(0, 2) * v[2],
          x(1, 0) * v[0] + x(1, 1) * v[1] + x(1, 2) * v[2],
          x(2, 0) * v[0] + x(2, 1) * v[1] + x(2, 2) * v[2]};
}

Mat3 transpose(const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

double trace(const Mat3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

double det(const Mat3& x) {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

double frob(const Mat3& x, const Mat3& y) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += x.a[i] * y.a[i];
  return s;
}

double frob_norm(const Mat3& x) { return std::sqrt(frob(x, x)); }

Mat3 inverse(const Mat3& x, double tol) {
  const double d = det(x);
  const double scale = frob_norm(x);
  if (!std::isfinite(d) || std::abs(d) <= tol * scale * scale * scale)
    throw InversionError("matrix is singular or ill-conditioned (det = " + std::to_string(d) + ")");
  Mat3 r;
  r(0, 0) = x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1);
  r(0, 1) = x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2);
  r(0, 2) = x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1);
  r(1, 0) = x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2);
  r(1, 1) = x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0);
  r(1, 2) = x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2);
  r(2, 0) = x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0);
  r(2, 1) = x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1);
  r(2, 2) = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
  return (1.0 / d) * r;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Rank4Tensor& Rank4Tensor::operator+=(const Rank4Tensor& o) {
  for (std::size_t i = 0; i < 81; ++i) c_[i] += o.c_[i];
  return *this;
}

Rank4Tensor& Rank4Tensor::operator-=(const Rank4Tensor& o) {
  for (std::size_t i = 0; i < 81; ++i) c_[i] -= o.c_[i];
  return *this;
}

Rank4Tensor& Rank4Tensor::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Rank4Tensor operator+(Rank4Tensor x, const Rank4Tensor& y) { return x += y; }
Rank4Tensor operator-(Rank4Tensor x, const Rank4Tensor& y) { return x -= y; }
Rank4Tensor operator*(double s, Rank4Tensor x) { return x *= s; }

double max_abs_diff(const Rank4Tensor& x, const Rank4Tensor& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < 81; ++i) m = std::max(m, std::abs(x.data()[i] - y.data()[i]));
  return m;
}

double max_abs(const Rank4Tensor& x) {
  double m = 0.0;
  for (double v : x.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Rank6Tensor& x, const Rank6Tensor& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < 729; ++i) m = std::max(m, std::abs(x.data()[i] - y.data()[i]));
  return m;
}

// ---- CounterRng

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix(mix(seed_ ^ mix(stream_)) ^ counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 CounterRng::next_normal3() { return {next_normal(), next_normal(), next_normal()}; }

Vec3 CounterRng::next_in_ball() {
  for (;;) {
    Vec3 p{2.0 * next_uniform() - 1.0, 2.0 * next_uniform() - 1.0, 2.0 * next_uniform() - 1.0};
    if (dot(p, p) <= 1.0) return p;
  }
}

Vec3 CounterRng::next_on_sphere() {
  for (;;) {
    Vec3 p = next_normal3();
    const double r = norm(p);
    if (r > 1e-12) return {p[0] / r, p[1] / r, p[2] / r};
  }
}

}  // namespace vela
