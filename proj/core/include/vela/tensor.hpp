#pragma once

#include <array>
#include <cstddef>

namespace vela {

using Vec3 = std::array<double, 3>;

/// 3x3 matrix stored row-major; m(i, j) is row i, column j.
struct Mat3 {
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[i * 3 + j]; }
  double operator()(int i, int j) const { return a[i * 3 + j]; }

  static Mat3 identity();
  static Mat3 diagonal(double d0, double d1, double d2);
};

Mat3 operator+(const Mat3& x, const Mat3& y);
Mat3 operator-(const Mat3& x, const Mat3& y);
Mat3 operator*(double s, const Mat3& x);
Mat3 matmul(const Mat3& x, const Mat3& y);
Vec3 matvec(const Mat3& x, const Vec3& v);
Mat3 transpose(const Mat3& x);
Mat3 outer(const Vec3& a, const Vec3& b);
double trace(const Mat3& x);
double det(const Mat3& x);
/// Frobenius inner product.
double frob(const Mat3& x, const Mat3& y);
double frob_norm(const Mat3& x);
/// Throws InversionError when |det| is below `tol` times the cube of the norm.
Mat3 inverse(const Mat3& x, double tol = 1e-12);

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 cross(const Vec3& a, const Vec3& b);

/// Rank-4 tensor over R^3, t(a, b, c, d) with the last index fastest.
class Rank4Tensor {
 public:
  double& operator()(int a, int b, int c, int d) { return c_[((a * 3 + b) * 3 + c) * 3 + d]; }
  double operator()(int a, int b, int c, int d) const { return c_[((a * 3 + b) * 3 + c) * 3 + d]; }

  std::array<double, 81>& data() { return c_; }
  const std::array<double, 81>& data() const { return c_; }

  Rank4Tensor& operator+=(const Rank4Tensor& o);
  Rank4Tensor& operator-=(const Rank4Tensor& o);
  Rank4Tensor& operator*=(double s);

 private:
  std::array<double, 81> c_{};
};

Rank4Tensor operator+(Rank4Tensor x, const Rank4Tensor& y);
Rank4Tensor operator-(Rank4Tensor x, const Rank4Tensor& y);
Rank4Tensor operator*(double s, Rank4Tensor x);
double max_abs_diff(const Rank4Tensor& x, const Rank4Tensor& y);
double max_abs(const Rank4Tensor& x);

/// Rank-6 tensor over R^3, t(a, b, c, d, e, f) with the last index fastest.
class Rank6Tensor {
 public:
  static constexpr std::size_t index(int a, int b, int c, int d, int e, int f) {
    return static_cast<std::size_t>(((((a * 3 + b) * 3 + c) * 3 + d) * 3 + e) * 3 + f);
  }
  double& operator()(int a, int b, int c, int d, int e, int f) { return c_[index(a, b, c, d, e, f)]; }
  double operator()(int a, int b, int c, int d, int e, int f) const {
    return c_[index(a, b, c, d, e, f)];
  }
  std::array<double, 729>& data() { return c_; }
  const std::array<double, 729>& data() const { return c_; }

 private:
  std::array<double, 729> c_{};
};

double max_abs_diff(const Rank6Tensor& x, const Rank6Tensor& y);

}  // namespace vela
