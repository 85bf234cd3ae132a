#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "vela/error.hpp"
#include "vela/tensor.hpp"

namespace vela {

/// Periodic box [-L, L)^3 with n nodes per axis; node i sits at -L + i h.
/// The origin is node n/2 on every axis.
class Grid {
 public:
  Grid(int n, double L);

  int n() const { return n_; }
  double L() const { return L_; }
  double spacing() const { return 2.0 * L_ / n_; }
  double cell_volume() const { const double h = spacing(); return h * h * h; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  double coord(int i) const { return -L_ + i * spacing(); }
  Vec3 point(std::size_t idx) const;
  /// Spacing of the wavenumber lattice, pi / L.
  double dk() const { return std::numbers::pi / L_; }

  bool operator==(const Grid& o) const { return n_ == o.n_ && L_ == o.L_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int n_;
  double L_;
};

/// N-component real field, components stored one after another, each in
/// [i][j][k] order with k fastest.
template <std::size_t N>
class Field {
 public:
  static constexpr std::size_t components = N;

  explicit Field(const Grid& g) : grid_(g), data_(N * g.size(), 0.0) {}

  const Grid& grid() const { return grid_; }
  std::size_t points() const { return grid_.size(); }

  double* comp(std::size_t c) { return data_.data() + c * grid_.size(); }
  const double* comp(std::size_t c) const { return data_.data() + c * grid_.size(); }
  std::span<double> span(std::size_t c) { return {comp(c), grid_.size()}; }
  std::span<const double> span(std::size_t c) const { return {comp(c), grid_.size()}; }
  double& at(std::size_t c, std::size_t idx) { return data_[c * grid_.size() + idx]; }
  double at(std::size_t c, std::size_t idx) const { return data_[c * grid_.size() + idx]; }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void check_grid(const Grid& g) const {
    if (grid_ != g) throw ShapeError("fields live on different grids");
  }

  Field& operator+=(const Field& o) {
    check_grid(o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_grid(o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  /// Only meaningful for matrix fields: set when the field is the gradient of
  /// a vector field, so the curl constraint is expected to hold.
  bool gradient_flag = false;

 private:
  Grid grid_;
  std::vector<double> data_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
/// Component (i, j) at index 3 i + j.
using MatrixField = Field<9>;

/// The unknown pair (H, v).
struct FieldPair {
  MatrixField h;
  VectorField v;

  explicit FieldPair(const Grid& g) : h(g), v(g) {}
  FieldPair(MatrixField hh, VectorField vv) : h(std::move(hh)), v(std::move(vv)) { h.check_grid(v.grid()); }

  const Grid& grid() const { return h.grid(); }
  double* comp(std::size_t c) { return c < 9 ? h.comp(c) : v.comp(c - 9); }
  const double* comp(std::size_t c) const { return c < 9 ? h.comp(c) : v.comp(c - 9); }
  static constexpr std::size_t components = 12;

  FieldPair& operator+=(const FieldPair& o) { h += o.h; v += o.v; return *this; }
  FieldPair& operator-=(const FieldPair& o) { h -= o.h; v -= o.v; return *this; }
  FieldPair& operator*=(double s) { h *= s; v *= s; return *this; }
  friend FieldPair operator+(FieldPair a, const FieldPair& b) { return a += b; }
  friend FieldPair operator-(FieldPair a, const FieldPair& b) { return a -= b; }
  friend FieldPair operator*(double s, FieldPair a) { return a *= s; }
};

inline Mat3 matrix_at(const MatrixField& f, std::size_t idx) {
  Mat3 m;
  for (std::size_t c = 0; c < 9; ++c) m.a[c] = f.at(c, idx);
  return m;
}
inline void set_matrix(MatrixField& f, std::size_t idx, const Mat3& m) {
  for (std::size_t c = 0; c < 9; ++c) f.at(c, idx) = m.a[c];
}
inline Vec3 vector_at(const VectorField& f, std::size_t idx) { return {f.at(0, idx), f.at(1, idx), f.at(2, idx)}; }
inline void set_vector(VectorField& f, std::size_t idx, const Vec3& v) {
  for (std::size_t c = 0; c < 3; ++c) f.at(c, idx) = v[c];
}

/// Discrete L2 norm, sqrt(h^3 sum |f|^2) over all components.
template <std::size_t N>
double l2_norm(const Field<N>& f) {
  double s = 0.0;
  for (double v : f.raw()) s += v * v;
  return std::sqrt(f.grid().cell_volume() * s);
}
double l2_norm(const FieldPair& u);

template <std::size_t N>
double max_abs(const Field<N>& f) {
  double m = 0.0;
  for (double v : f.raw()) m = std::max(m, std::abs(v));
  return m;
}

/// Largest pointwise Euclidean norm over components.
template <std::size_t N>
double max_pointwise(const Field<N>& f) {
  double m = 0.0;
  for (std::size_t idx = 0; idx < f.points(); ++idx) {
    double s = 0.0;
    for (std::size_t c = 0; c < N; ++c) s += f.at(c, idx) * f.at(c, idx);
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

/// Scalar field r = |x|.
ScalarField radius_field(const Grid& g);

}  // namespace vela
