#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "vela/grid.hpp"

namespace vela {

using Complex = std::complex<double>;

/// Half-spectrum storage for one real component: index (a n + b)(n/2 + 1) + c.
using Spectrum = std::vector<Complex>;

struct PoissonSolution {
  ScalarField phi;
  /// Mean of the right-hand side that was discarded to make it solvable.
  double removed_mean = 0.0;
};

/// FFT-based differential operators on one grid. Plans are created once per
/// instance under a process-wide lock; execution uses instance-local scratch,
/// so one instance must not be shared between threads.
class Spectral {
 public:
  explicit Spectral(const Grid& g);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }
  std::size_t spectral_size() const { return nspec_; }

  /// Unnormalised forward transform.
  void forward(const double* in, Complex* out);
  /// Normalised inverse transform; `in` is left untouched.
  void inverse(const Complex* in, double* out);
  Spectrum forward(const double* in);

  /// Derivative multiplier along an axis (Nyquist set to zero).
  const std::vector<double>& k(int axis) const { return k_[axis]; }
  /// |k|^2 built from the same multipliers, so div grad = laplacian exactly.
  const std::vector<double>& k2() const { return k2_; }
  /// 1 inside the 2/3-rule band, 0 outside.
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  /// Multiplicity of a half-spectrum mode in the full spectrum (1 or 2).
  double weight(std::size_t s) const { return weight_[s]; }

  /// Integral of a b over the box from the two half spectra.
  double inner(const Complex* a, const Complex* b) const;

  void apply_mask(Complex* s) const;
  template <std::size_t N>
  Field<N> dealias(const Field<N>& f);

  void derivative(const double* f, int axis, double* out);
  template <std::size_t N>
  Field<N> derivative(const Field<N>& f, int axis);
  /// All three first derivatives of every component: one forward and three
  /// inverse transforms per component.
  template <std::size_t N>
  std::array<Field<N>, 3> gradient_all(const Field<N>& f);

  VectorField gradient(const ScalarField& f);
  /// out(i, j) = d_j v^i.
  MatrixField gradient(const VectorField& v);
  ScalarField divergence(const VectorField& v);
  /// out^i = d_j H(i, j).
  VectorField divergence(const MatrixField& h);
  VectorField curl(const VectorField& v);
  template <std::size_t N>
  Field<N> laplacian(const Field<N>& f);

  /// Removes the gradient part; the result is discretely divergence free.
  VectorField leray_project(const VectorField& v);
  /// Gradient part, v - leray_project(v).
  VectorField gradient_part(const VectorField& v);
  /// Solves laplacian(phi) = rhs with zero-mean phi after removing the mean of rhs.
  PoissonSolution poisson_solve(const ScalarField& rhs);

 private:
  void check(const Grid& g) const;

  Grid grid_;
  std::size_t nspec_;
  std::array<std::vector<double>, 3> k_;
  std::vector<double> k2_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> weight_;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  Complex* scratch_ = nullptr;
  Spectrum work_;
};

template <std::size_t N>
Field<N> Spectral::dealias(const Field<N>& f) {
  check(f.grid());
  Field<N> out(grid_);
  for (std::size_t c = 0; c < N; ++c) {
    forward(f.comp(c), work_.data());
    apply_mask(work_.data());
    inverse(work_.data(), out.comp(c));
  }
  out.gradient_flag = f.gradient_flag;
  return out;
}

template <std::size_t N>
Field<N> Spectral::derivative(const Field<N>& f, int axis) {
  check(f.grid());
  Field<N> out(grid_);
  for (std::size_t c = 0; c < N; ++c) derivative(f.comp(c), axis, out.comp(c));
  return out;
}

template <std::size_t N>
std::array<Field<N>, 3> Spectral::gradient_all(const Field<N>& f) {
  check(f.grid());
  std::array<Field<N>, 3> out{Field<N>(grid_), Field<N>(grid_), Field<N>(grid_)};
  Spectrum d(nspec_);
  for (std::size_t c = 0; c < N; ++c) {
    forward(f.comp(c), work_.data());
    for (int a = 0; a < 3; ++a) {
      const auto& ka = k_[a];
      for (std::size_t s = 0; s < nspec_; ++s) d[s] = Complex(0.0, ka[s]) * work_[s];
      inverse(d.data(), out[a].comp(c));
    }
  }
  return out;
}

template <std::size_t N>
Field<N> Spectral::laplacian(const Field<N>& f) {
  check(f.grid());
  Field<N> out(grid_);
  for (std::size_t c = 0; c < N; ++c) {
    forward(f.comp(c), work_.data());
    for (std::size_t s = 0; s < nspec_; ++s) work_[s] *= -k2_[s];
    inverse(work_.data(), out.comp(c));
  }
  return out;
}

}  // namespace vela
