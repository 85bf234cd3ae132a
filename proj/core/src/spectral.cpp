#include "vela/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace vela {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_mode(int a, int n) { return a <= n / 2 ? a : a - n; }

}  // namespace

Spectral::Spectral(const Grid& g) : grid_(g) {
  const int n = g.n();
  const int nh = n / 2 + 1;
  nspec_ = static_cast<std::size_t>(n) * n * nh;
  for (auto& v : k_) v.assign(nspec_, 0.0);
  k2_.assign(nspec_, 0.0);
  mask_.assign(nspec_, 0);
  weight_.assign(nspec_, 0.0);
  const double dk = g.dk();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < nh; ++c) {
        const std::size_t s = (static_cast<std::size_t>(a) * n + b) * nh + c;
        const int m[3] = {signed_mode(a, n), signed_mode(b, n), c};
        bool band = true;
        for (int ax = 0; ax < 3; ++ax) {
          const bool nyquist = (m[ax] == n / 2) || (m[ax] == -n / 2);
          k_[ax][s] = nyquist ? 0.0 : m[ax] * dk;
          band = band && 3 * std::abs(m[ax]) < n;
        }
        k2_[s] = k_[0][s] * k_[0][s] + k_[1][s] * k_[1][s] + k_[2][s] * k_[2][s];
        mask_[s] = band ? 1 : 0;
        weight_[s] = (c == 0 || c == n / 2) ? 1.0 : 2.0;
      }

  work_.assign(nspec_, Complex(0.0, 0.0));
  std::lock_guard<std::mutex> lock(planner_mutex());
  scratch_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * nspec_));
  double* rbuf = fftw_alloc_real(g.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plan_fwd_ = fftw_plan_dft_r2c_3d(n, n, n, rbuf, reinterpret_cast<fftw_complex*>(scratch_), flags);
  plan_inv_ = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(scratch_), rbuf, flags);
  fftw_free(rbuf);
  if (!plan_fwd_ || !plan_inv_) throw CapabilityError("FFTW could not create plans");
}

Spectral::~Spectral() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(scratch_);
}

void Spectral::check(const Grid& g) const {
  if (g != grid_) throw ShapeError("field grid does not match the spectral operator grid");
}

void Spectral::forward(const double* in, Complex* out) {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

Spectrum Spectral::forward(const double* in) {
  Spectrum s(nspec_);
  forward(in, s.data());
  return s;
}

void Spectral::inverse(const Complex* in, double* out) {
  std::memcpy(static_cast<void*>(scratch_), in, sizeof(Complex) * nspec_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_), reinterpret_cast<fftw_complex*>(scratch_), out);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  const std::size_t np = grid_.size();
  for (std::size_t i = 0; i < np; ++i) out[i] *= scale;
}

double Spectral::inner(const Complex* a, const Complex* b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nspec_; ++i) s += weight_[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  const double np = static_cast<double>(grid_.size());
  return s * grid_.cell_volume() / np;
}

void Spectral::apply_mask(Complex* s) const {
  for (std::size_t i = 0; i < nspec_; ++i)
    if (!mask_[i]) s[i] = Complex(0.0, 0.0);
}

void Spectral::derivative(const double* f, int axis, double* out) {
  forward(f, work_.data());
  const auto& ka = k_[axis];
  for (std::size_t s = 0; s < nspec_; ++s) work_[s] *= Complex(0.0, ka[s]);
  inverse(work_.data(), out);
}

VectorField Spectral::gradient(const ScalarField& f) {
  auto g = gradient_all(f);
  VectorField out(grid_);
  for (int a = 0; a < 3; ++a) std::memcpy(out.comp(a), g[a].comp(0), sizeof(double) * grid_.size());
  return out;
}

MatrixField Spectral::gradient(const VectorField& v) {
  auto g = gradient_all(v);
  MatrixField out(grid_);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) std::memcpy(out.comp(3 * i + j), g[j].comp(i), sizeof(double) * grid_.size());
  out.gradient_flag = true;
  return out;
}

ScalarField Spectral::divergence(const VectorField& v) {
  check(v.grid());
  Spectrum acc(nspec_, Complex(0.0, 0.0));
  for (int a = 0; a < 3; ++a) {
    forward(v.comp(a), work_.data());
    for (std::size_t s = 0; s < nspec_; ++s) acc[s] += Complex(0.0, k_[a][s]) * work_[s];
  }
  ScalarField out(grid_);
  inverse(acc.data(), out.comp(0));
  return out;
}

VectorField Spectral::divergence(const MatrixField& h) {
  check(h.grid());
  VectorField out(grid_);
  Spectrum acc(nspec_);
  for (int i = 0; i < 3; ++i) {
    std::fill(acc.begin(), acc.end(), Complex(0.0, 0.0));
    for (int j = 0; j < 3; ++j) {
      forward(h.comp(3 * i + j), work_.data());
      for (std::size_t s = 0; s < nspec_; ++s) acc[s] += Complex(0.0, k_[j][s]) * work_[s];
    }
    inverse(acc.data(), out.comp(i));
  }
  return out;
}

VectorField Spectral::curl(const VectorField& v) {
  auto g = gradient_all(v);  // g[a] component c = d_a v^c
  VectorField out(grid_);
  const std::size_t np = grid_.size();
  for (std::size_t i = 0; i < np; ++i) {
    out.at(0, i) = g[1].at(2, i) - g[2].at(1, i);
    out.at(1, i) = g[2].at(0, i) - g[0].at(2, i);
    out.at(2, i) = g[0].at(1, i) - g[1].at(0, i);
  }
  return out;
}

VectorField Spectral::leray_project(const VectorField& v) {
  check(v.grid());
  std::array<Spectrum, 3> vh;
  for (int a = 0; a < 3; ++a) vh[a] = forward(v.comp(a));
  for (std::size_t s = 0; s < nspec_; ++s) {
    if (k2_[s] == 0.0) continue;
    const Complex kv = k_[0][s] * vh[0][s] + k_[1][s] * vh[1][s] + k_[2][s] * vh[2][s];
    const Complex f = kv / k2_[s];
    for (int a = 0; a < 3; ++a) vh[a][s] -= k_[a][s] * f;
  }
  VectorField out(grid_);
  for (int a = 0; a < 3; ++a) inverse(vh[a].data(), out.comp(a));
  return out;
}

VectorField Spectral::gradient_part(const VectorField& v) { return v - leray_project(v); }

PoissonSolution Spectral::poisson_solve(const ScalarField& rhs) {
  check(rhs.grid());
  forward(rhs.comp(0), work_.data());
  const double mean = work_[0].real() / static_cast<double>(grid_.size());
  for (std::size_t s = 0; s < nspec_; ++s) work_[s] = k2_[s] == 0.0 ? Complex(0.0, 0.0) : -work_[s] / k2_[s];
  PoissonSolution out{ScalarField(grid_), mean};
  inverse(work_.data(), out.phi.comp(0));
  return out;
}

}  // namespace vela
