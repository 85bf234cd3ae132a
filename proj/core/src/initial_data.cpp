#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vela/diagnostics.hpp"
#include "vela/dynamics.hpp"
#include "vela/error.hpp"
#include "vela/rng.hpp"

namespace vela {

namespace {

struct Blob {
  Vec3 center;
  Vec3 amp;
};

std::vector<Blob> make_blobs(CounterRng rng, int count, double spread) {
  std::vector<Blob> b;
  for (int i = 0; i < count; ++i) {
    const Vec3 c = rng.next_in_ball();
    b.push_back({{spread * c[0], spread * c[1], spread * c[2]}, rng.next_normal3()});
  }
  return b;
}

VectorField sample_potential(const Grid& g, const std::vector<Blob>& blobs, double sigma) {
  VectorField f(g);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    Vec3 s{};
    for (const auto& b : blobs) {
      const Vec3 d{x[0] - b.center[0], x[1] - b.center[1], x[2] - b.center[2]};
      const double e = std::exp(-dot(d, d) * inv);
      for (int c = 0; c < 3; ++c) s[c] += b.amp[c] * e;
    }
    set_vector(f, idx, s);
  }
  return f;
}

/// curl of sum amp * gaussian, evaluated exactly.
Vec3 curl_potential(const Vec3& y, const std::vector<Blob>& blobs, double sigma) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Vec3 w{};
  for (const auto& b : blobs) {
    const Vec3 d{y[0] - b.center[0], y[1] - b.center[1], y[2] - b.center[2]};
    const double e = -std::exp(-dot(d, d) * inv) / (sigma * sigma);
    const Vec3 grad{e * d[0], e * d[1], e * d[2]};
    const Vec3 c = cross(grad, b.amp);
    for (int k = 0; k < 3; ++k) w[k] += c[k];
  }
  return w;
}

/// hdot = grad(X - x) with X the time-one flow of s * w. The displacement is
/// not masked: truncating its tail would break det(I + hdot) = 1.
MatrixField flow_gradient(Spectral& sp, const std::vector<Blob>& blobs, double sigma, double s, int substeps) {
  const Grid& g = sp.grid();
  VectorField disp(g);
  const double h = 1.0 / substeps;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    Vec3 y = x;
    for (int n = 0; n < substeps; ++n) {
      auto f = [&](const Vec3& p) {
        Vec3 w = curl_potential(p, blobs, sigma);
        return Vec3{s * w[0], s * w[1], s * w[2]};
      };
      const Vec3 a = f(y);
      const Vec3 b = f({y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1], y[2] + 0.5 * h * a[2]});
      const Vec3 c = f({y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1], y[2] + 0.5 * h * b[2]});
      const Vec3 d = f({y[0] + h * c[0], y[1] + h * c[1], y[2] + h * c[2]});
      for (int k = 0; k < 3; ++k) y[k] += h / 6.0 * (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]);
    }
    set_vector(disp, idx, {y[0] - x[0], y[1] - x[1], y[2] - x[2]});
  }
  return sp.gradient(disp);
}

double h_energy(const MatrixField& hd, const MaterialModel& model, bool at_identity) {
  State s(hd.grid());
  s.hdot = hd;
  return base_energy(s, model, at_identity);
}

double max_det_residual(const MatrixField& hd) {
  double m = 0.0;
  for (std::size_t idx = 0; idx < hd.points(); ++idx)
    m = std::max(m, std::abs(det(Mat3::identity() + matrix_at(hd, idx)) - 1.0));
  return m;
}

}  // namespace

State generate_initial_data(const Grid& g, std::uint64_t seed, double eps, const MaterialModel& model,
                            const InitialDataOptions& opt) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("amplitude must be non-negative");
  if (opt.blobs < 1 || opt.width <= 0.0 || opt.spread < 0.0 || opt.substeps < 1)
    throw DomainError("invalid initial-data options");
  State st(g);
  if (eps == 0.0) return st;

  Spectral sp(g);
  const double sigma = opt.width * g.L();
  const double spread = opt.spread * g.L();
  const CounterRng rng(seed);
  const auto vblobs = make_blobs(rng.substream(1), opt.blobs, spread);
  const auto hblobs = make_blobs(rng.substream(2), opt.blobs, spread);
  const double target = 0.5 * eps * eps;

  VectorField v = sp.dealias(sp.curl(sample_potential(g, vblobs, sigma)));
  const double ev = 0.5 * l2_norm(v) * l2_norm(v);
  if (!(ev > 0.0)) throw DegenerateInputError("velocity potential produced a zero field");
  st.vdot = std::sqrt(target / ev) * v;

  // First-order displacement: the divergence-free field itself.
  MatrixField lin = sp.gradient(sp.dealias(sp.curl(sample_potential(g, hblobs, sigma))));
  const double elin = h_energy(lin, model, true);
  if (!(elin > 0.0)) throw DegenerateInputError("displacement potential produced a zero field");
  double s = std::sqrt(target / elin);
  if (opt.linearized) {
    st.hdot = s * lin;
    st.hdot.gradient_flag = true;
    return st;
  }

  int substeps = opt.substeps;
  double previous = std::numeric_limits<double>::infinity();
  for (;;) {
    MatrixField hd(g);
    for (int it = 0; it < 12; ++it) {
      hd = flow_gradient(sp, hblobs, sigma, s, substeps);
      const double e = h_energy(hd, model, false);
      const double ratio = target / e;
      s *= std::sqrt(ratio);
      if (std::abs(ratio - 1.0) < 1e-13) break;
    }
    hd = flow_gradient(sp, hblobs, sigma, s, substeps);
    const double residual = max_det_residual(hd);
    if (residual <= opt.det_tolerance) {
      st.hdot = std::move(hd);
      st.hdot.gradient_flag = true;
      return st;
    }
    // Finer substeps only help while the flow integrator dominates the error.
    if (substeps >= 256 || residual > 0.5 * previous)
      throw DomainError("initial deformation misses det = 1 by " + format_double(residual) +
                        "; the grid does not resolve the data (try a wider data.width)");
    previous = residual;
    substeps *= 2;
  }
}

}  // namespace vela
