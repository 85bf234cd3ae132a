#include "vela/inequalities.hpp"

#include <cmath>

#include "vela/diagnostics.hpp"
#include "vela/error.hpp"
#include "vela/rng.hpp"
#include "vela/vector_fields.hpp"

namespace vela {

ScalarField windowed_function(const Grid& g, std::uint64_t seed, std::uint64_t index, const WindowedFamily& fam) {
  if (fam.modes < 1 || fam.max_wavenumber < 0 || !(fam.radius > 0.0) || !(fam.spread >= 0.0) ||
      2.0 * fam.radius + fam.spread >= 1.0)
    throw DomainError("windowed family must stay inside the box");
  CounterRng rng = CounterRng(seed, 0x1eafULL).substream(index);
  const double L = g.L();
  const Vec3 b = rng.next_in_ball();
  const Vec3 c{fam.spread * L * b[0], fam.spread * L * b[1], fam.spread * L * b[2]};
  struct Mode {
    Vec3 k;
    double amp, phase;
  };
  std::vector<Mode> modes;
  const int kmax = fam.max_wavenumber;
  for (int q = 0; q < fam.modes; ++q) {
    Mode m;
    for (int a = 0; a < 3; ++a) {
      const int j = static_cast<int>(std::floor(rng.next_uniform() * (2 * kmax + 1))) - kmax;
      m.k[a] = j * g.dk();
    }
    m.amp = rng.next_normal();
    m.phase = 2.0 * std::numbers::pi * rng.next_uniform();
    modes.push_back(m);
  }
  const double offset = rng.next_normal();
  ScalarField f(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 x = g.point(idx);
    const Vec3 d{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
    const double w = smooth_step(norm(d) / (fam.radius * L));
    if (w == 0.0) continue;
    double s = offset;
    for (const auto& m : modes) s += m.amp * std::cos(dot(m.k, x) + m.phase);
    f.at(0, idx) = w * s;
  }
  return f;
}

namespace {

template <class Fn>
BatteryResult battery(Spectral& sp, std::uint64_t seed, std::size_t count, const WindowedFamily& fam, Fn ratio) {
  BatteryResult out;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = ratio(windowed_function(sp.grid(), seed, i, fam));
    out.ratios.push_back(r);
    if (r > out.max_ratio) {
      out.max_ratio = r;
      out.worst = i;
    }
  }
  return out;
}

}  // namespace

BatteryResult hardy_battery(Spectral& sp, std::uint64_t seed, std::size_t count, const WindowedFamily& fam) {
  return battery(sp, seed, count, fam, [&](const ScalarField& f) { return hardy_ratio(sp, f); });
}

BatteryResult sobolev_battery(Spectral& sp, std::uint64_t seed, std::size_t count, double lambda,
                              const WindowedFamily& fam) {
  return battery(sp, seed, count, fam, [&](const ScalarField& f) { return sobolev3_check(sp, f, lambda); });
}

}  // namespace vela
