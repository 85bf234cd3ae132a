#pragma once

#include <cstdint>
#include <vector>

#include "vela/grid.hpp"
#include "vela/spectral.hpp"

namespace vela {

/// Seeded family of smooth, compactly supported, band-limited test functions:
/// a random trigonometric sum times a smooth window centred near the origin.
struct WindowedFamily {
  int modes = 6;
  /// Largest wavenumber of the trigonometric sum, in units of the grid's dk.
  int max_wavenumber = 3;
  /// The window is 1 for |x - c| <= radius L and 0 beyond twice that.
  double radius = 0.3;
  /// Window centres lie within this fraction of L from the origin.
  double spread = 0.1;
};

ScalarField windowed_function(const Grid& g, std::uint64_t seed, std::uint64_t index, const WindowedFamily& fam = {});

struct BatteryResult {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  std::size_t worst = 0;
};

/// Hardy ratios of `count` members of the windowed family.
BatteryResult hardy_battery(Spectral& sp, std::uint64_t seed, std::size_t count, const WindowedFamily& fam = {});
/// Radial Sobolev ratios of `count` members of the windowed family.
BatteryResult sobolev_battery(Spectral& sp, std::uint64_t seed, std::size_t count, double lambda,
                              const WindowedFamily& fam = {});

}  // namespace vela
