#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vela/grid.hpp"

namespace vela {

/// Binary snapshot layout, all little endian:
///   "VELA", u32 version, u32 n, f64 L, f64 t, u32 field count, then per field
///   u32 name length, name bytes, u32 component count and
///   f64 data ordered [component][i][j][k].
struct SnapshotField {
  std::string name;
  std::uint32_t components = 0;
  std::vector<double> data;
};

struct Snapshot {
  static constexpr std::uint32_t version = 1;
  int n = 0;
  double L = 0.0;
  double t = 0.0;
  std::vector<SnapshotField> fields;

  const SnapshotField& field(const std::string& name) const;
  Grid grid() const { return Grid(n, L); }
};

template <std::size_t N>
SnapshotField to_snapshot_field(const std::string& name, const Field<N>& f) {
  return {name, static_cast<std::uint32_t>(N), f.raw()};
}

template <std::size_t N>
Field<N> from_snapshot_field(const Snapshot& s, const std::string& name) {
  const SnapshotField& sf = s.field(name);
  if (sf.components != N) throw ShapeError("snapshot field '" + name + "' has the wrong component count");
  Field<N> f(s.grid());
  f.raw() = sf.data;
  return f;
}

void write_snapshot(const std::string& path, const Snapshot& s);
/// Throws ShapeError on malformed input or unsupported version.
Snapshot read_snapshot(const std::string& path);

}  // namespace vela
