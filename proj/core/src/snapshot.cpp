#include "vela/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace vela {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ofstream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw ShapeError("snapshot is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

const SnapshotField& Snapshot::field(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name) return f;
  throw ShapeError("snapshot has no field '" + name + "'");
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  const std::size_t np = static_cast<std::size_t>(s.n) * s.n * s.n;
  os.write("VELA", 4);
  put<std::uint32_t>(os, Snapshot::version);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.n));
  put<double>(os, s.L);
  put<double>(os, s.t);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.fields.size()));
  for (const auto& f : s.fields) {
    if (f.data.size() != np * f.components) throw ShapeError("field '" + f.name + "' does not match the grid");
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.name.size()));
    os.write(f.name.data(), static_cast<std::streamsize>(f.name.size()));
    put<std::uint32_t>(os, f.components);
    if constexpr (std::endian::native == std::endian::little)
      os.write(reinterpret_cast<const char*>(f.data.data()), static_cast<std::streamsize>(sizeof(double) * f.data.size()));
    else
      for (double v : f.data) put<double>(os, v);
  }
  if (!os) throw Error("failed writing '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "VELA", 4) != 0) throw ShapeError("not a snapshot file: bad magic");
  const auto version = get<std::uint32_t>(is);
  if (version != Snapshot::version) throw ShapeError("unsupported snapshot version " + std::to_string(version));
  Snapshot s;
  s.n = static_cast<int>(get<std::uint32_t>(is));
  s.L = get<double>(is);
  s.t = get<double>(is);
  Grid g(s.n, s.L);  // validates
  const auto count = get<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    SnapshotField f;
    const auto len = get<std::uint32_t>(is);
    if (len > 4096) throw ShapeError("snapshot field name too long");
    f.name.resize(len);
    if (!is.read(f.name.data(), len)) throw ShapeError("snapshot is truncated");
    f.components = get<std::uint32_t>(is);
    if (f.components == 0 || f.components > 64) throw ShapeError("bad component count in snapshot");
    f.data.resize(g.size() * f.components);
    if constexpr (std::endian::native == std::endian::little) {
      if (!is.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(sizeof(double) * f.data.size())))
        throw ShapeError("snapshot is truncated");
    } else {
      for (auto& v : f.data) v = get<double>(is);
    }
    s.fields.push_back(std::move(f));
  }
  return s;
}

}  // namespace vela
