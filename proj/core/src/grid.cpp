#include "vela/grid.hpp"

#include <bit>

namespace vela {

Grid::Grid(int n, double L) : n_(n), L_(L) {
  if (n < 4 || !std::has_single_bit(static_cast<unsigned>(n))) throw DomainError("grid size must be a power of two >= 4");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("box half-width must be positive");
}

Vec3 Grid::point(std::size_t idx) const {
  const std::size_t nn = static_cast<std::size_t>(n_);
  const int k = static_cast<int>(idx % nn);
  const int j = static_cast<int>((idx / nn) % nn);
  const int i = static_cast<int>(idx / (nn * nn));
  return {coord(i), coord(j), coord(k)};
}

double l2_norm(const FieldPair& u) {
  const double a = l2_norm(u.h), b = l2_norm(u.v);
  return std::sqrt(a * a + b * b);
}

ScalarField radius_field(const Grid& g) {
  ScalarField r(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) r.at(0, idx) = norm(g.point(idx));
  return r;
}

}  // namespace vela
