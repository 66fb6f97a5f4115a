#pragma once

#include <doctest.h>

#include <algorithm>

#include "fanlib/fan.hpp"

namespace fanlib::t {

inline AbGroup Z(std::size_t r = 1) { return AbGroup::free(r); }
inline GroupHom hom(const AbGroup& a, const AbGroup& b, const std::vector<Vec>& rows) {
  return GroupHom(a, b, Matrix::from_rows(rows, a.ngens()));
}
inline FineMonoid mon(const AbGroup& g, std::vector<Vec> gens) { return FineMonoid(g, std::move(gens)); }
inline FineMonoid nat(std::size_t r = 1) {
  std::vector<Vec> g;
  for (std::size_t i = 0; i < r; ++i) g.push_back(unit_vector(r, i));
  return mon(Z(r), g);
}
inline FineMonoid integers() { return mon(Z(), {{1}, {-1}}); }
inline std::vector<Vec> sorted(std::vector<Vec> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace fanlib::t
