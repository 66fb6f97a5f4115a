#pragma once

// Shared test-side computations: conditions checked separately from the library's own
// classifiers, and instance families used by both the property and acceptance suites.

#include <set>

#include "gen.hpp"
#include "oracle.hpp"

namespace fanlib::checks {

// Square Q* -> P*, Q -> P is a pushout and h* is injective with finite cokernel.
inline bool cze_pushout_condition(const MonoidHom& h) {
  SmithReport u = smith_decompose(units_map(h));
  if (!u.is_injective || !u.cokernel.group.is_finite()) return false;
  const FineMonoid& q = h.source();
  const FineMonoid& p = h.target();
  DirectSum s = direct_sum(q.ambient(), p.ambient());
  std::vector<Vec> rel;
  for (auto i : q.unit_gens()) rel.push_back(vsub(s.in1.apply(q.gens()[i]), s.in2.apply(h.apply(q.gens()[i]))));
  SubgroupWithMap quo = quotient(s.group, rel);
  std::vector<Vec> gens;
  for (const auto& g : q.gens()) gens.push_back(quo.map.apply(s.in1.apply(g)));
  for (auto i : p.unit_gens()) {
    gens.push_back(quo.map.apply(s.in2.apply(p.gens()[i])));
    gens.push_back(quo.map.apply(s.in2.apply(vneg(p.gens()[i]))));
  }
  FineMonoid r(quo.group, gens);
  Matrix phi(p.ambient().ngens(), quo.group.ngens());
  for (std::size_t k = 0; k < quo.group.ngens(); ++k) {
    auto pre = preimage(quo.map, unit_vector(quo.group.ngens(), k));
    if (!pre) return false;
    Vec img = p.ambient().reduce(vadd(h.apply(s.pr1.apply(*pre)), s.pr2.apply(*pre)));
    for (std::size_t i = 0; i < img.size(); ++i) phi(i, k) = img[i];
  }
  return is_isomorphism(MonoidHom(r, p, GroupHom(quo.group, p.ambient(), phi)));
}

// h injective, sharpening an isomorphism, P^gp / Q^gp finite.
inline bool cze_sharp_condition(const MonoidHom& h) {
  return is_injective(h) && is_isomorphism(sharpening(h)) &&
         smith_decompose(gp_map(h)).cokernel.group.is_finite();
}

struct BasisCheck {
  bool holds = false;
  std::size_t size = 0;
};

// A transversal of P* / h(Q*) is a Q-basis of P, tested on all sums of at most `depth`
// copies of each generator.
inline BasisCheck cze_basis_condition(const MonoidHom& h, Int depth = 2) {
  BasisCheck out;
  if (!smith_decompose(gp_map(h)).is_injective) return out;
  SmithReport u = smith_decompose(units_map(h));
  if (!u.cokernel.group.is_finite()) return out;
  const FineMonoid& p = h.target();
  std::vector<Vec> s;
  for (const auto& c : u.cokernel.group.elements()) {
    auto l = preimage(u.cokernel.map, c);
    s.push_back(p.units().embedding().apply(*l));
  }
  out.size = s.size();
  FineMonoid image(p.ambient(), h.image_gens());
  std::size_t k = p.ngens();
  Vec a(k, 0);
  for (bool more = true; more;) {
    Vec x = p.ambient().zero();
    for (std::size_t i = 0; i < k; ++i) x = vadd(x, vscale(a[i], p.gens()[i]));
    x = p.ambient().reduce(x);
    std::size_t hits = 0;
    for (const auto& e : s) hits += image.contains(p.ambient().reduce(vsub(x, e)));
    if (hits != 1) return out;
    more = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (a[i] < depth) {
        ++a[i];
        more = true;
        break;
      }
      a[i] = 0;
    }
  }
  out.holds = true;
  return out;
}

// CZE instances: pushing the unit group out along a finite-index injection.
inline MonoidHom cze_instance(testgen::Rng& r) {
  testgen::MonoidOptions o;
  o.max_gens = 4;
  o.max_rank = 3;
  FineMonoid q = testgen::random_monoid(r, o);
  const AbGroup& a = q.units().group();
  Matrix m = Matrix::identity(a.ngens());
  for (std::size_t i = 0; i < a.rank(); ++i) {
    m(i, i) = r.range(1, 3);
    for (std::size_t j = i + 1; j < a.rank(); ++j) m(i, j) = r.range(-1, 1);
  }
  return cze_cover_basic(q, GroupHom(a, a, m));
}

// Non-CZE instances of four kinds: multiplication, localization, collapsing, saturation.
inline MonoidHom non_cze_instance(testgen::Rng& r, int kind) {
  switch (kind % 4) {
    case 0: {
      FineMonoid p = testgen::random_sharp_monoid(r, 1 + r.index(2), 3, 3);
      Int k = r.range(2, 4);
      Matrix m = Matrix::identity(p.ambient().rank());
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) = k;
      return MonoidHom(p, p, GroupHom(p.ambient(), p.ambient(), m));
    }
    case 1: {
      FineMonoid p = testgen::random_sharp_monoid(r, 1 + r.index(3), 4, 3);
      auto fs = faces(p);
      const Face& f = fs[1 + r.index(fs.size() - 1)];
      Transformed l = localize(p, f);
      return MonoidHom(p, l.monoid, l.map);
    }
    case 2: {
      std::size_t rank = 1 + r.index(2);
      FineMonoid p = testgen::random_sharp_monoid(r, rank, 4, 3);
      while (p.ngens() <= rank) p = testgen::random_sharp_monoid(r, rank, 4, 3);
      std::size_t k = p.ngens();
      std::vector<Vec> basis;
      for (std::size_t i = 0; i < k; ++i) basis.push_back(unit_vector(k, i));
      FineMonoid free(AbGroup::free(k), basis);
      return MonoidHom(free, p, GroupHom(free.ambient(), p.ambient(), Matrix::from_columns(p.gens(), rank)));
    }
    default: {
      // a non-saturated monoid inside its saturation
      Int a = r.range(2, 4), b = a + r.range(1, 3);
      while (gcd(a, b) != 1) ++b;
      FineMonoid p(AbGroup::free(2), {{a, 0}, {b, 0}, {0, 1}});
      Transformed s = transform(p, Transform::sat);
      return MonoidHom(p, s.monoid, s.map);
    }
  }
}

// Map induced on transformed monoids, for transforms whose comparison maps are surjective on groups.
inline MonoidHom induced(const MonoidHom& h, Transform t) {
  Transformed a = transform(h.source(), t);
  Transformed b = transform(h.target(), t);
  const AbGroup& src = a.monoid.ambient();
  Matrix m(b.monoid.ambient().ngens(), src.ngens());
  for (std::size_t k = 0; k < src.ngens(); ++k) {
    auto pre = preimage(a.map, unit_vector(src.ngens(), k));
    if (!pre) throw std::logic_error("comparison map is not surjective");
    Vec img = b.map.apply(h.apply(*pre));
    for (std::size_t i = 0; i < img.size(); ++i) m(i, k) = img[i];
  }
  return MonoidHom(a.monoid, b.monoid, GroupHom(src, b.monoid.ambient(), m));
}

// Functional of a valuative witness, moved to the canonical coordinates of the torus group.
inline Vec witness_on_group(const FineMonoid& t, const Vec& w) {
  const AbGroup& amb = t.ambient();
  const Subgroup& gp = t.gp();
  bool ambient = amb.torsion().empty() && gp.group() == amb;
  for (std::size_t i = 0; i < amb.rank() && ambient; ++i) ambient = gp.contains(unit_vector(amb.rank(), i));
  if (!ambient) return w;
  Vec phi(gp.group().rank());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = dot(w, t.free_part(gp.embedding().apply(unit_vector(gp.group().ngens(), i))));
  return phi;
}

// Number of lifts of the witness problem, recomputed directly.
inline std::optional<std::size_t> witness_lifts(const FanMap& f, const ValuativeWitness& w) {
  const Fan& x = f.source();
  const Fan& y = f.target();
  std::size_t t = w.torus_point;
  Vec phi = witness_on_group(x.stalk(t), w.functional);
  MonoidHom down = f.stalk_map(t).after(y.gen_map(w.base_point, f(t)));
  const FineMonoid& mb = y.stalk(w.base_point);
  for (std::size_t i = 0; i < mb.ngens(); ++i) {
    auto v = oracle::evaluate(x.stalk(t), phi, down.apply(mb.gens()[i]));
    if (!v || (mb.is_unit_gen(i) ? *v != 0 : *v <= 0)) return std::nullopt;  // not a valid base
  }
  std::size_t lifts = 0;
  for (std::size_t p = 0; p < x.size(); ++p)
    if (f(p) == w.base_point && oracle::lands_at(x, p, t, phi)) ++lifts;
  return lifts;
}

// Brute-force finiteness: minimal Q-module generators of P found by degree, up to `bound`.
struct ModuleSweep {
  bool finite = false;
  bool conclusive = true;
  std::size_t generators = 0;
};

inline ModuleSweep module_sweep(const MonoidHom& h, Int bound) {
  const FineMonoid& p = h.target();
  const Vec& lambda = p.grading();
  std::set<Vec> seen{p.ambient().zero()};
  std::vector<std::vector<Vec>> layer(static_cast<std::size_t>(bound) + 1);
  layer[0].push_back(p.ambient().zero());
  for (Int d = 0; d <= bound; ++d)
    for (std::size_t idx = 0; idx < layer[d].size(); ++idx) {
      Vec x = layer[d][idx];
      for (const auto& g : p.gens()) {
        Int e = d + dot(lambda, p.free_part(g));
        if (e > bound) continue;
        Vec y = p.ambient().reduce(vadd(x, g));
        if (seen.insert(y).second) layer[e].push_back(y);
      }
    }
  std::vector<Vec> images = h.image_gens();
  ModuleSweep out;
  Int top = 0;
  for (Int d = 0; d <= bound; ++d)
    for (const auto& x : layer[d]) {
      bool reducible = false;
      for (const auto& g : images) {
        if (dot(lambda, p.free_part(g)) == 0) continue;
        if (seen.count(p.ambient().reduce(vsub(x, g)))) {
          reducible = true;
          break;
        }
      }
      if (!reducible) {
        ++out.generators;
        top = d;
      }
    }
  out.finite = top <= bound / 2;
  return out;
}

}  // namespace fanlib::checks
