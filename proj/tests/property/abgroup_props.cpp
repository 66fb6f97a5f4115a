#include "props.hpp"

#include <set>

using namespace fanlib;
using namespace fanlib::testgen;

namespace {

std::size_t closure_size(const AbGroup& g, const std::vector<Vec>& gens) {
  std::set<Vec> seen{g.zero()};
  std::vector<Vec> todo{g.zero()};
  while (!todo.empty()) {
    Vec x = todo.back();
    todo.pop_back();
    for (const auto& s : gens) {
      Vec y = g.reduce(vadd(x, s));
      if (seen.insert(y).second) todo.push_back(y);
    }
  }
  return seen.size();
}

Vec primes_of(Int n) {
  Vec p;
  for (Int d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      p.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) p.push_back(n);
  return p;
}

}  // namespace

TEST_CASE("smith decomposition is exact") {
  Rng r = stream("smith");
  for (int it = 0; it < 200; ++it) {
    AbGroup a = random_group(r, 4, 12), b = random_group(r, 4, 12);
    GroupHom h = random_hom(r, a, b);
    SmithReport s = smith_decompose(h);
    CHECK(h.after(s.kernel.map).matrix() == GroupHom::zero(s.kernel.group, b).matrix());
    CHECK(s.cokernel.map.after(h).matrix() == GroupHom::zero(a, s.cokernel.group).matrix());
    CHECK(s.rank + s.kernel.group.rank() == a.rank());
    CHECK(image(h).group().rank() == s.rank);
    if (b.is_finite()) {
      std::size_t img = closure_size(b, h.matrix().column_list());
      CHECK(static_cast<Int>(img) * s.cokernel.group.order() == b.order());
    }
    AbGroup c = random_group(r, 4, 12);
    GroupHom g = random_hom(r, b, c);
    CHECK(smith_decompose(g.after(h)).rank <= std::min(s.rank, smith_decompose(g).rank));
  }
}

TEST_CASE("composition is associative") {
  Rng r = stream("assoc");
  for (int it = 0; it < 100; ++it) {
    AbGroup a = random_group(r), b = random_group(r), c = random_group(r), d = random_group(r);
    GroupHom f = random_hom(r, a, b), g = random_hom(r, b, c), h = random_hom(r, c, d);
    CHECK(h.after(g.after(f)).matrix() == h.after(g).after(f).matrix());
    CHECK(f.after(GroupHom::identity(a)).matrix() == f.matrix());
    CHECK(GroupHom::identity(b).after(f).matrix() == f.matrix());
  }
}

TEST_CASE("ext is additive") {
  Rng r = stream("ext");
  for (int it = 0; it < 100; ++it) {
    AbGroup c1 = random_group(r, 2, 12), c2 = random_group(r, 2, 12), g = random_group(r, 2, 12);
    DirectSum s = direct_sum(c1, c2);
    AbGroup e1 = ext_group(c1, g), e2 = ext_group(c2, g);
    CHECK(ext_group(s.group, g) == direct_sum(e1, e2).group);
    // Ext(Z/n, G) = G / nG, computed as a quotient
    for (Int n : c1.torsion()) {
      std::vector<Vec> mult;
      for (std::size_t i = 0; i < g.ngens(); ++i) mult.push_back(vscale(n, unit_vector(g.ngens(), i)));
      CHECK(ext_group(AbGroup(0, {n}), g) == quotient(g, mult).group);
    }
  }
}

TEST_CASE("split resolver produces verified splittings") {
  Rng r = stream("split");
  for (int it = 0; it < 100; ++it) {
    AbGroup b = random_group(r, 3, 12, 2);
    std::vector<Vec> gens;
    std::size_t k = r.index(3);
    for (std::size_t i = 0; i < k; ++i) gens.push_back(random_element(r, b));
    Subgroup a(b, gens);
    SubgroupWithMap q = quotient(b, gens);
    Extension e{a.group(), b, q.group, a.embedding(), q.map};
    validate_extension(e);
    SplitResolution s = split_resolver(e);
    SmithReport inc = smith_decompose(s.inc);
    CHECK(inc.is_injective);
    CHECK(inc.cokernel.group.is_finite());
    CHECK(s.surj_prime.after(s.splitting).matrix() == GroupHom::identity(e.c).matrix());
    CHECK(s.surj_prime.after(s.inj_prime).matrix() == GroupHom::zero(s.a_prime, e.c).matrix());
    CHECK(primes_of(e.a.torsion_order()) == primes_of(s.a_prime.torsion_order()));
  }
}
