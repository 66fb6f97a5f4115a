#include "props.hpp"

using namespace fanlib;
using namespace fanlib::testgen;

TEST_CASE("duality is an involution") {
  Rng r = stream("duality");
  for (int it = 0; it < 200; ++it) {
    ConeSample s = random_cone_gens(r);
    RationalCone c = RationalCone::from_generators(s.n, s.gens);
    RationalCone d = dual_cone(c);
    RationalCone dd = dual_cone(d);
    CHECK(dd == c);
    CHECK(oracle::is_dual_of(s.gens, d.generators()));
    for (const auto& g : dd.generators()) CHECK(oracle::in_cone(s.gens, g));
  }
}

TEST_CASE("faces are cut out by their spans") {
  Rng r = stream("faces-span");
  for (int it = 0; it < 100; ++it) {
    ConeSample s = random_cone_gens(r);
    RationalCone c = RationalCone::from_generators(s.n, s.gens);
    FaceLattice l = face_lattice(c);
    for (const auto& f : l.faces) {
      std::vector<Vec> span = c.lineality();
      for (auto i : f.rays) span.push_back(c.rays()[i]);
      std::size_t base = oracle::rank_of(span, s.n);
      for (std::size_t i = 0; i < c.rays().size(); ++i) {
        auto with = span;
        with.push_back(c.rays()[i]);
        bool in_span = oracle::rank_of(with, s.n) == base;
        bool in_face = std::find(f.rays.begin(), f.rays.end(), i) != f.rays.end();
        CHECK(in_span == in_face);
      }
      for (auto i : f.rays) CHECK(dot(f.support, c.rays()[i]) == 0);
      for (std::size_t i = 0; i < c.rays().size(); ++i)
        if (std::find(f.rays.begin(), f.rays.end(), i) == f.rays.end()) CHECK(dot(f.support, c.rays()[i]) > 0);
    }
  }
}

TEST_CASE("face lattices are graded") {
  Rng r = stream("graded");
  for (int it = 0; it < 100; ++it) {
    ConeSample s = random_cone_gens(r);
    RationalCone c = RationalCone::from_generators(s.n, s.gens);
    FaceLattice l = face_lattice(c);
    std::vector<std::vector<std::size_t>> sets;
    for (const auto& f : l.faces) {
      auto v = f.rays;
      std::sort(v.begin(), v.end());
      sets.push_back(v);
    }
    auto [lo, hi] = oracle::chain_lengths(sets);
    std::size_t expect = c.dim() - c.lineality().size() + 1;
    CHECK(lo == expect);
    CHECK(hi == expect);
  }
}

TEST_CASE("relative interiors of intersections") {
  Rng r = stream("relint");
  for (int it = 0; it < 100; ++it) {
    std::size_t n = 1 + r.index(3);
    std::vector<Vec> ga, gb;
    for (int i = 0; i < 3; ++i) {
      ga.push_back(random_nonzero(r, n, -3, 3));
      gb.push_back(random_nonzero(r, n, -3, 3));
    }
    RationalCone a = RationalCone::from_generators(n, ga);
    RationalCone b = RationalCone::from_generators(n, gb);
    std::vector<Vec> ineq = a.facets(), eq = a.equations();
    ineq.insert(ineq.end(), b.facets().begin(), b.facets().end());
    eq.insert(eq.end(), b.equations().begin(), b.equations().end());
    RationalCone both = RationalCone::from_inequalities(n, ineq, eq);
    bool overlap = false;
    for (int k = 0; k < 40; ++k) {
      Vec x(n, 0);
      for (const auto& g : a.generators()) x = vadd(x, vscale(r.range(1, 4), g));
      if (a.in_relative_interior(x) && b.in_relative_interior(x)) {
        overlap = true;
        CHECK(both.in_relative_interior(x));
      }
    }
    if (overlap) {
      for (int k = 0; k < 20; ++k) {
        Vec y(n, 0);
        for (const auto& g : both.generators()) y = vadd(y, vscale(r.range(1, 4), g));
        if (both.in_relative_interior(y)) {
          CHECK(a.in_relative_interior(y));
          CHECK(b.in_relative_interior(y));
        }
      }
    }
  }
}
