#include "common.hpp"

using namespace fanlib;
using namespace fanlib::t;

namespace {

Fan line() { return spec_fan(nat()); }

Fan doubled_line() {
  return glue({line(), line()}, {Identification{0, 1, 1, 1, GroupHom::identity(Z())}});
}

Fan p1_glued() { return glue({line(), line()}, {Identification{0, 1, 1, 1, hom(Z(), Z(), {{-1}})}}); }

ClassicalFanData p1_data() {
  return {1, {RationalCone::from_generators(1, {}), RationalCone::from_generators(1, {{1}}),
              RationalCone::from_generators(1, {{-1}})}};
}

ClassicalFanData p2_data() {
  std::vector<Vec> rays{{1, 0}, {0, 1}, {-1, -1}};
  ClassicalFanData d{2, {RationalCone::from_generators(2, {})}};
  for (std::size_t i = 0; i < 3; ++i) {
    d.cones.push_back(RationalCone::from_generators(2, {rays[i]}));
    d.cones.push_back(RationalCone::from_generators(2, {rays[i], rays[(i + 1) % 3]}));
  }
  return d;
}

std::size_t count_covers(const Fan& x) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) n += x.covers(i, j);
  return n;
}

}  // namespace

TEST_CASE("spec fans") {
  Fan a = line();
  REQUIRE(a.size() == 2);
  CHECK(a.leq(0, 1));
  CHECK(same_monoid(a.stalk(0), nat()));
  CHECK(a.stalk(1).is_group());
  CHECK(a.affine_center() == std::size_t{0});
  Fan b = spec_fan(nat(2));
  CHECK(b.size() == 4);
  CHECK(count_covers(b) == 4);
}

TEST_CASE("classical fans") {
  Fan p1 = from_classical(p1_data());
  REQUIRE(p1.size() == 3);
  std::size_t groups = 0, rays = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (p1.stalk(i).is_group()) ++groups;
    else if (same_monoid(p1.stalk(i), nat()) || same_monoid(p1.stalk(i), mon(Z(), {{-1}}))) ++rays;
  }
  CHECK(groups == 1);
  CHECK(rays == 2);
  ClassicalResult back = to_classical(p1);
  REQUIRE(back.data);
  CHECK(same_classical(*back.data, p1_data()));

  ClassicalResult d = to_classical(doubled_line());
  CHECK_FALSE(d.data);
  CHECK(d.reason.find("overlap") != std::string::npos);

  ClassicalFanData bad{1, {RationalCone::from_generators(1, {{1}})}};
  CHECK_THROWS_AS(validate_classical(bad), std::invalid_argument);
}

TEST_CASE("gluing") {
  CHECK(doubled_line().size() == 3);
  Fan g = p1_glued();
  Fan c = from_classical(p1_data());
  CHECK(posets_isomorphic(g, c));
  ClassicalResult r = to_classical(g);
  REQUIRE(r.data);
  CHECK(same_classical(*r.data, p1_data()));

  Fan a2 = spec_fan(nat(2));
  std::vector<std::size_t> punctured;
  for (std::size_t i = 0; i < a2.size(); ++i)
    if (!a2.stalk(i).is_sharp() || a2.stalk(i).is_group()) punctured.push_back(i);
  Fan u = open_subfan(a2, punctured);
  CHECK(u.size() == 3);
  CHECK_FALSE(u.affine_center());
  CHECK(u.maximal_points().size() == 1);
  CHECK_THROWS_AS(open_subfan(a2, {0}), std::invalid_argument);
}

TEST_CASE("fiber products") {
  FanMap f = spec_of(MonoidHom(nat(), nat(), hom(Z(), Z(), {{2}})));
  FanMap g = spec_of(MonoidHom(nat(), nat(), hom(Z(), Z(), {{3}})));
  FiberProduct w = fiber_product_fine(f, g);
  REQUIRE(w.fan.size() == 2);
  auto c = w.fan.affine_center();
  REQUIRE(c);
  FineMonoid closed = minimize_generators(w.fan.stalk(*c));
  std::vector<Int> gens;
  for (const auto& v : closed.gens()) gens.push_back(std::abs(v[0]));
  std::sort(gens.begin(), gens.end());
  CHECK(gens == std::vector<Int>{2, 3});

  Fan p1 = from_classical(p1_data());
  FiberProduct sq = fiber_product_fine(to_point(p1), to_point(p1));
  CHECK(sq.fan.size() == 9);
  CHECK(sq.dropped == 0);
  CHECK(classify_map(to_point(sq.fan)).proper);
}

TEST_CASE("boundaries") {
  Fan a2 = spec_fan(nat(2));
  std::size_t axis = 0;
  for (std::size_t i = 0; i < a2.size(); ++i)
    if (a2.stalk(i).units().group().rank() == 1 && a2.stalk(i).contains({1, 0}) &&
        a2.stalk(i).contains({-1, 0}))
      axis = i;
  Boundary b = boundary(a2, axis);
  CHECK(b.fan.size() == 2);
  CHECK(posets_isomorphic(b.fan, line()));

  Fan p1 = from_classical(p1_data());
  std::size_t ray = 0;
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (!p1.stalk(i).is_group()) ray = i;
  Boundary r = boundary(p1, ray);
  REQUIRE(r.fan.size() == 1);
  CHECK(r.fan.stalk(0).gp().group().is_trivial());

  // the closure of the generic point is everything
  std::size_t generic = p1.maximal_points().front();
  CHECK(boundary(p1, generic).fan.size() == 3);
}

TEST_CASE("valuative criteria") {
  Fan p1 = from_classical(p1_data());
  MapReport a = classify_map(to_point(p1));
  CHECK(a.proper);
  CHECK(a.separated);

  auto w = properness_failure(to_point(line()));
  REQUIRE(w);
  CHECK(w->functional == Vec{-1});
  CHECK(w->lifts.empty());
  CHECK_FALSE(separatedness_failure(to_point(line())));

  CHECK(separatedness_failure(to_point(doubled_line())));

  FanMap sum = spec_of(MonoidHom(nat(2), nat(), hom(Z(2), Z(), {{1, 1}})));
  MapReport s = classify_map(sum);
  CHECK(s.proper);
  CHECK(s.affine);

  Fan p2 = from_classical(p2_data());
  CHECK(p2.size() == 7);
  CHECK(classify_map(to_point(p2)).proper);
  CHECK_FALSE(classify_map(to_point(spec_fan(nat(2)))).proper);
}

TEST_CASE("stratification") {
  std::vector<std::size_t> ranks;
  for (const auto& s : stratification_report(spec_fan(nat(2)))) ranks.push_back(s.rank);
  std::sort(ranks.begin(), ranks.end());
  CHECK(ranks == std::vector<std::size_t>{0, 1, 1, 2});
  FineMonoid q = mon(AbGroup(1, {2}), {{1, 0}, {0, 1}});
  Fan x = spec_fan(q);
  auto st = stratification_report(x);
  auto closed = *x.affine_center();
  CHECK(st[closed].rank == 0);
  CHECK(st[closed].torsion == Vec{2});
}

TEST_CASE("fiber dimensions") {
  FanMap diag = spec_of(MonoidHom(nat(), nat(2), hom(Z(), Z(2), {{1}, {1}})));
  FiberDimension d = fiber_dimension(diag, *diag.target().affine_center());
  REQUIRE(d.dims.size() == 2);
  CHECK(d.dims[0].second == 1);
  CHECK(d.dims[1].second == 1);
  CHECK(d.pure);

  FanMap sum = spec_of(MonoidHom(nat(2), nat(), hom(Z(2), Z(), {{1, 1}})));
  FiberDimension e = fiber_dimension(sum, *sum.target().affine_center());
  REQUIRE(e.dims.size() == 1);
  CHECK(e.dims[0].second == 0);
  CHECK(e.pure);
  MapReport r = classify_map(sum);
  CHECK(r.equidimensional == Int{0});
  CHECK_FALSE(r.exact);
}

TEST_CASE("cohomology") {
  Fan torus_fan = spec_fan(integers());
  for (Int n = 2; n <= 6; ++n) CHECK(cohomology_G(torus_fan, AbGroup(0, {n}), 1) == AbGroup(0, {n}));
  Fan a2 = spec_fan(nat(2));
  CHECK(cohomology_G(a2, Z(2), 1).is_trivial());
  CHECK(cohomology_G(a2, Z(2), 2).is_trivial());
  CHECK(poset_cohomology(a2, 2, 1).is_trivial());
  Fan p1 = from_classical(p1_data());
  CHECK(cohomology_G(p1, Z(), 1) == Z());
  CHECK(cohomology_G(p1, Z(), 0).is_trivial());
  CHECK_THROWS_AS(cohomology_G(p1, AbGroup(0, {2}), 1), std::invalid_argument);
}

TEST_CASE("torus points") {
  Fan a2 = spec_fan(nat(2));
  auto t = torus(a2);
  REQUIRE(t.size() == 1);
  CHECK(a2.stalk(t[0]).gp().group() == Z(2));
  // the two lines share their generic point
  CHECK(torus(doubled_line()).size() == 1);
}

TEST_CASE("fan transforms") {
  Fan p = spec_fan(mon(Z(), {{2}, {3}}));
  FanTransform s = fan_transform(p, Transform::sat);
  CHECK(posets_isomorphic(s.fan, p));
  CHECK(same_monoid(s.fan.stalk(*s.fan.affine_center()), nat()));
  Fan q = spec_fan(mon(AbGroup(1, {2}), {{1, 0}, {0, 1}}));
  FanTransform tf = fan_transform(q, Transform::tf);
  CHECK(same_monoid(tf.fan.stalk(*tf.fan.affine_center()), nat()));
  CHECK(sharp_invariance(q));
}

TEST_CASE("fan maps must be local") {
  Fan a = line();
  Fan t = spec_fan(integers());
  // the torus landing on the closed point of the line
  MonoidHom bad(nat(), t.stalk(0), hom(Z(), Z(), {{1}}));
  CHECK_THROWS_AS(FanMap(t, a, {0}, {bad}), std::invalid_argument);
  FanMap id = identity_map(a);
  for (std::size_t x = 0; x < a.size(); ++x) CHECK(is_local(id.stalk_map(x)));
}
