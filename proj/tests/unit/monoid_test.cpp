#include "common.hpp"

using namespace fanlib;
using namespace fanlib::t;

TEST_CASE("membership") {
  FineMonoid n2 = nat(2);
  auto c = n2.membership({3, 2});
  REQUIRE(c);
  CHECK(*c == Vec{3, 2});
  FineMonoid p = mon(Z(), {{2}, {3}});
  CHECK_FALSE(p.contains({1}));
  auto w = p.membership({5});
  REQUIRE(w);
  CHECK(*w == Vec{1, 1});
  CHECK(p.membership({0}) == Vec{0, 0});
  CHECK(integers().contains({-7}));
}

TEST_CASE("units and grading") {
  FineMonoid p = mon(AbGroup(1, {2}), {{1, 0}, {0, 1}});
  CHECK(p.units().group() == AbGroup(0, {2}));
  CHECK(p.is_unit_gen(1));
  CHECK_FALSE(p.is_unit_gen(0));
  CHECK(p.degree({1, 0}) > 0);
  CHECK(integers().is_group());
  CHECK(nat(2).is_sharp());
}

TEST_CASE("faces of small monoids") {
  CHECK(faces(nat()).size() == 2);
  CHECK(faces(nat(2)).size() == 4);
  CHECK(faces(integers()).size() == 1);
  CHECK(faces(mon(Z(), {{2}, {3}})).size() == 2);
}

TEST_CASE("localization") {
  FineMonoid n2 = nat(2);
  Face axis = face_of(n2, {1, 0});
  Transformed l = localize(n2, axis);
  CHECK(same_monoid(l.monoid, mon(Z(2), {{1, 0}, {-1, 0}, {0, 1}})));
  Face units = faces(n2).front();
  CHECK(same_monoid(localize(n2, units).monoid, n2));
  Face whole = faces(n2).back();
  CHECK(localize(n2, whole).monoid.is_group());
}

TEST_CASE("transforms") {
  FineMonoid p = mon(Z(), {{2}, {3}});
  CHECK(same_monoid(transform(p, Transform::sat).monoid, nat()));
  FineMonoid q = mon(AbGroup(1, {2}), {{1, 0}, {0, 1}});
  Transformed tf = transform(q, Transform::tf);
  CHECK(tf.monoid.ambient() == Z());
  CHECK(same_monoid(tf.monoid, nat()));
  FineMonoid n2 = nat(2);
  Transformed trc = transform(n2, Transform::trc);
  CHECK(same_monoid(trc.monoid, n2));
  CHECK(trc.map.matrix() == Matrix::identity(2));
  CHECK(transform(q, Transform::sharp).monoid.is_sharp());
  CHECK(transform(p, Transform::gp).monoid.is_group());
}

TEST_CASE("grading functionals") {
  FineMonoid n2 = nat(2);
  CHECK(grading_functional(n2, face_of(n2, {1, 0})) == Vec{0, 1});
  CHECK(grading_functional(n2, faces(n2).front()) == Vec{1, 1});
  CHECK(is_zero(grading_functional(integers(), faces(integers()).front())));
}

TEST_CASE("gaussian elimination") {
  auto e = gaussian_eliminate(Matrix::from_rows({{3}}, 1));
  CHECK(e.diagonal == Matrix::from_rows({{3}}, 1));
  auto f = gaussian_eliminate(Matrix::from_rows({{2, -1}, {-1, 2}}, 2));
  CHECK(f.diagonal == Matrix::from_rows({{6, 0}, {0, 3}}, 2));
  CHECK(f.combinations == Matrix::from_rows({{4, 2}, {1, 2}}, 2));
  CHECK(gaussian_eliminate(Matrix::identity(3)).diagonal == Matrix::identity(3));
  CHECK_THROWS_AS(gaussian_eliminate(Matrix::from_rows({{1, 1}, {0, 1}}, 2)), std::invalid_argument);
}

TEST_CASE("saturation of a submonoid") {
  CHECK(same_monoid(saturation_of_submonoid(mon(Z(), {{2}, {3}}), nat()), nat()));
  CHECK(same_monoid(saturation_of_submonoid(nat(2), nat(2)), nat(2)));
  CHECK(same_monoid(saturation_of_submonoid(mon(Z(2), {{2, 0}}), nat(2)), mon(Z(2), {{1, 0}})));
}

TEST_CASE("ideal saturation") {
  FineMonoid n = nat();
  auto r = ideal_saturated(n, MonoidIdeal{{{2}}});
  REQUIRE(r.kind == IdealSaturation::NotSaturated);
  CHECK(r.witness == Vec{1});
  CHECK(r.n == 2);
  CHECK(ideal_saturated(n, MonoidIdeal{{{1}}}).kind == IdealSaturation::Saturated);
  CHECK(ideal_saturated(nat(2), MonoidIdeal{}).kind == IdealSaturation::Saturated);
  CHECK(ideal_contains(n, MonoidIdeal{{{2}}}, {5}));
  CHECK_FALSE(ideal_contains(n, MonoidIdeal{{{2}}}, {1}));
}

TEST_CASE("unit splittings") {
  SUBCASE("split input") {
    FineMonoid q = mon(AbGroup(1, {2}), {{1, 0}, {0, 1}});
    SplitMonoid s = split_monoid(q);
    CHECK(same_monoid(s.monoid, q));
    CHECK(s.inc.matrix() == Matrix::identity(2));
  }
  SUBCASE("non-split monoid") {
    // units Z/2 inside Z x Z/4, sharpening <(1,0),(1,1)> in Z x Z/2
    FineMonoid q = mon(AbGroup(1, {4}), {{1, 0}, {1, 1}, {0, 2}});
    SplitMonoid s = split_monoid(q);
    CHECK(s.monoid.units().group() == AbGroup(0, {4}));
    CHECK(s.basis.size() == 2);
    CHECK(smith_decompose(s.inc).is_injective);
  }
}
