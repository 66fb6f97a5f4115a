#include "common.hpp"

using namespace fanlib;
using namespace fanlib::t;

TEST_CASE("groups normalize to invariant factors") {
  CHECK(AbGroup::from_orders({2, 3}).torsion() == Vec{6});
  CHECK(AbGroup::from_orders({0, 4, 6}).to_string() == "Z x Z/2 x Z/12");
  CHECK(AbGroup::from_orders({1}).is_trivial());
  CHECK(AbGroup::parse("Z^2 x Z/3") == AbGroup(2, {3}));
}

TEST_CASE("smith decomposition of small maps") {
  SUBCASE("identity") {
    auto s = smith_decompose(GroupHom::identity(Z(2)));
    CHECK(s.cokernel.group.is_trivial());
    CHECK(s.kernel.group.is_trivial());
    CHECK(s.is_injective);
    CHECK(s.is_surjective);
  }
  SUBCASE("doubling") {
    auto s = smith_decompose(hom(Z(), Z(), {{2}}));
    CHECK(s.cokernel.group == AbGroup(0, {2}));
    CHECK(s.is_injective);
    CHECK_FALSE(s.is_surjective);
  }
  SUBCASE("diag(2,3)") {
    auto s = smith_decompose(hom(Z(2), Z(2), {{2, 0}, {0, 3}}));
    CHECK(s.cokernel.group == AbGroup(0, {6}));
    CHECK(s.rank == 2);
  }
  SUBCASE("kernel composes to zero") {
    GroupHom h = hom(Z(3), Z(2), {{1, 2, 3}, {2, 4, 6}});
    auto s = smith_decompose(h);
    CHECK(s.kernel.group.rank() == 2);
    CHECK(h.after(s.kernel.map).matrix().is_zero());
    CHECK(s.cokernel.map.after(h).matrix().is_zero());
  }
}

TEST_CASE("torsion well-definedness is enforced") {
  AbGroup z2(0, {2}), z4(0, {4});
  CHECK_NOTHROW(hom(z2, z4, {{2}}));
  CHECK_THROWS_AS(hom(z2, z4, {{1}}), std::invalid_argument);
  CHECK_THROWS_AS(hom(z2, Z(), {{1}}), std::invalid_argument);
}

TEST_CASE("ext groups") {
  CHECK(ext_group(Z(), AbGroup(1, {6})).is_trivial());
  CHECK(ext_group(AbGroup(0, {4}), AbGroup(0, {2})) == AbGroup(0, {2}));
  CHECK(ext_group(AbGroup(0, {4}), Z()) == AbGroup(0, {4}));
  // Ext(Z/p^e, G) = G / p^e G
  CHECK(ext_group(AbGroup(0, {9}), AbGroup(1, {3, 27})) == AbGroup(0, {3, 9, 9}));
  CHECK(ext_group(AbGroup(0, {8}), AbGroup(0, {3})).is_trivial());
}

TEST_CASE("hom groups") {
  CHECK(hom_group(AbGroup(0, {4}), AbGroup(0, {6})) == AbGroup(0, {2}));
  CHECK(hom_group(Z(2), AbGroup(0, {5})) == AbGroup(0, {5, 5}));
  CHECK(hom_group(AbGroup(0, {3}), Z()).is_trivial());
}

namespace {
void check_resolution(const Extension& e, const SplitResolution& r) {
  CHECK(smith_decompose(r.inc).is_injective);
  CHECK(smith_decompose(r.inc).cokernel.group.is_finite());
  Matrix back = r.surj_prime.after(r.splitting).matrix();
  CHECK(r.surj_prime.after(r.splitting).matrix() == GroupHom::identity(e.c).matrix());
  (void)back;
}
}  // namespace

TEST_CASE("split resolver") {
  SUBCASE("already split") {
    AbGroup b(1, {2});
    Extension e{Z(), b, AbGroup(0, {2}), hom(Z(), b, {{1}, {0}}), hom(b, AbGroup(0, {2}), {{0, 1}})};
    validate_extension(e);
    auto r = split_resolver(e);
    check_resolution(e, r);
    CHECK(r.a_prime == Z());
    CHECK(r.inc.matrix() == Matrix::identity(1));
  }
  SUBCASE("doubling sequence") {
    Extension e{Z(), Z(), AbGroup(0, {2}), hom(Z(), Z(), {{2}}), hom(Z(), AbGroup(0, {2}), {{1}})};
    validate_extension(e);
    auto r = split_resolver(e);
    check_resolution(e, r);
    CHECK(r.a_prime == Z());
    CHECK(std::abs(r.inc.matrix()(0, 0)) == 2);
  }
  SUBCASE("non-split extension with a torsion kernel") {
    AbGroup a(0, {2}), b(1, {4}), c(1, {2});
    Extension e{a, b, c, hom(a, b, {{0}, {2}}), hom(b, c, {{1, 0}, {0, 1}})};
    validate_extension(e);
    auto r = split_resolver(e);
    check_resolution(e, r);
    CHECK(r.a_prime == AbGroup(0, {4}));
    CHECK(smith_decompose(r.inc).cokernel.group == AbGroup(0, {2}));
  }
  SUBCASE("rejects non-exact input") {
    Extension e{Z(), Z(), AbGroup(0, {3}), hom(Z(), Z(), {{2}}), hom(Z(), AbGroup(0, {3}), {{1}})};
    CHECK_THROWS_AS(validate_extension(e), std::invalid_argument);
  }
}

TEST_CASE("checked arithmetic") {
  CHECK_THROWS_AS(mul(Int{1} << 40, Int{1} << 40), std::overflow_error);
  CHECK(gcd(-12, 18) == 6);
  CHECK(mod(-7, 3) == 2);
}
