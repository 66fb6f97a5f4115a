#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fanlib/abgroup.hpp"
#include "fanlib/cone.hpp"

namespace fanlib {

// Submonoid of a finitely generated abelian group given by generators.
// Cone data lives on the free coordinates of the ambient group; torsion elements are units.
class FineMonoid {
 public:
  FineMonoid();
  FineMonoid(AbGroup ambient, std::vector<Vec> gens);

  const AbGroup& ambient() const { return d_->ambient; }
  const std::vector<Vec>& gens() const { return d_->gens; }
  std::size_t ngens() const { return d_->gens.size(); }

  const Subgroup& gp() const { return d_->gp; }
  const RationalCone& cone() const { return d_->cone; }
  bool is_unit_gen(std::size_t i) const { return d_->unit[i]; }
  const std::vector<std::size_t>& unit_gens() const { return d_->unit_idx; }
  const std::vector<std::size_t>& nonunit_gens() const { return d_->nonunit_idx; }
  const Subgroup& units() const { return d_->units; }
  // Sum of the facet normals of the cone: zero on units, positive on every other element.
  const Vec& grading() const { return d_->grading; }
  Int degree(const Vec& x) const { return dot(d_->grading, free_part(x)); }
  Vec free_part(const Vec& x) const { return Vec(x.begin(), x.begin() + ambient().rank()); }

  bool is_group() const { return d_->nonunit_idx.empty(); }
  bool is_sharp() const { return d_->units.group().is_trivial(); }
  bool is_saturated() const;
  bool is_torsion_free() const { return d_->gp.group().torsion().empty(); }
  bool is_toric() const { return is_torsion_free() && is_saturated(); }

  // Nonnegative coefficients c with sum c_i gens_i = x, or nullopt.
  std::optional<Vec> membership(const Vec& x) const;
  bool contains(const Vec& x) const { return membership(x).has_value(); }
  std::string to_string() const;

 private:
  struct Data {
    AbGroup ambient;
    std::vector<Vec> gens;
    Subgroup gp;
    RationalCone cone;
    std::vector<bool> unit;
    std::vector<std::size_t> unit_idx, nonunit_idx;
    Subgroup units;
    Vec grading;
    Vec unit_relation;  // positive coefficients on the unit gens summing to zero
    // Search order for membership and the cones spanned by each suffix of it, built on first use.
    mutable std::once_flag search_once;
    mutable std::vector<std::size_t> search_order;
    mutable std::vector<RationalCone> suffix_cones;
  };
  const Data& search_data() const;
  std::shared_ptr<const Data> d_;
};

// Same ambient and the same generated submonoid.
bool same_monoid(const FineMonoid& a, const FineMonoid& b);
FineMonoid minimize_generators(const FineMonoid& p);

struct Face {
  std::vector<std::size_t> gen_indices;
  Vec support;  // covector on the free coordinates, zero exactly on the face
  std::size_t rank = 0;
};

// Spec P: the units face first, P itself last, sorted by rank.
std::vector<Face> faces(const FineMonoid& p);
bool face_leq(const Face& a, const Face& b);
FineMonoid face_monoid(const FineMonoid& p, const Face& f);
// Smallest face containing an element of P.
Face face_of(const FineMonoid& p, const Vec& x);
std::size_t face_index(const std::vector<Face>& fs, const Face& f);

// A monoid with a comparison map from the ambient of the input.
struct Transformed {
  FineMonoid monoid;
  GroupHom map;
};

Transformed localize(const FineMonoid& p, const Face& f);

enum class Transform { gp, sharp, sat, tf, trc };
Transformed transform(const FineMonoid& p, Transform which);
std::string transform_name(Transform t);

Vec grading_functional(const FineMonoid& p, const Face& f);

struct Elimination {
  Matrix diagonal;      // A'
  Matrix combinations;  // row i gives q'_i as a nonnegative combination of the q_j
};
Elimination gaussian_eliminate(const Matrix& a);

// {p in P : np in Q for some n > 0} for a submonoid Q of P.
FineMonoid saturation_of_submonoid(const FineMonoid& q, const FineMonoid& p);

struct MonoidIdeal {
  std::vector<Vec> gens;
};
bool ideal_contains(const FineMonoid& p, const MonoidIdeal& i, const Vec& x);

struct IdealSaturation {
  enum Kind { Saturated, NotSaturated, UnknownAtBound } kind = Saturated;
  Vec witness;  // p with n p in I and p not in I
  Int n = 0;
  Int bound = 0;
};
// The bound defaults to FANLIB_DEGREE_BOUND or four times the largest generator degree.
IdealSaturation ideal_saturated(const FineMonoid& p, const MonoidIdeal& i, std::optional<Int> bound = {});

// P (+)_{P*} A for an injection u : P* -> A with finite cokernel; A becomes the unit group.
struct UnitPushout {
  FineMonoid monoid;
  GroupHom inc;        // ambient of P -> new ambient
  GroupHom units_map;  // A -> new ambient
};
UnitPushout pushout_units(const FineMonoid& p, const GroupHom& u);

// Flips free coordinates of a target so that generator sums come out nonnegative; ties are
// decided by the first nonzero entry of `reference`. Returns the diagonal change of coordinates.
Matrix orientation(const AbGroup& g, const std::vector<Vec>& gens, const Matrix& reference);

struct SplitMonoid {
  FineMonoid monoid;
  GroupHom inc;             // ambient of Q -> ambient of P
  std::vector<Vec> basis;   // representatives of P* / Q*
  AbGroup sharp_group;      // group of the sharpening
  GroupHom splitting;       // sharp_group -> ambient of P, a section over P*
};
SplitMonoid split_monoid(const FineMonoid& q);

}  // namespace fanlib
