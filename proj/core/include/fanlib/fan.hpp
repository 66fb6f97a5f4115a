#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fanlib/monhom.hpp"

namespace fanlib {

// Finite poset of points with monoid stalks. x <= y means y generizes x; the map for x < y
// is the localization of stalk(x) at the face that corresponds to y.
class Fan {
 public:
  Fan() = default;
  Fan(std::vector<std::string> names, std::vector<FineMonoid> stalks, std::vector<std::vector<bool>> le,
      std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gen_maps);

  std::size_t size() const { return stalks_.size(); }
  const std::string& name(std::size_t x) const { return names_[x]; }
  const std::vector<std::string>& names() const { return names_; }
  const FineMonoid& stalk(std::size_t x) const { return stalks_[x]; }
  bool leq(std::size_t x, std::size_t y) const { return le_[x][y]; }
  bool covers(std::size_t x, std::size_t y) const;  // x < y with nothing in between
  MonoidHom gen_map(std::size_t x, std::size_t y) const;
  std::vector<std::size_t> up_set(std::size_t x) const;
  std::vector<std::size_t> down_set(std::size_t x) const;
  std::vector<std::size_t> maximal_points() const;
  // Point whose up-set is the whole fan, when there is one.
  std::optional<std::size_t> affine_center() const;

 private:
  std::vector<std::string> names_;
  std::vector<FineMonoid> stalks_;
  std::vector<std::vector<bool>> le_;
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gen_;
};

// f : X -> Y with local stalk maps stalk_Y(f(x)) -> stalk_X(x).
class FanMap {
 public:
  FanMap() = default;
  FanMap(Fan source, Fan target, std::vector<std::size_t> points, std::vector<MonoidHom> stalk_maps);
  const Fan& source() const { return src_; }
  const Fan& target() const { return tgt_; }
  std::size_t operator()(std::size_t x) const { return pts_[x]; }
  const std::vector<std::size_t>& points() const { return pts_; }
  const MonoidHom& stalk_map(std::size_t x) const { return maps_[x]; }
  std::vector<std::size_t> fiber(std::size_t y) const;

 private:
  Fan src_, tgt_;
  std::vector<std::size_t> pts_;
  std::vector<MonoidHom> maps_;
};

Fan spec_fan(const FineMonoid& p);
// Spec of a monoid map, a map Spec P -> Spec Q.
FanMap spec_of(const MonoidHom& h);
Fan point_fan();  // Spec of the trivial monoid
FanMap to_point(const Fan& x);
FanMap identity_map(const Fan& x);
Fan open_subfan(const Fan& x, const std::vector<std::size_t>& points);

struct Identification {
  std::size_t piece_a, point_a, piece_b, point_b;
  GroupHom iso;  // ambient of stalk at (a) -> ambient of stalk at (b)
};
Fan glue(const std::vector<Fan>& pieces, const std::vector<Identification>& ids);

struct FiberProduct {
  Fan fan;
  FanMap to_left, to_right;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> certified;
  std::size_t dropped = 0;  // pairs whose pushout legs fail to be local
};
FiberProduct fiber_product_fine(const FanMap& f, const FanMap& g);

struct Boundary {
  Fan fan;
  std::vector<std::size_t> points;  // the point of X behind each point of the boundary
};
Boundary boundary(const Fan& x, std::size_t point);
FanMap boundary_map(const FanMap& f, std::size_t point);

struct ValuativeWitness {
  std::size_t torus_point = 0;  // generic point in the source
  std::size_t base_point = 0;   // closed point in the target
  Vec functional;               // on the free part of the torus stalk's group
  std::vector<std::size_t> lifts;
};

struct MapReport {
  bool quasi_compact = true;
  bool affine = false;
  bool quasi_finite = false;
  bool exact = false;
  bool cze = false;
  std::optional<Int> equidimensional;  // relative dimension, nullopt when not equidimensional
  bool equidim_sufficient_only = false;
  bool separated = false;
  bool proper = false;
  std::optional<ValuativeWitness> separated_witness, proper_witness;
  FlatCertificate::Kind flat = FlatCertificate::Unknown;
};
MapReport classify_map(const FanMap& f);
bool is_affine_map(const FanMap& f);
std::optional<ValuativeWitness> separatedness_failure(const FanMap& f);
std::optional<ValuativeWitness> properness_failure(const FanMap& f);  // includes separatedness
// Local functionals on the stalk at x whose composite through the gen map to the torus point t.
struct Cell {
  std::vector<Vec> strict, equal;
};
Cell lift_cell(const Fan& x, std::size_t point, std::size_t torus_point);
Cell base_cell(const FanMap& f, std::size_t base_point, std::size_t torus_point);

struct Stratum {
  std::size_t point;
  std::size_t rank;
  Vec torsion;
};
std::vector<Stratum> stratification_report(const Fan& x);

struct FiberDimension {
  std::vector<std::pair<std::size_t, Int>> dims;  // maximal fiber points and rank Cok f_x^*
  bool pure = true;
};
FiberDimension fiber_dimension(const FanMap& f, std::size_t y);

AbGroup cohomology_G(const Fan& x, const AbGroup& a, std::size_t degree);
// Cohomology of U -> Hom(Z^r, M*(U)) through the ordered-chain complex of the poset.
AbGroup poset_cohomology(const Fan& x, std::size_t r, std::size_t degree);

std::vector<std::size_t> torus(const Fan& x);

struct FanTransform {
  Fan fan;
  FanMap comparison;  // transformed fan -> original
};
FanTransform fan_transform(const Fan& x, Transform which);
// Spec of each stalk's sharpening has the same face poset as Spec of the stalk.
bool sharp_invariance(const Fan& x);

struct ClassicalFanData {
  std::size_t rank = 0;
  std::vector<RationalCone> cones;
};
void validate_classical(const ClassicalFanData& d);
Fan from_classical(const ClassicalFanData& d);
struct ClassicalResult {
  std::optional<ClassicalFanData> data;
  std::string reason;
};
ClassicalResult to_classical(const Fan& x);
// Same cones up to order.
bool same_classical(const ClassicalFanData& a, const ClassicalFanData& b);
FineMonoid dual_lattice_monoid(const RationalCone& sigma);

bool posets_isomorphic(const Fan& a, const Fan& b);

}  // namespace fanlib
