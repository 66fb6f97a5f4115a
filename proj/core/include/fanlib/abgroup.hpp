#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fanlib/arith.hpp"

namespace fanlib {

// Finitely generated abelian group Z^rank x Z/d1 x ... x Z/dk with d1 | d2 | ... and di >= 2.
// Elements are integer vectors of length rank + k; torsion coordinates are kept reduced.
class AbGroup {
 public:
  AbGroup() = default;
  AbGroup(std::size_t rank, Vec torsion);
  static AbGroup free(std::size_t rank) { return AbGroup(rank, {}); }
  // Normalizes a direct sum of cyclic groups; order 0 means Z, order 1 is dropped.
  static AbGroup from_orders(const Vec& orders);
  static AbGroup parse(const std::string& text);

  std::size_t rank() const { return rank_; }
  const Vec& torsion() const { return torsion_; }
  std::size_t ngens() const { return rank_ + torsion_.size(); }
  // Order of the i-th canonical generator, 0 for free ones.
  Int gen_order(std::size_t i) const { return i < rank_ ? 0 : torsion_[i - rank_]; }

  Vec zero() const { return Vec(ngens(), 0); }
  Vec reduce(Vec x) const;
  bool is_zero_element(const Vec& x) const;
  bool equal_elements(const Vec& x, const Vec& y) const;
  Int element_order(const Vec& x) const;  // 0 for infinite order
  bool is_trivial() const { return ngens() == 0; }
  bool is_finite() const { return rank_ == 0; }
  Int order() const;  // finite groups only
  Int torsion_order() const;
  Matrix relations() const;  // columns d_i e_{rank+i}
  std::vector<Vec> elements() const;  // finite groups only, canonical order
  std::string to_string() const;

  friend bool operator==(const AbGroup& a, const AbGroup& b) {
    return a.rank_ == b.rank_ && a.torsion_ == b.torsion_;
  }

 private:
  std::size_t rank_ = 0;
  Vec torsion_;
};

// "(a,b;t)" with free coordinates before the semicolon.
std::string element_string(const AbGroup& g, const Vec& x);

// Z^n / image(rel) brought into canonical form.
struct Presentation {
  AbGroup group;
  Matrix to_canonical;  // group.ngens x n
  Matrix lift;          // n x group.ngens
};
Presentation present(const Matrix& rel);

class GroupHom {
 public:
  GroupHom() = default;
  GroupHom(AbGroup source, AbGroup target, Matrix m);
  static GroupHom identity(const AbGroup& a);
  static GroupHom zero(const AbGroup& a, const AbGroup& b);

  const AbGroup& source() const { return src_; }
  const AbGroup& target() const { return tgt_; }
  const Matrix& matrix() const { return m_; }
  Vec apply(const Vec& x) const;
  // (*this) after h.
  GroupHom after(const GroupHom& h) const;

  friend bool operator==(const GroupHom& a, const GroupHom& b) {
    return a.src_ == b.src_ && a.tgt_ == b.tgt_ && a.m_ == b.m_;
  }

 private:
  AbGroup src_, tgt_;
  Matrix m_;
};

// Subgroup generated by a list of elements, with its own canonical coordinates.
class Subgroup {
 public:
  Subgroup() = default;
  Subgroup(const AbGroup& ambient, const std::vector<Vec>& gens);
  const AbGroup& ambient() const { return ambient_; }
  const AbGroup& group() const { return group_; }
  const GroupHom& embedding() const { return embedding_; }
  const std::vector<Vec>& gens() const { return gens_; }
  std::optional<Vec> coords(const Vec& x) const;
  // Integer coefficients c with sum c_i gens_i = x in the ambient.
  std::optional<Vec> combination(const Vec& x) const;
  bool contains(const Vec& x) const { return coords(x).has_value(); }

 private:
  AbGroup ambient_, group_;
  std::vector<Vec> gens_;
  GroupHom embedding_;
  IntSolver all_;    // against [gens | relations]
  IntSolver basis_;  // against a lattice basis
  Matrix to_canonical_;
};

struct SubgroupWithMap {
  AbGroup group;
  GroupHom map;
};

struct SmithReport {
  std::size_t rank = 0;
  SubgroupWithMap kernel;    // map is the embedding into the source
  SubgroupWithMap cokernel;  // map is the projection from the target
  bool is_injective = false;
  bool is_surjective = false;
};
SmithReport smith_decompose(const GroupHom& h);

Subgroup image(const GroupHom& h);
std::optional<Vec> preimage(const GroupHom& h, const Vec& y);
// Quotient of a by the subgroup generated by gens, with the projection.
SubgroupWithMap quotient(const AbGroup& a, const std::vector<Vec>& gens);

struct DirectSum {
  AbGroup group;
  GroupHom in1, in2, pr1, pr2;
};
DirectSum direct_sum(const AbGroup& a, const AbGroup& b);

AbGroup ext_group(const AbGroup& c, const AbGroup& g);
AbGroup hom_group(const AbGroup& a, const AbGroup& g);

struct Extension {
  AbGroup a, b, c;
  GroupHom inj, surj;  // a -> b -> c
};
// Throws std::invalid_argument when the sequence is not short exact.
void validate_extension(const Extension& e);

struct SplitResolution {
  AbGroup a_prime;
  GroupHom inc;          // a -> a'
  AbGroup b_prime;
  GroupHom inj_prime;    // a' -> b'
  GroupHom surj_prime;   // b' -> c
  GroupHom pushout_map;  // b -> b'
  GroupHom splitting;    // c -> b', surj' after splitting = id
};
SplitResolution split_resolver(const Extension& e);

}  // namespace fanlib
