#pragma once

#include <optional>
#include <vector>

#include "fanlib/arith.hpp"

namespace fanlib {

struct Generators {
  std::vector<Vec> lineality;  // basis of the lineality space
  std::vector<Vec> rays;       // extreme rays modulo lineality
};

// Generators of {x in Q^n : a.x >= 0 for a in ineq, e.x = 0 for e in eq}.
Generators double_description(std::size_t n, const std::vector<Vec>& ineq, const std::vector<Vec>& eq = {});

// Rational polyhedral cone in Q^n with both descriptions kept canonical:
// lineality and equations are row-reduced bases, rays are projected orthogonally to the
// lineality space, facet normals orthogonally to the equations; all primitive and sorted.
class RationalCone {
 public:
  RationalCone() = default;
  static RationalCone from_generators(std::size_t n, const std::vector<Vec>& gens);
  static RationalCone from_inequalities(std::size_t n, const std::vector<Vec>& ineq,
                                        const std::vector<Vec>& eq = {});
// Generators of L ∩ cone(cone_gens) with the lineality allowed; cone_gens must lie in L.
std::vector<Vec> lattice_cone_generators(std::size_t n, const std::vector<Vec>& lattice_gens,
                                         const std::vector<Vec>& cone_gens);
  static RationalCone whole_space(std::size_t n);

  std::size_t ambient_rank() const { return n_; }
  const std::vector<Vec>& rays() const { return rays_; }
  const std::vector<Vec>& lineality() const { return lineality_; }
  const std::vector<Vec>& facets() const { return facets_; }
  const std::vector<Vec>& equations() const { return equations_; }
  std::vector<Vec> generators() const;  // rays followed by +-lineality
  std::size_t dim() const { return n_ - equations_.size(); }
  bool is_sharp() const { return lineality_.empty(); }

  bool contains(const Vec& x) const;
  bool contains(const RationalCone& other) const;
  bool in_relative_interior(const Vec& x) const;
  Vec interior_point() const;  // sum of the primitive rays

  friend bool operator==(const RationalCone& a, const RationalCone& b) {
    return a.n_ == b.n_ && a.contains(b) && b.contains(a);
  }

 private:
  std::size_t n_ = 0;
  std::vector<Vec> rays_, lineality_, facets_, equations_;
};

// A face is cut out by a supporting covector (the sum of the facet normals containing it).
struct ConeFace {
  std::vector<std::size_t> rays;    // indices into the parent's rays
  std::vector<std::size_t> facets;  // parent facets containing the face
  Vec support;
  std::size_t dim = 0;
};

struct FaceLattice {
  std::vector<ConeFace> faces;  // sorted by dimension, the lineality face first, the cone last
  bool leq(std::size_t i, std::size_t j) const;
};

RationalCone dual_cone(const RationalCone& c);
FaceLattice face_lattice(const RationalCone& c);
// Face whose relative interior contains x; nullopt when x is outside the cone.
std::optional<ConeFace> minimal_face(const RationalCone& c, const Vec& x);
RationalCone face_cone(const RationalCone& c, const ConeFace& f);
// All lattice points sum l_i g_i with l_i in [0,1].
std::vector<Vec> zonotope_lattice_points(std::size_t n, const std::vector<Vec>& gens);
// A lattice point of {strict > 0, weak >= 0, eq = 0}, or nullopt when that set is empty.
std::optional<Vec> open_cell_point(std::size_t n, const std::vector<Vec>& strict, const std::vector<Vec>& weak,
                                   const std::vector<Vec>& eq);

// Minimal generators of the monoid L ∩ K, where L is the lattice spanned by lattice_gens in Z^n and
// K = {ineq >= 0, eq = 0}. K ∩ span(L) must be pointed.
std::vector<Vec> hilbert_basis(std::size_t n, const std::vector<Vec>& lattice_gens, const std::vector<Vec>& ineq,
                               const std::vector<Vec>& eq = {});
// Generators of L ∩ cone(cone_gens) with the lineality allowed; cone_gens must lie in L.
std::vector<Vec> lattice_cone_generators(std::size_t n, const std::vector<Vec>& lattice_gens,
                                         const std::vector<Vec>& cone_gens);

}  // namespace fanlib
