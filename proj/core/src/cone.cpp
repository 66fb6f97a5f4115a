#include "fanlib/cone.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fanlib {

namespace {

Int sign(Int x) { return (x > 0) - (x < 0); }

// Orthogonal projection of v onto the complement of span(basis), scaled to a primitive vector.
Vec project_out(const Vec& v, const std::vector<Vec>& basis) {
  if (basis.empty()) return primitive(v);
  const std::size_t k = basis.size();
  Matrix g(k, k);
  Vec b(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) g(i, j) = dot(basis[i], basis[j]);
    b[i] = dot(basis[i], v);
  }
  auto [num, den] = solve_rational(g, b);
  Vec r = vscale(den, v);
  for (std::size_t i = 0; i < k; ++i) r = vsub(r, vscale(num[i], basis[i]));
  return primitive(r);
}

std::vector<Vec> canonical_basis(const std::vector<Vec>& rows, std::size_t n) {
  return canonical_row_basis(Matrix::from_rows(rows, n)).row_list();
}

void sort_unique(std::vector<Vec>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Generators double_description(std::size_t n, const std::vector<Vec>& ineq, const std::vector<Vec>& eq) {
  std::vector<Vec> lin, rays;
  for (std::size_t i = 0; i < n; ++i) lin.push_back(unit_vector(n, i));
  std::vector<const Vec*> processed;

  auto step = [&](const Vec& a, bool equality) {
    if (a.size() != n) throw std::invalid_argument("fanlib: constraint has wrong dimension");
    std::size_t p = lin.size();
    for (std::size_t i = 0; i < lin.size(); ++i)
      if (dot(a, lin[i]) != 0) {
        p = i;
        break;
      }
    if (p < lin.size()) {
      const Vec lp = lin[p];
      Int ap = dot(a, lp);
      std::vector<Vec> nl, nr;
      for (std::size_t i = 0; i < lin.size(); ++i)
        if (i != p) {
          Vec l = primitive(vsub(vscale(ap, lin[i]), vscale(dot(a, lin[i]), lp)));
          if (!is_zero(l)) nl.push_back(l);
        }
      for (const auto& r : rays)
        nr.push_back(primitive(vsub(vscale(ap < 0 ? -ap : ap, r), vscale(sign(ap) * dot(a, r), lp))));
      if (!equality) nr.push_back(primitive(vscale(sign(ap), lp)));
      lin = std::move(nl);
      sort_unique(nr);
      rays = std::move(nr);
    } else {
      std::vector<Vec> pos, zero, negs;
      std::vector<Int> vp, vn;
      for (const auto& r : rays) {
        Int v = dot(a, r);
        if (v > 0) pos.push_back(r), vp.push_back(v);
        else if (v < 0) negs.push_back(r), vn.push_back(v);
        else zero.push_back(r);
      }
      std::vector<Vec> nr = zero;
      if (!equality) nr.insert(nr.end(), pos.begin(), pos.end());
      if (!pos.empty() && !negs.empty()) {
        auto tight = [&](const Vec& r) {
          std::vector<bool> z(processed.size());
          for (std::size_t i = 0; i < processed.size(); ++i) z[i] = dot(*processed[i], r) == 0;
          return z;
        };
        std::vector<std::vector<bool>> zall;
        for (const auto& r : rays) zall.push_back(tight(r));
        std::vector<std::vector<bool>> zp, zn;
        for (const auto& r : pos) zp.push_back(tight(r));
        for (const auto& r : negs) zn.push_back(tight(r));
        for (std::size_t i = 0; i < pos.size(); ++i)
          for (std::size_t j = 0; j < negs.size(); ++j) {
            std::vector<bool> common(processed.size());
            for (std::size_t k = 0; k < processed.size(); ++k) common[k] = zp[i][k] && zn[j][k];
            bool adjacent = true;
            for (std::size_t q = 0; q < rays.size() && adjacent; ++q) {
              if (rays[q] == pos[i] || rays[q] == negs[j]) continue;
              bool covers = true;
              for (std::size_t k = 0; k < processed.size(); ++k)
                if (common[k] && !zall[q][k]) {
                  covers = false;
                  break;
                }
              if (covers) adjacent = false;
            }
            if (adjacent) nr.push_back(primitive(vsub(vscale(vp[i], negs[j]), vscale(vn[j], pos[i]))));
          }
      }
      sort_unique(nr);
      rays = std::move(nr);
    }
    if (!equality) processed.push_back(&a);
  };

  for (const auto& e : eq) step(e, true);
  for (const auto& a : ineq) step(a, false);

  Generators g;
  g.lineality = canonical_basis(lin, n);
  for (const auto& r : rays) {
    Vec pr = project_out(r, g.lineality);
    if (!is_zero(pr)) g.rays.push_back(pr);
  }
  sort_unique(g.rays);
  return g;
}

// ---- RationalCone

RationalCone RationalCone::from_generators(std::size_t n, const std::vector<Vec>& gens) {
  RationalCone c;
  c.n_ = n;
  Generators dual = double_description(n, gens);
  c.equations_ = dual.lineality;
  c.facets_ = dual.rays;
  for (auto& f : c.facets_) f = project_out(f, c.equations_);
  sort_unique(c.facets_);
  Generators prim = double_description(n, c.facets_, c.equations_);
  c.lineality_ = prim.lineality;
  c.rays_ = prim.rays;
  return c;
}

RationalCone RationalCone::from_inequalities(std::size_t n, const std::vector<Vec>& ineq, const std::vector<Vec>& eq) {
  Generators g = double_description(n, ineq, eq);
  std::vector<Vec> gens = g.rays;
  for (const auto& l : g.lineality) {
    gens.push_back(l);
    gens.push_back(vneg(l));
  }
  return from_generators(n, gens);
}

RationalCone RationalCone::whole_space(std::size_t n) {
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < n; ++i) {
    gens.push_back(unit_vector(n, i));
    gens.push_back(vneg(unit_vector(n, i)));
  }
  return from_generators(n, gens);
}

std::vector<Vec> RationalCone::generators() const {
  std::vector<Vec> g = rays_;
  for (const auto& l : lineality_) {
    g.push_back(l);
    g.push_back(vneg(l));
  }
  return g;
}

bool RationalCone::contains(const Vec& x) const {
  if (x.size() != n_) throw std::invalid_argument("fanlib: point has wrong dimension for cone");
  for (const auto& e : equations_)
    if (dot(e, x) != 0) return false;
  for (const auto& f : facets_)
    if (dot(f, x) < 0) return false;
  return true;
}

bool RationalCone::contains(const RationalCone& other) const {
  for (const auto& g : other.generators())
    if (!contains(g)) return false;
  return true;
}

bool RationalCone::in_relative_interior(const Vec& x) const {
  if (!contains(x)) return false;
  for (const auto& f : facets_)
    if (dot(f, x) == 0) return false;
  return true;
}

Vec RationalCone::interior_point() const {
  Vec p(n_, 0);
  for (const auto& r : rays_) p = vadd(p, r);
  return p;
}

RationalCone dual_cone(const RationalCone& c) {
  std::vector<Vec> gens = c.facets();
  for (const auto& e : c.equations()) {
    gens.push_back(e);
    gens.push_back(vneg(e));
  }
  return RationalCone::from_generators(c.ambient_rank(), gens);
}

// ---- faces

bool FaceLattice::leq(std::size_t i, std::size_t j) const {
  const auto& a = faces[i].rays;
  const auto& b = faces[j].rays;
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

namespace {

ConeFace make_face(const RationalCone& c, std::vector<std::size_t> rays) {
  ConeFace f;
  const std::size_t n = c.ambient_rank();
  f.rays = std::move(rays);
  for (std::size_t k = 0; k < c.facets().size(); ++k) {
    bool all = true;
    for (auto r : f.rays)
      if (dot(c.facets()[k], c.rays()[r]) != 0) {
        all = false;
        break;
      }
    if (all) f.facets.push_back(k);
  }
  f.support = Vec(n, 0);
  for (auto k : f.facets) f.support = vadd(f.support, c.facets()[k]);
  std::vector<Vec> span = c.lineality();
  for (auto r : f.rays) span.push_back(c.rays()[r]);
  f.dim = span.empty() ? 0 : rank_of(Matrix::from_rows(span, n));
  return f;
}

}  // namespace

FaceLattice face_lattice(const RationalCone& c) {
  const std::size_t nr = c.rays().size();
  std::vector<std::vector<std::size_t>> tight(c.facets().size());
  for (std::size_t k = 0; k < c.facets().size(); ++k)
    for (std::size_t r = 0; r < nr; ++r)
      if (dot(c.facets()[k], c.rays()[r]) == 0) tight[k].push_back(r);

  std::set<std::vector<std::size_t>> seen;
  std::vector<std::vector<std::size_t>> queue;
  std::vector<std::size_t> all(nr);
  for (std::size_t r = 0; r < nr; ++r) all[r] = r;
  seen.insert(all);
  queue.push_back(all);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const auto cur = queue[qi];
    for (std::size_t k = 0; k < tight.size(); ++k) {
      std::vector<std::size_t> next;
      std::set_intersection(cur.begin(), cur.end(), tight[k].begin(), tight[k].end(), std::back_inserter(next));
      if (next.size() == cur.size()) continue;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  FaceLattice lat;
  for (auto& rs : queue) lat.faces.push_back(make_face(c, rs));
  std::sort(lat.faces.begin(), lat.faces.end(), [](const ConeFace& a, const ConeFace& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.rays < b.rays;
  });
  return lat;
}

std::optional<ConeFace> minimal_face(const RationalCone& c, const Vec& x) {
  if (!c.contains(x)) return std::nullopt;
  std::vector<std::size_t> rays;
  for (std::size_t r = 0; r < c.rays().size(); ++r) {
    bool in = true;
    for (const auto& f : c.facets())
      if (dot(f, x) == 0 && dot(f, c.rays()[r]) != 0) {
        in = false;
        break;
      }
    if (in) rays.push_back(r);
  }
  return make_face(c, rays);
}

RationalCone face_cone(const RationalCone& c, const ConeFace& f) {
  std::vector<Vec> gens;
  for (auto r : f.rays) gens.push_back(c.rays()[r]);
  for (const auto& l : c.lineality()) {
    gens.push_back(l);
    gens.push_back(vneg(l));
  }
  return RationalCone::from_generators(c.ambient_rank(), gens);
}

std::vector<Vec> zonotope_lattice_points(std::size_t n, const std::vector<Vec>& gens) {
  if (gens.empty()) return {Vec(n, 0)};
  std::set<Vec> sums{Vec(n, 0)};
  for (const auto& g : gens) {
    std::set<Vec> next = sums;
    for (const auto& s : sums) next.insert(vadd(s, g));
    sums = std::move(next);
  }
  std::vector<Vec> hom;
  for (auto s : sums) {
    s.push_back(1);
    hom.push_back(s);
  }
  RationalCone z = RationalCone::from_generators(n + 1, hom);
  Vec lo(n, 0), hi(n, 0);
  for (const auto& g : gens)
    for (std::size_t i = 0; i < n; ++i) (g[i] < 0 ? lo[i] : hi[i]) += g[i];

  std::vector<Vec> out;
  Vec x = lo;
  x.push_back(1);
  for (;;) {
    if (z.contains(x)) out.push_back(Vec(x.begin(), x.end() - 1));
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (x[i] < hi[i]) {
        ++x[i];
        break;
      }
      x[i] = lo[i];
    }
    if (i == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Vec> open_cell_point(std::size_t n, const std::vector<Vec>& strict, const std::vector<Vec>& weak,
                                   const std::vector<Vec>& eq) {
  std::vector<Vec> ineq = strict;
  ineq.insert(ineq.end(), weak.begin(), weak.end());
  Generators g = double_description(n, ineq, eq);
  Vec p(n, 0);
  for (const auto& r : g.rays) p = vadd(p, r);
  for (const auto& s : strict)
    if (dot(s, p) <= 0) return std::nullopt;
  return p;
}

}  // namespace fanlib

namespace fanlib {

std::vector<Vec> hilbert_basis(std::size_t n, const std::vector<Vec>& lattice_gens, const std::vector<Vec>& ineq,
                               const std::vector<Vec>& eq) {
  if (lattice_gens.empty()) return {};
  Matrix lat = IntSolver(Matrix::from_columns(lattice_gens, n)).lattice_basis();
  std::vector<Vec> eqs = eq;
  for (const auto& r : span_equations(lat).row_list()) eqs.push_back(r);
  RationalCone k = RationalCone::from_inequalities(n, ineq, eqs);
  if (!k.is_sharp()) throw std::invalid_argument("fanlib: Hilbert basis requested for a cone with lineality");
  if (k.rays().empty()) return {};

  // Basis of L ∩ span(K), as columns of `basis`.
  Matrix basis = lat;
  if (!k.equations().empty()) {
    Matrix e = Matrix::from_rows(k.equations(), n) * lat;
    basis = lat * IntSolver(e).kernel_basis();
  }
  IntSolver in_basis(basis);
  const std::size_t d = basis.cols();

  std::vector<Vec> rays;      // scaled into L
  std::vector<Vec> ray_coords;
  for (const auto& r : k.rays()) {
    auto t = in_basis.denominator(r);
    if (!t) throw std::logic_error("fanlib: ray outside lattice span");
    rays.push_back(vscale(*t, r));
    ray_coords.push_back(*in_basis.solve(rays.back()));
  }

  std::set<Vec> cand(rays.begin(), rays.end());
  // Lattice points of the half-open parallelepiped of every independent d-subset of rays.
  std::vector<std::size_t> pick(d);
  for (std::size_t i = 0; i < d; ++i) pick[i] = i;
  const std::size_t m = rays.size();
  if (m >= d) {
    for (;;) {
      std::vector<Vec> cols;
      for (auto i : pick) cols.push_back(ray_coords[i]);
      Matrix t = Matrix::from_columns(cols, d);
      if (determinant(t) != 0) {
        Smith s = smith(t);
        // Coset representatives of Z^d / tZ^d are uinv * (a_1..a_d) with 0 <= a_i < diag_i.
        Vec a(d, 0);
        for (;;) {
          Vec y = s.uinv * a;
          auto [num, den] = solve_rational(t, y);
          for (std::size_t j = 0; j < d; ++j) y = vsub(y, vscale(floor_div(num[j], den), cols[j]));
          Vec x = basis * y;
          if (!is_zero(x)) cand.insert(x);
          std::size_t i = 0;
          for (; i < d; ++i) {
            if (a[i] + 1 < s.diag[i]) {
              ++a[i];
              break;
            }
            a[i] = 0;
          }
          if (i == d) break;
        }
      }
      std::size_t i = d;
      while (i > 0 && pick[i - 1] == m - d + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
    }
  }

  std::vector<Vec> out;
  for (const auto& s : cand) {
    bool reducible = false;
    for (const auto& g : cand)
      if (g != s && k.contains(vsub(s, g))) {
        reducible = true;
        break;
      }
    if (!reducible) out.push_back(s);
  }
  return out;
}

std::vector<Vec> lattice_cone_generators(std::size_t n, const std::vector<Vec>& lattice_gens,
                                         const std::vector<Vec>& cone_gens) {
  if (lattice_gens.empty() || cone_gens.empty()) return {};
  Matrix b = IntSolver(Matrix::from_columns(lattice_gens, n)).lattice_basis();
  const std::size_t m = b.cols();
  if (m == 0) return {};
  IntSolver in_b(b);
  std::vector<Vec> coords;
  for (const auto& g : cone_gens) {
    auto c = in_b.solve(g);
    if (!c) throw std::invalid_argument("fanlib: cone generator outside the lattice");
    coords.push_back(*c);
  }
  RationalCone c = RationalCone::from_generators(m, coords);
  // split off the lineality, which is a saturated sublattice
  Matrix k(m, 0);
  if (!c.lineality().empty())
    k = IntSolver(span_equations(Matrix::from_columns(c.lineality(), m))).kernel_basis();
  Matrix proj = k.cols() ? IntSolver(k).left_kernel() : Matrix::identity(m);
  const std::size_t q = proj.rows();
  std::vector<Vec> out;
  if (q > 0) {
    std::vector<Vec> image, units;
    for (const auto& x : coords) image.push_back(proj * x);
    for (std::size_t i = 0; i < q; ++i) units.push_back(unit_vector(q, i));
    RationalCone pointed = RationalCone::from_generators(q, image);
    IntSolver lift(proj);
    for (const auto& h : hilbert_basis(q, units, pointed.facets(), pointed.equations()))
      out.push_back(b * *lift.solve(h));
  }
  for (std::size_t j = 0; j < k.cols(); ++j) {
    Vec w = b * k.column(j);
    out.push_back(w);
    out.push_back(vneg(w));
  }
  return out;
}

}  // namespace fanlib
