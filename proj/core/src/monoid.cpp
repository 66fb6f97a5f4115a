#include "fanlib/monoid.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace fanlib {

namespace {

std::vector<Vec> free_parts(const FineMonoid& p, const std::vector<Vec>& xs) {
  std::vector<Vec> out;
  for (const auto& x : xs) out.push_back(p.free_part(x));
  return out;
}

Matrix free_projection(const AbGroup& g) {
  Matrix m(g.rank(), g.ngens());
  for (std::size_t i = 0; i < g.rank(); ++i) m(i, i) = 1;
  return m;
}

}  // namespace

// ---- FineMonoid

FineMonoid::FineMonoid() : FineMonoid(AbGroup(), {}) {}

FineMonoid::FineMonoid(AbGroup ambient, std::vector<Vec> gens) {
  auto d = std::make_shared<Data>();
  d->ambient = std::move(ambient);
  for (auto& g : gens) d->gens.push_back(d->ambient.reduce(std::move(g)));
  const std::size_t r = d->ambient.rank();
  d->gp = Subgroup(d->ambient, d->gens);

  std::vector<Vec> fp;
  for (const auto& g : d->gens) fp.emplace_back(g.begin(), g.begin() + r);
  d->cone = RationalCone::from_generators(r, fp);
  std::vector<Vec> unit_elems;
  for (std::size_t i = 0; i < d->gens.size(); ++i) {
    bool u = true;
    for (const auto& f : d->cone.facets())
      if (dot(f, fp[i]) != 0) {
        u = false;
        break;
      }
    d->unit.push_back(u);
    (u ? d->unit_idx : d->nonunit_idx).push_back(i);
    if (u) unit_elems.push_back(d->gens[i]);
  }
  d->units = Subgroup(d->ambient, unit_elems);
  d->grading = Vec(r, 0);
  for (const auto& f : d->cone.facets()) d->grading = vadd(d->grading, f);

  // Positive relation among the unit generators, used to make unit coefficients nonnegative.
  const std::size_t k = unit_elems.size();
  if (k > 0) {
    std::vector<Vec> ineq, eq;
    for (std::size_t j = 0; j < k; ++j) ineq.push_back(unit_vector(k, j));
    for (std::size_t i = 0; i < r; ++i) {
      Vec row(k);
      for (std::size_t j = 0; j < k; ++j) row[j] = unit_elems[j][i];
      eq.push_back(row);
    }
    Generators g = double_description(k, ineq, eq);
    Vec mu(k, 0);
    for (const auto& ray : g.rays) mu = vadd(mu, ray);
    for (Int m : mu)
      if (m <= 0) throw std::logic_error("fanlib: unit generators admit no positive relation");
    Vec t = d->ambient.zero();
    for (std::size_t j = 0; j < k; ++j) t = vadd(t, vscale(mu[j], unit_elems[j]));
    Int ord = d->ambient.element_order(t);
    if (ord == 0) throw std::logic_error("fanlib: unit relation has infinite order");
    d->unit_relation = vscale(ord, mu);
  }
  d_ = std::move(d);
}

const FineMonoid::Data& FineMonoid::search_data() const {
  const Data& d = *d_;
  std::call_once(d.search_once, [&] {
    std::vector<std::size_t> order = d.nonunit_idx;
    std::vector<Int> deg(d.gens.size(), 0);
    for (auto i : order) deg[i] = degree(d.gens[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });
    const std::size_t r = d.ambient.rank();
    std::vector<Vec> tail;
    for (auto i : d.unit_idx) tail.push_back(free_part(d.gens[i]));
    std::vector<RationalCone> cones(order.size() + 1);
    cones[order.size()] = RationalCone::from_generators(r, tail);
    for (std::size_t pos = order.size(); pos-- > 0;) {
      tail.push_back(free_part(d.gens[order[pos]]));
      cones[pos] = RationalCone::from_generators(r, tail);
    }
    d.search_order = std::move(order);
    d.suffix_cones = std::move(cones);
  });
  return d;
}

std::optional<Vec> FineMonoid::membership(const Vec& x0) const {
  const Data& d = search_data();
  Vec x = d.ambient.reduce(x0);
  if (!d.gp.contains(x)) return std::nullopt;
  if (!d.cone.contains(free_part(x))) return std::nullopt;

  const std::vector<std::size_t>& order = d.search_order;
  std::vector<Int> deg(d.gens.size(), 0);
  for (auto i : order) deg[i] = degree(d.gens[i]);

  Vec c(d.gens.size(), 0);
  std::set<std::pair<std::size_t, Vec>> dead;
  Vec unit_coeffs;

  auto settle_units = [&](const Vec& rem) -> bool {
    if (d.unit_idx.empty()) return d.ambient.is_zero_element(rem);
    auto k = d.units.combination(rem);
    if (!k) return false;
    Int shift = 0;
    for (std::size_t j = 0; j < k->size(); ++j)
      if ((*k)[j] < 0) shift = std::max(shift, (neg((*k)[j]) + d.unit_relation[j] - 1) / d.unit_relation[j]);
    unit_coeffs = vadd(*k, vscale(shift, d.unit_relation));
    return true;
  };

  auto dfs = [&](auto&& self, std::size_t pos, const Vec& rem, Int left) -> bool {
    if (pos == order.size()) return left == 0 && settle_units(rem);
    if (dead.count({pos, rem})) return false;
    const std::size_t gi = order[pos];
    const Int dg = deg[gi];
    for (Int t = left / dg; t >= 0; --t) {
      Vec next = d.ambient.reduce(vsub(rem, vscale(t, d.gens[gi])));
      if (!d.suffix_cones[pos + 1].contains(free_part(next))) continue;
      c[gi] = t;
      if (self(self, pos + 1, next, left - mul(t, dg))) return true;
    }
    c[gi] = 0;
    dead.insert({pos, rem});
    return false;
  };
  if (!dfs(dfs, 0, x, degree(x))) return std::nullopt;
  for (std::size_t j = 0; j < d.unit_idx.size(); ++j) c[d.unit_idx[j]] = unit_coeffs[j];
  return c;
}

std::string FineMonoid::to_string() const {
  std::ostringstream os;
  os << '<';
  for (std::size_t i = 0; i < ngens(); ++i) os << (i ? ", " : "") << element_string(ambient(), gens()[i]);
  os << "> in " << ambient().to_string();
  return os.str();
}

namespace {

// Candidates generating P^sat together with the generators of P.
std::vector<Vec> saturation_extras(const FineMonoid& p) {
  const AbGroup& g = p.ambient();
  const std::size_t r = g.rank();
  std::vector<Vec> fp;
  for (const auto& x : p.gens()) {
    Vec f = p.free_part(x);
    if (!is_zero(f)) fp.push_back(f);
  }
  std::sort(fp.begin(), fp.end());
  fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
  Subgroup lattice(AbGroup::free(r), free_parts(p, p.gens()));
  std::vector<Vec> out;
  for (const auto& z : lattice_cone_generators(r, free_parts(p, p.gens()), fp)) {
    auto k = lattice.combination(z);
    if (!k) continue;
    Vec x = g.zero();
    for (std::size_t i = 0; i < k->size(); ++i) x = vadd(x, vscale((*k)[i], p.gens()[i]));
    out.push_back(g.reduce(x));
  }
  const Subgroup& gp = p.gp();
  for (std::size_t j = gp.group().rank(); j < gp.group().ngens(); ++j)
    out.push_back(gp.embedding().matrix().column(j));
  return out;
}

}  // namespace

bool FineMonoid::is_saturated() const {
  for (const auto& x : saturation_extras(*this))
    if (!contains(x)) return false;
  return true;
}

bool same_monoid(const FineMonoid& a, const FineMonoid& b) {
  if (!(a.ambient() == b.ambient())) return false;
  for (const auto& g : a.gens())
    if (!b.contains(g)) return false;
  for (const auto& g : b.gens())
    if (!a.contains(g)) return false;
  return true;
}

FineMonoid minimize_generators(const FineMonoid& p) {
  const AbGroup& g = p.ambient();
  std::vector<Vec> cur;
  for (const auto& x : p.gens())
    if (!g.is_zero_element(x) && std::find(cur.begin(), cur.end(), x) == cur.end()) cur.push_back(x);
  // Drop sums of two remaining generators, then anything the others already generate.
  for (std::size_t i = cur.size(); i-- > 0;) {
    bool sum = false;
    for (std::size_t a = 0; a < cur.size() && !sum; ++a)
      for (std::size_t b = a; b < cur.size() && !sum; ++b)
        if (a != i && b != i && g.reduce(vadd(cur[a], cur[b])) == cur[i]) sum = true;
    if (sum) cur.erase(cur.begin() + i);
  }
  for (std::size_t i = cur.size(); i-- > 0;) {
    std::vector<Vec> rest = cur;
    rest.erase(rest.begin() + i);
    if (FineMonoid(g, rest).contains(cur[i])) cur = std::move(rest);
  }
  std::sort(cur.begin(), cur.end());
  return FineMonoid(g, cur);
}

// ---- faces

std::vector<Face> faces(const FineMonoid& p) {
  FaceLattice lat = face_lattice(p.cone());
  std::vector<Face> out;
  for (const auto& cf : lat.faces) {
    Face f;
    f.support = cf.support;
    f.rank = cf.dim;
    for (std::size_t i = 0; i < p.ngens(); ++i)
      if (dot(f.support, p.free_part(p.gens()[i])) == 0) f.gen_indices.push_back(i);
    out.push_back(std::move(f));
  }
  std::stable_sort(out.begin(), out.end(), [](const Face& a, const Face& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.gen_indices.size() < b.gen_indices.size() ||
           (a.gen_indices.size() == b.gen_indices.size() && a.gen_indices < b.gen_indices);
  });
  return out;
}

bool face_leq(const Face& a, const Face& b) {
  return std::includes(b.gen_indices.begin(), b.gen_indices.end(), a.gen_indices.begin(), a.gen_indices.end());
}

FineMonoid face_monoid(const FineMonoid& p, const Face& f) {
  std::vector<Vec> gens;
  for (auto i : f.gen_indices) gens.push_back(p.gens()[i]);
  return FineMonoid(p.ambient(), gens);
}

Face face_of(const FineMonoid& p, const Vec& x) {
  auto cf = minimal_face(p.cone(), p.free_part(p.ambient().reduce(x)));
  if (!cf) throw std::invalid_argument("fanlib: element outside the monoid's cone");
  Face f;
  f.support = cf->support;
  f.rank = cf->dim;
  for (std::size_t i = 0; i < p.ngens(); ++i)
    if (dot(f.support, p.free_part(p.gens()[i])) == 0) f.gen_indices.push_back(i);
  return f;
}

std::size_t face_index(const std::vector<Face>& fs, const Face& f) {
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (fs[i].gen_indices == f.gen_indices) return i;
  throw std::invalid_argument("fanlib: face not found");
}

// ---- functors

Transformed localize(const FineMonoid& p, const Face& f) {
  std::vector<Vec> gens = p.gens();
  for (auto i : f.gen_indices)
    if (!p.is_unit_gen(i)) gens.push_back(vneg(p.gens()[i]));
  return {FineMonoid(p.ambient(), gens), GroupHom::identity(p.ambient())};
}

std::string transform_name(Transform t) {
  switch (t) {
    case Transform::gp: return "gp";
    case Transform::sharp: return "sharp";
    case Transform::sat: return "sat";
    case Transform::tf: return "tf";
    case Transform::trc: return "trc";
  }
  return "?";
}

Transformed transform(const FineMonoid& p, Transform which) {
  const AbGroup& g = p.ambient();
  switch (which) {
    case Transform::gp: {
      std::vector<Vec> gens = p.gens();
      for (const auto& x : p.gens()) gens.push_back(vneg(x));
      return {FineMonoid(g, gens), GroupHom::identity(g)};
    }
    case Transform::sharp: {
      std::vector<Vec> units;
      for (auto i : p.unit_gens()) units.push_back(p.gens()[i]);
      SubgroupWithMap q = quotient(g, units);
      std::vector<Vec> gens;
      for (auto i : p.nonunit_gens()) gens.push_back(q.map.apply(p.gens()[i]));
      return {FineMonoid(q.group, gens), q.map};
    }
    case Transform::tf: {
      GroupHom pr(g, AbGroup::free(g.rank()), free_projection(g));
      std::vector<Vec> gens;
      for (const auto& x : p.gens()) {
        Vec f = pr.apply(x);
        if (!is_zero(f)) gens.push_back(f);
      }
      return {FineMonoid(pr.target(), gens), pr};
    }
    case Transform::sat: {
      if (p.is_saturated()) return {p, GroupHom::identity(g)};
      std::vector<Vec> gens = p.gens();
      for (auto& x : saturation_extras(p)) gens.push_back(x);
      return {minimize_generators(FineMonoid(g, gens)), GroupHom::identity(g)};
    }
    case Transform::trc: {
      Transformed s = transform(p, Transform::sat);
      Transformed t = transform(s.monoid, Transform::tf);
      return {t.monoid, t.map.after(s.map)};
    }
  }
  throw std::invalid_argument("fanlib: unknown transform");
}

Vec grading_functional(const FineMonoid& p, const Face& f) {
  (void)p;
  return f.support;
}

Elimination gaussian_eliminate(const Matrix& a) {
  const std::size_t m = a.rows();
  if (a.cols() != m) throw std::invalid_argument("fanlib: elimination needs a square matrix");
  for (std::size_t i = 0; i < m; ++i) {
    Int sum = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && a(i, j) > 0) throw std::invalid_argument("fanlib: off-diagonal entries must be <= 0");
      sum = add(sum, a(i, j));
    }
    if (sum <= 0) throw std::invalid_argument("fanlib: row sums must be positive");
  }
  Matrix x = a, k = Matrix::identity(m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t i = 0; i < m; ++i) {
      if (i == c) continue;
      Int acc = x(c, c), aic = x(i, c);
      for (std::size_t j = 0; j < m; ++j) {
        x(i, j) = sub(mul(acc, x(i, j)), mul(aic, x(c, j)));
        k(i, j) = sub(mul(acc, k(i, j)), mul(aic, k(c, j)));
      }
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if ((i == j && x(i, j) <= 0) || (i != j && x(i, j) != 0) || k(i, j) < 0)
        throw std::logic_error("fanlib: elimination left the admissible region");
  return {x, k};
}

FineMonoid saturation_of_submonoid(const FineMonoid& q, const FineMonoid& p) {
  if (!(q.ambient() == p.ambient())) throw std::invalid_argument("fanlib: monoids live in different groups");
  for (const auto& x : q.gens())
    if (!p.contains(x)) throw std::invalid_argument("fanlib: Q is not a submonoid of P");
  const AbGroup& g = p.ambient();
  const std::size_t k = p.ngens();
  std::vector<Vec> fp = free_parts(p, p.gens());
  std::vector<Vec> ineq, eq, lat;
  for (std::size_t i = 0; i < k; ++i) {
    ineq.push_back(unit_vector(k, i));
    lat.push_back(unit_vector(k, i));
  }
  auto pull = [&](const Vec& cov) {
    Vec row(k);
    for (std::size_t i = 0; i < k; ++i) row[i] = dot(cov, fp[i]);
    return row;
  };
  for (const auto& f : q.cone().facets()) ineq.push_back(pull(f));
  for (const auto& e : q.cone().equations()) eq.push_back(pull(e));
  SubgroupWithMap quo = quotient(g, q.gens());
  for (std::size_t r = 0; r < quo.group.rank(); ++r) {
    Vec row(k);
    for (std::size_t i = 0; i < k; ++i) row[i] = quo.map.apply(p.gens()[i])[r];
    eq.push_back(row);
  }
  std::vector<Vec> gens;
  for (const auto& c : hilbert_basis(k, lat, ineq, eq)) {
    Vec x = g.zero();
    for (std::size_t i = 0; i < k; ++i) x = vadd(x, vscale(c[i], p.gens()[i]));
    gens.push_back(g.reduce(x));
  }
  return minimize_generators(FineMonoid(g, gens));
}

// ---- ideals

bool ideal_contains(const FineMonoid& p, const MonoidIdeal& i, const Vec& x) {
  for (const auto& z : i.gens)
    if (p.contains(vsub(x, z))) return true;
  return false;
}

namespace {

Int smallest_multiple_in(const FineMonoid& p, const MonoidIdeal& i, const Vec& x) {
  for (Int n = 2; n <= 100000; ++n)
    if (ideal_contains(p, i, vscale(n, x))) return n;
  throw std::logic_error("fanlib: multiple search did not terminate");
}

Int env_bound() {
  const char* s = std::getenv("FANLIB_DEGREE_BOUND");
  if (!s || !*s) return 0;
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (*end != '\0' || v <= 0) throw std::invalid_argument("fanlib: FANLIB_DEGREE_BOUND must be a positive integer");
  return v;
}

}  // namespace

IdealSaturation ideal_saturated(const FineMonoid& p, const MonoidIdeal& ideal, std::optional<Int> bound) {
  IdealSaturation out;
  if (ideal.gens.empty()) return out;
  for (const auto& z : ideal.gens) {
    if (!p.contains(z)) throw std::invalid_argument("fanlib: ideal generator " + element_string(p.ambient(), z) + " is not in the monoid");
  }
  bool maximal = true;
  for (auto gi : p.nonunit_gens())
    if (!ideal_contains(p, ideal, p.gens()[gi])) {
      maximal = false;
      break;
    }
  if (maximal) return out;

  Transformed sh = transform(p, Transform::sharp);
  const FineMonoid& ps = sh.monoid;
  MonoidIdeal is;
  for (const auto& z : ideal.gens) is.gens.push_back(sh.map.apply(z));
  auto lift = [&](const Vec& x) {
    auto y = preimage(sh.map, x);
    if (!y) throw std::logic_error("fanlib: sharp element without preimage");
    return *y;
  };
  auto finish = [&](const Vec& x) {
    out.kind = IdealSaturation::NotSaturated;
    out.n = smallest_multiple_in(ps, is, x);
    out.witness = lift(x);
    return out;
  };

  if (ps.is_saturated()) {
    const std::size_t r = ps.ambient().rank();
    const auto& facets = ps.cone().facets();
    Subgroup lattice(AbGroup::free(r), free_parts(ps, ps.gens()));
    for (const auto& f : faces(ps)) {
      bool touches = false;
      for (const auto& z : is.gens)
        if (dot(f.support, ps.free_part(z)) == 0) touches = true;
      if (!touches) continue;
      std::vector<Vec> fg;
      for (auto i : f.gen_indices) fg.push_back(ps.free_part(ps.gens()[i]));
      for (const auto& z : zonotope_lattice_points(r, fg)) {
        bool interior = true;
        for (const auto& nrm : facets) {
          bool contains_face = true;
          for (const auto& v : fg)
            if (dot(nrm, v) != 0) contains_face = false;
          if (!contains_face && dot(nrm, z) <= 0) interior = false;
        }
        if (!interior) continue;
        auto k = lattice.combination(z);
        if (!k) continue;
        Vec x = ps.ambient().zero();
        for (std::size_t i = 0; i < k->size(); ++i) x = vadd(x, vscale((*k)[i], ps.gens()[i]));
        x = ps.ambient().reduce(x);
        if (!ideal_contains(ps, is, x)) return finish(x);
      }
    }
    return out;
  }

  Int b = bound.value_or(env_bound());
  if (b <= 0) {
    Int m = 1;
    for (const auto& z : is.gens) m = std::max(m, ps.degree(z));
    b = mul(4, m);
  }
  // Breadth-first sweep of the sharp monoid by degree.
  std::set<Vec> seen{ps.ambient().zero()};
  std::vector<Vec> layer{ps.ambient().zero()};
  std::vector<Vec> all;
  while (!layer.empty()) {
    std::vector<Vec> next;
    for (const auto& x : layer)
      for (const auto& gen : ps.gens()) {
        Vec y = ps.ambient().reduce(vadd(x, gen));
        if (ps.degree(y) > b || !seen.insert(y).second) continue;
        next.push_back(y);
        all.push_back(y);
      }
    layer = std::move(next);
  }
  std::stable_sort(all.begin(), all.end(), [&](const Vec& a, const Vec& c) { return ps.degree(a) < ps.degree(c); });
  for (const auto& x : all) {
    if (ideal_contains(ps, is, x)) continue;
    Face f = face_of(ps, x);
    bool touches = false;
    for (const auto& z : is.gens)
      if (dot(f.support, ps.free_part(z)) == 0) touches = true;
    if (touches) return finish(x);
  }
  out.kind = IdealSaturation::UnknownAtBound;
  out.bound = b;
  return out;
}

// ---- splitting

Matrix orientation(const AbGroup& g, const std::vector<Vec>& gens, const Matrix& reference) {
  Vec d(g.ngens(), 1);
  for (std::size_t i = 0; i < g.rank(); ++i) {
    Int sum = 0;
    for (const auto& x : gens) sum = add(sum, x[i]);
    if (sum == 0)
      for (std::size_t j = 0; j < reference.cols(); ++j)
        if (reference(i, j) != 0) {
          sum = reference(i, j);
          break;
        }
    if (sum < 0) d[i] = -1;
  }
  return Matrix::diagonal(d);
}

UnitPushout pushout_units(const FineMonoid& p, const GroupHom& u) {
  const AbGroup& g = p.ambient();
  const Subgroup& units = p.units();
  const AbGroup& a = units.group();
  if (!(u.source() == a)) throw std::invalid_argument("fanlib: map must start at the unit group " + a.to_string());
  SmithReport rep = smith_decompose(u);
  if (!rep.is_injective) throw std::invalid_argument("fanlib: unit map is not injective");
  if (!rep.cokernel.group.is_finite()) throw std::invalid_argument("fanlib: unit map has infinite cokernel");
  const AbGroup& ap = u.target();
  if (rep.is_surjective) {
    std::vector<Vec> cols;
    for (std::size_t i = 0; i < ap.ngens(); ++i) {
      auto x = preimage(u, unit_vector(ap.ngens(), i));
      cols.push_back(units.embedding().apply(*x));
    }
    return {p, GroupHom::identity(g), GroupHom(ap, g, Matrix::from_columns(cols, g.ngens()))};
  }
  const std::size_t nG = g.ngens(), nAp = ap.ngens();
  Matrix ra = g.relations(), rb = ap.relations();
  Matrix rel(nG + nAp, ra.cols() + rb.cols() + a.ngens());
  std::size_t col = 0;
  for (std::size_t j = 0; j < ra.cols(); ++j, ++col)
    for (std::size_t i = 0; i < nG; ++i) rel(i, col) = ra(i, j);
  for (std::size_t j = 0; j < rb.cols(); ++j, ++col)
    for (std::size_t i = 0; i < nAp; ++i) rel(nG + i, col) = rb(i, j);
  for (std::size_t j = 0; j < a.ngens(); ++j, ++col) {
    for (std::size_t i = 0; i < nG; ++i) rel(i, col) = units.embedding().matrix()(i, j);
    for (std::size_t i = 0; i < nAp; ++i) rel(nG + i, col) = neg(u.matrix()(i, j));
  }
  Presentation pres = present(rel);
  const AbGroup& target = pres.group;
  Matrix e1(nG + nAp, nG), e2(nG + nAp, nAp);
  for (std::size_t i = 0; i < nG; ++i) e1(i, i) = 1;
  for (std::size_t i = 0; i < nAp; ++i) e2(nG + i, i) = 1;
  Matrix iota = pres.to_canonical * e1;
  Matrix jay = pres.to_canonical * e2;
  std::vector<Vec> gens;
  for (const auto& x : p.gens()) gens.push_back(iota * x);
  Matrix flip = orientation(target, gens, iota);
  iota = flip * iota;
  jay = flip * jay;
  gens.clear();
  for (const auto& x : p.gens()) gens.push_back(target.reduce(iota * x));
  for (std::size_t i = 0; i < nAp; ++i) {
    gens.push_back(target.reduce(jay.column(i)));
    if (ap.gen_order(i) == 0) gens.push_back(target.reduce(vneg(jay.column(i))));
  }
  return {FineMonoid(target, gens), GroupHom(g, target, iota), GroupHom(ap, target, jay)};
}

SplitMonoid split_monoid(const FineMonoid& q) {
  const Subgroup& units = q.units();
  const Subgroup& gp = q.gp();
  const AbGroup& a = units.group();
  const AbGroup& b = gp.group();
  std::vector<Vec> inj_cols;
  for (std::size_t j = 0; j < a.ngens(); ++j) {
    auto c = gp.coords(units.embedding().matrix().column(j));
    if (!c) throw std::logic_error("fanlib: unit outside the group of the monoid");
    inj_cols.push_back(*c);
  }
  GroupHom inj(a, b, Matrix::from_columns(inj_cols, b.ngens()));
  SubgroupWithMap cq = quotient(b, inj_cols);
  Extension e{a, b, cq.group, inj, cq.map};
  SplitResolution r = split_resolver(e);

  UnitPushout po = pushout_units(q, r.inc);
  SplitMonoid out;
  out.monoid = po.monoid;
  out.inc = po.inc;
  out.sharp_group = cq.group;
  const AbGroup& target = po.monoid.ambient();

  SmithReport cok = smith_decompose(r.inc);
  for (const auto& c : cok.cokernel.group.elements()) {
    auto l = preimage(cok.cokernel.map, c);
    if (!l) throw std::logic_error("fanlib: cokernel element without lift");
    out.basis.push_back(po.units_map.apply(*l));
  }

  // Factor A' + B -> target through B' to transport the section.
  const std::size_t nAp = r.a_prime.ngens(), nB = b.ngens();
  std::vector<Vec> bp_gens, images;
  for (std::size_t i = 0; i < nAp; ++i) {
    bp_gens.push_back(r.inj_prime.matrix().column(i));
    images.push_back(po.units_map.matrix().column(i));
  }
  for (std::size_t i = 0; i < nB; ++i) {
    bp_gens.push_back(r.pushout_map.matrix().column(i));
    images.push_back(po.inc.apply(gp.embedding().matrix().column(i)));
  }
  Subgroup bp(r.b_prime, bp_gens);
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < r.b_prime.ngens(); ++k) {
    auto coeff = bp.combination(unit_vector(r.b_prime.ngens(), k));
    if (!coeff) throw std::logic_error("fanlib: pushout group not generated");
    Vec x = target.zero();
    for (std::size_t i = 0; i < coeff->size(); ++i) x = vadd(x, vscale((*coeff)[i], images[i]));
    cols.push_back(target.reduce(x));
  }
  GroupHom to_target(r.b_prime, target, Matrix::from_columns(cols, target.ngens()));
  out.splitting = to_target.after(r.splitting);
  return out;
}

}  // namespace fanlib
