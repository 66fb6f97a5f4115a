#include "fanlib/monhom.hpp"

#include <algorithm>
#include <set>

namespace fanlib {

MonoidHom::MonoidHom(FineMonoid source, FineMonoid target, GroupHom map)
    : src_(std::move(source)), tgt_(std::move(target)), map_(std::move(map)) {
  if (!(map_.source() == src_.ambient()) || !(map_.target() == tgt_.ambient()))
    throw std::invalid_argument("fanlib: group map does not match the monoids' ambient groups");
  for (std::size_t i = 0; i < src_.ngens(); ++i)
    if (!tgt_.contains(map_.apply(src_.gens()[i])))
      throw std::invalid_argument("fanlib: generator " + std::to_string(i) + " maps to " +
                                  element_string(tgt_.ambient(), map_.apply(src_.gens()[i])) +
                                  ", outside the target monoid");
}

MonoidHom MonoidHom::identity(const FineMonoid& p) { return MonoidHom(p, p, GroupHom::identity(p.ambient())); }

std::vector<Vec> MonoidHom::image_gens() const {
  std::vector<Vec> out;
  for (const auto& g : src_.gens()) out.push_back(map_.apply(g));
  return out;
}

MonoidHom MonoidHom::after(const MonoidHom& h) const { return MonoidHom(h.src_, tgt_, map_.after(h.map_)); }

GroupHom units_map(const MonoidHom& h) {
  const Subgroup& su = h.source().units();
  const Subgroup& tu = h.target().units();
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < su.group().ngens(); ++j) {
    auto c = tu.coords(h.apply(su.embedding().matrix().column(j)));
    if (!c) throw std::logic_error("fanlib: unit maps outside the target units");
    cols.push_back(*c);
  }
  return GroupHom(su.group(), tu.group(), Matrix::from_columns(cols, tu.group().ngens()));
}

GroupHom gp_map(const MonoidHom& h) {
  const Subgroup& s = h.source().gp();
  const Subgroup& t = h.target().gp();
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < s.group().ngens(); ++j) {
    auto c = t.coords(h.apply(s.embedding().matrix().column(j)));
    if (!c) throw std::logic_error("fanlib: group element maps outside the target group");
    cols.push_back(*c);
  }
  return GroupHom(s.group(), t.group(), Matrix::from_columns(cols, t.group().ngens()));
}

namespace {

std::vector<std::size_t> preimage_gens(const MonoidHom& h, const Face& f) {
  std::vector<std::size_t> idx;
  const FineMonoid& p = h.target();
  for (std::size_t i = 0; i < h.source().ngens(); ++i)
    if (dot(f.support, p.free_part(h.apply(h.source().gens()[i]))) == 0) idx.push_back(i);
  return idx;
}

Face face_from_gens(const std::vector<Face>& fs, const std::vector<std::size_t>& idx) {
  for (const auto& f : fs)
    if (f.gen_indices == idx) return f;
  throw std::logic_error("fanlib: preimage of a face is not a face");
}

}  // namespace

std::vector<std::size_t> spec_map(const MonoidHom& h) {
  std::vector<Face> fq = faces(h.source());
  std::vector<std::size_t> out;
  for (const auto& f : faces(h.target())) out.push_back(face_index(fq, face_from_gens(fq, preimage_gens(h, f))));
  return out;
}

bool spec_is_isomorphism(const MonoidHom& h) {
  std::vector<Face> fq = faces(h.source()), fp = faces(h.target());
  if (fq.size() != fp.size()) return false;
  std::vector<std::size_t> m = spec_map(h);
  std::vector<std::size_t> sorted = m;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (std::size_t i = 0; i < fp.size(); ++i)
    for (std::size_t j = 0; j < fp.size(); ++j)
      if (face_leq(fp[i], fp[j]) != face_leq(fq[m[i]], fq[m[j]])) return false;
  return true;
}

bool is_local(const MonoidHom& h) {
  const FineMonoid& q = h.source();
  for (std::size_t i = 0; i < q.ngens(); ++i)
    if (h.target().units().contains(h.apply(q.gens()[i])) != q.is_unit_gen(i)) return false;
  return true;
}

bool is_injective(const MonoidHom& h) {
  const Subgroup& gp = h.source().gp();
  return smith_decompose(h.map().after(gp.embedding())).is_injective;
}

bool is_surjective(const MonoidHom& h) {
  FineMonoid im(h.target().ambient(), h.image_gens());
  for (const auto& g : h.target().gens())
    if (!im.contains(g)) return false;
  return true;
}

bool is_isomorphism(const MonoidHom& h) { return is_injective(h) && is_surjective(h); }

bool is_dense(const MonoidHom& h) {
  const FineMonoid& p = h.target();
  FineMonoid im(p.ambient(), h.image_gens());
  SubgroupWithMap q = quotient(p.ambient(), h.image_gens());
  for (const auto& g : p.gens()) {
    if (!im.cone().contains(p.free_part(g))) return false;
    Vec c = q.map.apply(g);
    for (std::size_t i = 0; i < q.group.rank(); ++i)
      if (c[i] != 0) return false;
  }
  return true;
}

std::vector<Vec> module_generators(const MonoidHom& h) {
  if (!is_dense(h)) return {};
  const FineMonoid& p = h.target();
  const AbGroup& t = p.ambient();
  FineMonoid im(t, h.image_gens());
  std::set<Vec> cand{t.zero()};
  for (const auto& g : p.gens()) {
    Int n = 1;
    while (!im.contains(vscale(n, g))) ++n;
    std::set<Vec> next;
    for (const auto& s : cand)
      for (Int c = 0; c < n; ++c) next.insert(t.reduce(vadd(s, vscale(c, g))));
    cand = std::move(next);
  }
  std::vector<Vec> order(cand.begin(), cand.end());
  std::stable_sort(order.begin(), order.end(), [&](const Vec& a, const Vec& b) { return p.degree(a) < p.degree(b); });
  std::vector<Vec> kept;
  for (const auto& s : order) {
    bool covered = false;
    for (const auto& k : kept)
      if (im.contains(vsub(s, k))) {
        covered = true;
        break;
      }
    if (!covered) kept.push_back(s);
  }
  return kept;
}

bool is_quasi_finite(const MonoidHom& h) {
  const FineMonoid& p = h.target();
  for (const auto& f : faces(p)) {
    std::vector<Vec> imgs;
    for (auto i : preimage_gens(h, f)) imgs.push_back(p.free_part(h.apply(h.source().gens()[i])));
    std::size_t r = imgs.empty() ? 0 : rank_of(Matrix::from_rows(imgs, p.ambient().rank()));
    if (r != f.rank) return false;
  }
  return true;
}

namespace {

// Preimage of the localization of P at f under h^gp, compared with the localization of Q at the
// preimage face (or Q itself when `global`).
bool cartesian_at(const MonoidHom& h, const Face& f, bool global) {
  const FineMonoid& q = h.source();
  const FineMonoid& p = h.target();
  const AbGroup& t = p.ambient();
  std::vector<Vec> imgs = h.image_gens();
  Subgroup image(t, imgs);
  SubgroupWithMap tq = quotient(t, imgs);

  std::vector<Vec> kernel;
  SmithReport ker = smith_decompose(h.map().after(q.gp().embedding()));
  for (std::size_t j = 0; j < ker.kernel.group.ngens(); ++j) {
    Vec x = q.gp().embedding().apply(ker.kernel.map.matrix().column(j));
    kernel.push_back(x);
    kernel.push_back(vneg(x));
  }

  FineMonoid pf = localize(p, f).monoid;
  FineMonoid qg = global ? q : localize(q, face_from_gens(faces(q), preimage_gens(h, f))).monoid;
  const std::size_t m = pf.ngens();
  std::vector<Vec> cols;
  for (const auto& g : pf.gens()) cols.push_back(tq.map.apply(g));
  Matrix w = Matrix::from_columns(cols, tq.group.ngens()).hconcat(tq.group.relations());
  Matrix k = IntSolver(w).kernel_basis();
  std::vector<Vec> lattice;
  for (std::size_t j = 0; j < k.cols(); ++j) {
    Vec v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = k(i, j);
    if (!is_zero(v)) lattice.push_back(v);
  }
  std::vector<Vec> ineq;
  for (std::size_t i = 0; i < m; ++i) ineq.push_back(unit_vector(m, i));
  for (const auto& c : hilbert_basis(m, lattice, ineq)) {
    Vec y = t.zero();
    for (std::size_t i = 0; i < m; ++i) y = vadd(y, vscale(c[i], pf.gens()[i]));
    auto coeff = image.combination(y);
    if (!coeff) throw std::logic_error("fanlib: solution outside the image group");
    Vec x = q.ambient().zero();
    for (std::size_t i = 0; i < coeff->size(); ++i) x = vadd(x, vscale((*coeff)[i], q.gens()[i]));
    if (!qg.contains(x)) return false;
  }
  for (const auto& x : kernel)
    if (!qg.contains(x)) return false;
  return true;
}

}  // namespace

bool is_exact(const MonoidHom& h) {
  for (const auto& f : faces(h.target()))
    if (!cartesian_at(h, f, false)) return false;
  return true;
}

bool is_cartesian(const MonoidHom& h) { return cartesian_at(h, faces(h.target()).front(), true); }

bool is_localization(const MonoidHom& h) {
  if (!is_injective(h)) return false;
  std::vector<Vec> gens = h.image_gens();
  for (std::size_t i = 0; i < h.source().ngens(); ++i) {
    Vec y = h.apply(h.source().gens()[i]);
    if (h.target().units().contains(y)) gens.push_back(vneg(y));
  }
  return same_monoid(h.target(), FineMonoid(h.target().ambient(), gens));
}

IdealSaturation reducedness(const MonoidHom& h, std::optional<Int> bound) {
  MonoidIdeal ideal;
  for (auto i : h.source().nonunit_gens()) ideal.gens.push_back(h.apply(h.source().gens()[i]));
  return ideal_saturated(h.target(), ideal, bound);
}

MonoidHom sharpening(const MonoidHom& h) {
  Transformed sq = transform(h.source(), Transform::sharp);
  Transformed sp = transform(h.target(), Transform::sharp);
  const AbGroup& a = sq.monoid.ambient();
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < a.ngens(); ++j) {
    auto x = preimage(sq.map, unit_vector(a.ngens(), j));
    if (!x) throw std::logic_error("fanlib: quotient map not surjective");
    cols.push_back(sp.map.apply(h.apply(*x)));
  }
  return MonoidHom(sq.monoid, sp.monoid, GroupHom(a, sp.monoid.ambient(), Matrix::from_columns(cols, sp.monoid.ambient().ngens())));
}

std::optional<std::vector<Vec>> cze_basis(const MonoidHom& h) {
  if (!is_injective(h)) return std::nullopt;
  if (!smith_decompose(gp_map(h)).cokernel.group.is_finite()) return std::nullopt;
  if (!is_isomorphism(sharpening(h))) return std::nullopt;
  SmithReport cok = smith_decompose(units_map(h));
  std::vector<Vec> basis;
  for (const auto& c : cok.cokernel.group.elements()) {
    auto l = preimage(cok.cokernel.map, c);
    basis.push_back(h.target().units().embedding().apply(*l));
  }
  return basis;
}

FlatCertificate flat_certificate(const MonoidHom& h) {
  FlatCertificate out;
  if (!is_injective(h)) {
    out.kind = FlatCertificate::NotFlat;
    out.reason = "group map not injective";
    return out;
  }
  out.kind = FlatCertificate::Flat;
  if (is_surjective(h)) {
    out.reason = "isomorphism";
    return out;
  }
  if (is_localization(h)) {
    out.reason = "localization";
    return out;
  }
  if (auto s = cze_basis(h)) {
    out.reason = "cze";
    out.basis = *s;
    return out;
  }
  std::vector<Vec> gens = module_generators(h);
  if (!gens.empty()) {
    Subgroup image(h.target().ambient(), h.image_gens());
    bool basis = true;
    for (std::size_t i = 0; i < gens.size() && basis; ++i)
      for (std::size_t j = i + 1; j < gens.size() && basis; ++j)
        if (image.contains(vsub(gens[i], gens[j]))) basis = false;
    if (basis) {
      out.reason = "free basis";
      out.basis = gens;
      return out;
    }
  }
  out.kind = FlatCertificate::Unknown;
  out.reason = "no certificate found";
  return out;
}

HomProfile classify_hom(const MonoidHom& h) {
  HomProfile r;
  r.local = is_local(h);
  r.injective = is_injective(h);
  r.surjective = is_surjective(h);
  r.dense = is_dense(h);
  r.finite = r.dense;
  if (r.finite) r.module_gens = module_generators(h);
  r.quasi_finite = is_quasi_finite(h);
  r.exact = is_exact(h);
  r.reduced = reducedness(h);
  if (auto s = cze_basis(h)) {
    r.cze = true;
    r.cze_basis = *s;
  }
  r.flat = flat_certificate(h);
  if (r.cze && !(r.finite && r.local)) throw std::logic_error("fanlib: CZE map that is not finite and local");
  if (r.cze) {
    SmithReport cok = smith_decompose(units_map(h));
    if (static_cast<Int>(r.cze_basis.size()) != cok.cokernel.group.order())
      throw std::logic_error("fanlib: CZE basis size differs from the unit cokernel order");
  }
  if (r.flat.kind == FlatCertificate::Flat && !r.injective) throw std::logic_error("fanlib: flat map that is not injective");
  return r;
}

std::vector<Int> prime_factors(Int n) {
  std::vector<Int> ps;
  for (Int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

FiberPrimes reduced_fiber_primes(const MonoidHom& h) {
  if (!is_local(h)) throw std::invalid_argument("fanlib: reduced fiber primes need a local map");
  FiberPrimes out;
  out.witness = reducedness(h);
  if (out.witness.kind == IdealSaturation::NotSaturated) {
    out.kind = FiberPrimes::NotReducedAllPrimes;
    return out;
  }
  if (out.witness.kind == IdealSaturation::UnknownAtBound) out.kind = FiberPrimes::Unknown;
  SmithReport cok = smith_decompose(units_map(h));
  out.primes = prime_factors(cok.cokernel.group.torsion_order());
  return out;
}

QuotientResult quotient_by_character(const FineMonoid& p, const GroupHom& a) {
  if (!(a.source() == p.ambient())) throw std::invalid_argument("fanlib: character must be defined on the ambient group");
  if (!a.target().is_finite()) throw std::invalid_argument("fanlib: character target " + a.target().to_string() + " is not finite");
  const std::size_t k = p.ngens();
  std::vector<Vec> cols;
  for (const auto& g : p.gens()) cols.push_back(a.apply(g));
  Matrix w = Matrix::from_columns(cols, a.target().ngens()).hconcat(a.target().relations());
  Matrix kb = IntSolver(w).kernel_basis();
  std::vector<Vec> lattice, ineq;
  for (std::size_t j = 0; j < kb.cols(); ++j) {
    Vec v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = kb(i, j);
    if (!is_zero(v)) lattice.push_back(v);
  }
  for (std::size_t i = 0; i < k; ++i) ineq.push_back(unit_vector(k, i));
  std::vector<Vec> gens;
  for (const auto& c : hilbert_basis(k, lattice, ineq)) {
    Vec x = p.ambient().zero();
    for (std::size_t i = 0; i < k; ++i) x = vadd(x, vscale(c[i], p.gens()[i]));
    gens.push_back(p.ambient().reduce(x));
  }
  FineMonoid sub = minimize_generators(FineMonoid(p.ambient(), gens));
  return {sub, MonoidHom(sub, p, GroupHom::identity(p.ambient()))};
}

MonoidHom cze_cover_basic(const FineMonoid& p, const GroupHom& u) {
  UnitPushout po = pushout_units(p, u);
  MonoidHom h(p, po.monoid, po.inc);
  if (!cze_basis(h)) throw std::logic_error("fanlib: cover construction is not CZE");
  return h;
}

PushoutResult pushout_int(const MonoidHom& f, const MonoidHom& g) {
  if (!(f.source().ambient() == g.source().ambient()))
    throw std::invalid_argument("fanlib: pushout legs have different sources");
  const AbGroup& g1 = f.target().ambient();
  const AbGroup& g2 = g.target().ambient();
  const std::size_t n1 = g1.ngens(), n2 = g2.ngens();
  const FineMonoid& q = f.source();
  Matrix r1 = g1.relations(), r2 = g2.relations();
  Matrix rel(n1 + n2, r1.cols() + r2.cols() + q.ngens());
  std::size_t col = 0;
  for (std::size_t j = 0; j < r1.cols(); ++j, ++col)
    for (std::size_t i = 0; i < n1; ++i) rel(i, col) = r1(i, j);
  for (std::size_t j = 0; j < r2.cols(); ++j, ++col)
    for (std::size_t i = 0; i < n2; ++i) rel(n1 + i, col) = r2(i, j);
  for (const auto& x : q.gens()) {
    Vec a = f.apply(x), b = g.apply(x);
    for (std::size_t i = 0; i < n1; ++i) rel(i, col) = a[i];
    for (std::size_t i = 0; i < n2; ++i) rel(n1 + i, col) = neg(b[i]);
    ++col;
  }
  Presentation pres = present(rel);
  const AbGroup& w = pres.group;
  Matrix e1(n1 + n2, n1), e2(n1 + n2, n2);
  for (std::size_t i = 0; i < n1; ++i) e1(i, i) = 1;
  for (std::size_t i = 0; i < n2; ++i) e2(n1 + i, i) = 1;
  Matrix i1 = pres.to_canonical * e1, i2 = pres.to_canonical * e2;
  std::vector<Vec> gens;
  for (const auto& x : f.target().gens()) gens.push_back(i1 * x);
  for (const auto& x : g.target().gens()) gens.push_back(i2 * x);
  Matrix flip = orientation(w, gens, i1.hconcat(i2));
  i1 = flip * i1;
  i2 = flip * i2;
  gens.clear();
  for (const auto& x : f.target().gens()) gens.push_back(w.reduce(i1 * x));
  for (const auto& x : g.target().gens()) gens.push_back(w.reduce(i2 * x));
  PushoutResult out;
  out.monoid = minimize_generators(FineMonoid(w, gens));
  out.left = MonoidHom(f.target(), out.monoid, GroupHom(g1, w, i1));
  out.right = MonoidHom(g.target(), out.monoid, GroupHom(g2, w, i2));
  // over a group the monoid pushout is a quotient of the direct sum by a subgroup, hence integral
  out.certified = q.is_group() || flat_certificate(f).kind == FlatCertificate::Flat ||
                  flat_certificate(g).kind == FlatCertificate::Flat;
  return out;
}

}  // namespace fanlib
