#include "fanlib/abgroup.hpp"

#include <algorithm>
#include <sstream>

namespace fanlib {

// ---- AbGroup

AbGroup::AbGroup(std::size_t rank, Vec torsion) : rank_(rank), torsion_(std::move(torsion)) {
  for (std::size_t i = 0; i < torsion_.size(); ++i) {
    if (torsion_[i] < 2) throw std::invalid_argument("fanlib: torsion factor must be >= 2");
    if (i + 1 < torsion_.size() && torsion_[i + 1] % torsion_[i] != 0)
      throw std::invalid_argument("fanlib: torsion factors must form a divisor chain");
  }
}

AbGroup AbGroup::from_orders(const Vec& orders) { return present(Matrix::diagonal(orders)).group; }

AbGroup AbGroup::parse(const std::string& text) {
  Vec orders;
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') s += ch;
  if (s == "0" || s.empty()) return AbGroup();
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find('x', pos);
    std::string part = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (part.empty() || part[0] != 'Z') throw std::invalid_argument("bad group factor '" + part + "'");
    if (part == "Z") {
      orders.push_back(0);
    } else if (part[1] == '^') {
      long long r = std::stoll(part.substr(2));
      if (r < 0) throw std::invalid_argument("bad group rank");
      for (long long i = 0; i < r; ++i) orders.push_back(0);
    } else if (part[1] == '/') {
      long long d = std::stoll(part.substr(2));
      if (d < 1) throw std::invalid_argument("bad torsion order");
      orders.push_back(d);
    } else {
      throw std::invalid_argument("bad group factor '" + part + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return from_orders(orders);
}

Vec AbGroup::reduce(Vec x) const {
  if (x.size() != ngens()) throw std::invalid_argument("fanlib: element has wrong length for " + to_string());
  for (std::size_t i = 0; i < torsion_.size(); ++i) x[rank_ + i] = mod(x[rank_ + i], torsion_[i]);
  return x;
}

bool AbGroup::is_zero_element(const Vec& x) const { return is_zero(reduce(x)); }

bool AbGroup::equal_elements(const Vec& x, const Vec& y) const { return reduce(x) == reduce(y); }

Int AbGroup::element_order(const Vec& x0) const {
  Vec x = reduce(x0);
  for (std::size_t i = 0; i < rank_; ++i)
    if (x[i] != 0) return 0;
  Int o = 1;
  for (std::size_t i = 0; i < torsion_.size(); ++i) o = lcm(o, torsion_[i] / gcd(torsion_[i], x[rank_ + i]));
  return o;
}

Int AbGroup::order() const {
  if (rank_ != 0) throw std::domain_error("fanlib: order of an infinite group");
  return torsion_order();
}

Int AbGroup::torsion_order() const {
  Int o = 1;
  for (Int d : torsion_) o = mul(o, d);
  return o;
}

Matrix AbGroup::relations() const {
  Matrix r(ngens(), torsion_.size());
  for (std::size_t i = 0; i < torsion_.size(); ++i) r(rank_ + i, i) = torsion_[i];
  return r;
}

std::vector<Vec> AbGroup::elements() const {
  Int n = order();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n));
  Vec x = zero();
  for (Int k = 0; k < n; ++k) {
    out.push_back(x);
    for (std::size_t i = 0; i < torsion_.size(); ++i) {
      if (++x[i] < torsion_[i]) break;
      x[i] = 0;
    }
  }
  return out;
}

std::string AbGroup::to_string() const {
  if (is_trivial()) return "0";
  std::string s;
  if (rank_ == 1) s = "Z";
  else if (rank_ > 1) s = "Z^" + std::to_string(rank_);
  for (Int d : torsion_) {
    if (!s.empty()) s += " x ";
    s += "Z/" + std::to_string(d);
  }
  return s;
}

// ---- presentations

std::string element_string(const AbGroup& g, const Vec& x0) {
  Vec x = g.reduce(x0);
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == g.rank() && !g.torsion().empty()) os << ';';
    else if (i > 0) os << ',';
    os << x[i];
  }
  os << ')';
  return os.str();
}

Presentation present(const Matrix& rel) {
  const std::size_t n = rel.rows();
  Smith s = smith(rel);
  std::vector<std::size_t> free_idx, tor_idx;
  Vec tor;
  for (std::size_t i = 0; i < n; ++i) {
    Int d = i < s.diag.size() ? s.diag[i] : 0;
    if (d == 0) free_idx.push_back(i);
    else if (d >= 2) tor_idx.push_back(i), tor.push_back(d);
  }
  std::vector<std::size_t> order = free_idx;
  order.insert(order.end(), tor_idx.begin(), tor_idx.end());
  Presentation p;
  p.group = AbGroup(free_idx.size(), tor);
  p.to_canonical = s.u.select_rows(order);
  for (std::size_t k = 0; k < tor.size(); ++k) {
    std::size_t row = free_idx.size() + k;
    for (std::size_t j = 0; j < n; ++j) p.to_canonical(row, j) = mod(p.to_canonical(row, j), tor[k]);
  }
  p.lift = s.uinv.select_columns(order);
  return p;
}

// ---- GroupHom

GroupHom::GroupHom(AbGroup source, AbGroup target, Matrix m)
    : src_(std::move(source)), tgt_(std::move(target)), m_(std::move(m)) {
  if (m_.rows() != tgt_.ngens() || m_.cols() != src_.ngens())
    throw std::invalid_argument("fanlib: homomorphism matrix is " + std::to_string(m_.rows()) + "x" +
                                std::to_string(m_.cols()) + ", expected " + std::to_string(tgt_.ngens()) +
                                "x" + std::to_string(src_.ngens()));
  for (std::size_t i = tgt_.rank(); i < tgt_.ngens(); ++i)
    for (std::size_t j = 0; j < m_.cols(); ++j) m_(i, j) = mod(m_(i, j), tgt_.gen_order(i));
  for (std::size_t j = src_.rank(); j < src_.ngens(); ++j) {
    Int d = src_.gen_order(j);
    for (std::size_t i = 0; i < tgt_.ngens(); ++i) {
      Int e = tgt_.gen_order(i);
      bool ok = e == 0 ? m_(i, j) == 0 : mul(d, m_(i, j)) % e == 0;
      if (!ok)
        throw std::invalid_argument("fanlib: homomorphism not well defined on torsion generator " +
                                    std::to_string(j));
    }
  }
}

GroupHom GroupHom::identity(const AbGroup& a) { return GroupHom(a, a, Matrix::identity(a.ngens())); }

GroupHom GroupHom::zero(const AbGroup& a, const AbGroup& b) {
  return GroupHom(a, b, Matrix(b.ngens(), a.ngens()));
}

Vec GroupHom::apply(const Vec& x) const {
  if (x.size() != src_.ngens()) throw std::invalid_argument("fanlib: element has wrong length");
  return tgt_.reduce(m_ * x);
}

GroupHom GroupHom::after(const GroupHom& h) const {
  if (!(h.tgt_ == src_)) throw std::invalid_argument("fanlib: composing incompatible homomorphisms");
  return GroupHom(h.src_, tgt_, m_ * h.m_);
}

// ---- Subgroup

Subgroup::Subgroup(const AbGroup& ambient, const std::vector<Vec>& gens) : ambient_(ambient) {
  const std::size_t n = ambient.ngens();
  for (const auto& g : gens) gens_.push_back(ambient.reduce(g));
  Matrix w = Matrix::from_columns(gens_, n).hconcat(ambient.relations());
  all_ = IntSolver(w);
  Matrix basis = all_.lattice_basis();
  basis_ = IntSolver(basis);
  Matrix rel(basis.cols(), ambient.torsion().size());
  Matrix ar = ambient.relations();
  for (std::size_t j = 0; j < ar.cols(); ++j) {
    auto y = basis_.solve(ar.column(j));
    if (!y) throw std::logic_error("fanlib: relation outside subgroup lattice");
    for (std::size_t i = 0; i < y->size(); ++i) rel(i, j) = (*y)[i];
  }
  Presentation p = present(rel);
  group_ = p.group;
  to_canonical_ = p.to_canonical;
  embedding_ = GroupHom(group_, ambient_, basis * p.lift);
}

std::optional<Vec> Subgroup::coords(const Vec& x) const {
  auto y = basis_.solve(ambient_.reduce(x));
  if (!y) return std::nullopt;
  return group_.reduce(to_canonical_ * *y);
}

std::optional<Vec> Subgroup::combination(const Vec& x) const {
  auto y = all_.solve(ambient_.reduce(x));
  if (!y) return std::nullopt;
  y->resize(gens_.size());
  return y;
}

// ---- kernels, cokernels, images

SmithReport smith_decompose(const GroupHom& h) {
  const AbGroup& a = h.source();
  const AbGroup& b = h.target();
  Matrix w = h.matrix().hconcat(b.relations());
  SmithReport r;
  Presentation cok = present(w);
  r.cokernel.group = cok.group;
  r.cokernel.map = GroupHom(b, cok.group, cok.to_canonical);

  Matrix k = IntSolver(w).kernel_basis();
  std::vector<Vec> gens;
  for (std::size_t j = 0; j < k.cols(); ++j) {
    Vec v(a.ngens());
    for (std::size_t i = 0; i < a.ngens(); ++i) v[i] = k(i, j);
    gens.push_back(v);
  }
  Subgroup ker(a, gens);
  r.kernel.group = ker.group();
  r.kernel.map = ker.embedding();
  r.rank = a.rank() - ker.group().rank();
  r.is_injective = ker.group().is_trivial();
  r.is_surjective = cok.group.is_trivial();
  return r;
}

Subgroup image(const GroupHom& h) { return Subgroup(h.target(), h.matrix().column_list()); }

std::optional<Vec> preimage(const GroupHom& h, const Vec& y) {
  Matrix w = h.matrix().hconcat(h.target().relations());
  auto z = IntSolver(w).solve(h.target().reduce(y));
  if (!z) return std::nullopt;
  z->resize(h.source().ngens());
  return h.source().reduce(*z);
}

SubgroupWithMap quotient(const AbGroup& a, const std::vector<Vec>& gens) {
  Matrix rel = a.relations().hconcat(Matrix::from_columns(gens, a.ngens()));
  Presentation p = present(rel);
  return {p.group, GroupHom(a, p.group, p.to_canonical)};
}

DirectSum direct_sum(const AbGroup& a, const AbGroup& b) {
  const std::size_t na = a.ngens(), nb = b.ngens();
  Vec orders;
  for (std::size_t i = 0; i < na; ++i) orders.push_back(a.gen_order(i));
  for (std::size_t i = 0; i < nb; ++i) orders.push_back(b.gen_order(i));
  Presentation p = present(Matrix::diagonal(orders));
  Matrix e1(na + nb, na), e2(na + nb, nb), q1(na, na + nb), q2(nb, na + nb);
  for (std::size_t i = 0; i < na; ++i) e1(i, i) = 1, q1(i, i) = 1;
  for (std::size_t i = 0; i < nb; ++i) e2(na + i, i) = 1, q2(i, na + i) = 1;
  return {p.group, GroupHom(a, p.group, p.to_canonical * e1), GroupHom(b, p.group, p.to_canonical * e2),
          GroupHom(p.group, a, q1 * p.lift), GroupHom(p.group, b, q2 * p.lift)};
}

AbGroup ext_group(const AbGroup& c, const AbGroup& g) {
  Vec orders;
  for (Int n : c.torsion()) {
    for (std::size_t i = 0; i < g.rank(); ++i) orders.push_back(n);
    for (Int d : g.torsion()) orders.push_back(gcd(n, d));
  }
  return AbGroup::from_orders(orders);
}

AbGroup hom_group(const AbGroup& a, const AbGroup& g) {
  Vec orders;
  for (std::size_t k = 0; k < a.rank(); ++k) {
    for (std::size_t i = 0; i < g.rank(); ++i) orders.push_back(0);
    for (Int d : g.torsion()) orders.push_back(d);
  }
  for (Int m : a.torsion())
    for (Int d : g.torsion()) orders.push_back(gcd(m, d));
  return AbGroup::from_orders(orders);
}

// ---- extensions

void validate_extension(const Extension& e) {
  if (!(e.inj.source() == e.a) || !(e.inj.target() == e.b) || !(e.surj.source() == e.b) ||
      !(e.surj.target() == e.c))
    throw std::invalid_argument("fanlib: extension maps do not match the groups");
  if (!smith_decompose(e.inj).is_injective) throw std::invalid_argument("fanlib: extension map A->B not injective");
  SmithReport s = smith_decompose(e.surj);
  if (!s.is_surjective) throw std::invalid_argument("fanlib: extension map B->C not surjective");
  if (!e.surj.after(e.inj).matrix().is_zero()) throw std::invalid_argument("fanlib: extension is not a complex");
  Subgroup im = image(e.inj);
  for (std::size_t j = 0; j < s.kernel.group.ngens(); ++j)
    if (!im.contains(s.kernel.map.matrix().column(j)))
      throw std::invalid_argument("fanlib: extension not exact in the middle");
}

namespace {

std::vector<Int> prime_divisors(Int n) {
  std::vector<Int> ps;
  for (Int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

int valuation(Int n, Int p) {
  int v = 0;
  while (n != 0 && n % p == 0) n /= p, ++v;
  return v;
}

// Smallest multiplier m for the summand Z/a such that every class component becomes divisible.
Int torsion_multiplier(Int a, const Vec& orders, const Vec& kappa) {
  Int bound = 1;
  for (Int p : prime_divisors(a)) {
    int e = 0;
    for (Int c : orders) e = std::max(e, valuation(c, p));
    for (int k = 0; k < e; ++k) bound = mul(bound, p);
  }
  for (Int m = 1; m <= bound; ++m) {
    if (bound % m != 0) continue;
    bool ok = true;
    for (std::size_t j = 0; j < orders.size() && ok; ++j)
      ok = mul(m, kappa[j]) % gcd(orders[j], mul(m, a)) == 0;
    if (ok) return m;
  }
  throw std::logic_error("fanlib: no torsion multiplier found");
}

}  // namespace

SplitResolution split_resolver(const Extension& e) {
  validate_extension(e);
  const AbGroup& A = e.a;
  const AbGroup& C = e.c;
  const std::size_t nA = A.ngens(), nB = e.b.ngens(), nC = C.ngens();

  std::vector<Vec> lifts;
  for (std::size_t j = 0; j < nC; ++j) {
    auto b = preimage(e.surj, unit_vector(nC, j));
    if (!b) throw std::logic_error("fanlib: surjection without preimage");
    lifts.push_back(*b);
  }
  // Class components: c_j * lift_j = inj(alpha_j) for each torsion generator of C.
  Vec c_orders;
  std::vector<Vec> alpha;
  for (std::size_t j = C.rank(); j < nC; ++j) {
    Int c = C.gen_order(j);
    auto a = preimage(e.inj, vscale(c, lifts[j]));
    if (!a) throw std::logic_error("fanlib: torsion lift outside image");
    c_orders.push_back(c);
    alpha.push_back(*a);
  }

  Vec mult(nA, 1), new_orders(nA, 0);
  for (std::size_t i = 0; i < nA; ++i) {
    Vec kappa;
    for (const auto& a : alpha) kappa.push_back(a[i]);
    if (i < A.rank()) {
      Int m = 1;
      for (std::size_t j = 0; j < c_orders.size(); ++j) m = lcm(m, c_orders[j] / gcd(c_orders[j], kappa[j]));
      mult[i] = m;
    } else {
      Int a = A.gen_order(i);
      mult[i] = torsion_multiplier(a, c_orders, kappa);
      new_orders[i] = mul(mult[i], a);
    }
  }

  SplitResolution r;
  Presentation ap = present(Matrix::diagonal(new_orders));
  r.a_prime = ap.group;
  r.inc = GroupHom(A, r.a_prime, ap.to_canonical * Matrix::diagonal(mult));
  const std::size_t nAp = r.a_prime.ngens();

  // B' = (A' + B) / {(inc a, -inj a)}.
  Matrix rel(nAp + nB, r.a_prime.torsion().size() + e.b.torsion().size() + nA);
  std::size_t col = 0;
  Matrix ra = r.a_prime.relations(), rb = e.b.relations();
  for (std::size_t j = 0; j < ra.cols(); ++j, ++col)
    for (std::size_t i = 0; i < nAp; ++i) rel(i, col) = ra(i, j);
  for (std::size_t j = 0; j < rb.cols(); ++j, ++col)
    for (std::size_t i = 0; i < nB; ++i) rel(nAp + i, col) = rb(i, j);
  for (std::size_t j = 0; j < nA; ++j, ++col) {
    for (std::size_t i = 0; i < nAp; ++i) rel(i, col) = r.inc.matrix()(i, j);
    for (std::size_t i = 0; i < nB; ++i) rel(nAp + i, col) = neg(e.inj.matrix()(i, j));
  }
  Presentation bp = present(rel);
  r.b_prime = bp.group;
  Matrix e1(nAp + nB, nAp), e2(nAp + nB, nB), q2(nB, nAp + nB);
  for (std::size_t i = 0; i < nAp; ++i) e1(i, i) = 1;
  for (std::size_t i = 0; i < nB; ++i) e2(nAp + i, i) = 1, q2(i, nAp + i) = 1;
  r.inj_prime = GroupHom(r.a_prime, r.b_prime, bp.to_canonical * e1);
  r.pushout_map = GroupHom(e.b, r.b_prime, bp.to_canonical * e2);
  r.surj_prime = GroupHom(r.b_prime, C, e.surj.matrix() * (q2 * bp.lift));

  std::vector<Vec> section_cols;
  for (std::size_t j = 0; j < nC; ++j) {
    Vec raw(nAp + nB, 0);
    for (std::size_t i = 0; i < nB; ++i) raw[nAp + i] = lifts[j][i];
    if (j >= C.rank()) {
      std::size_t t = j - C.rank();
      Int c = c_orders[t];
      GroupHom times_c(r.a_prime, r.a_prime, Matrix::diagonal(Vec(nAp, c)));
      auto beta = preimage(times_c, r.inc.apply(alpha[t]));
      if (!beta) throw std::logic_error("fanlib: pushed-out class is not divisible");
      for (std::size_t i = 0; i < nAp; ++i) raw[i] = neg((*beta)[i]);
    }
    section_cols.push_back(bp.to_canonical * raw);
  }
  r.splitting = GroupHom(C, r.b_prime, Matrix::from_columns(section_cols, r.b_prime.ngens()));
  if (!(r.surj_prime.after(r.splitting) == GroupHom::identity(C)))
    throw std::logic_error("fanlib: split_resolver produced a non-section");
  return r;
}

}  // namespace fanlib
