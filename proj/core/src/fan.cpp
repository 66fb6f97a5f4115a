#include "fanlib/fan.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace fanlib {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("fanlib: " + what); }

bool agree_on_gens(const MonoidHom& a, const MonoidHom& b) {
  const AbGroup& t = a.target().ambient();
  for (const auto& g : a.source().gens())
    if (!t.equal_elements(a.apply(g), b.apply(g))) return false;
  return true;
}

std::size_t face_with_gens(const std::vector<Face>& fs, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    std::vector<std::size_t> g = fs[i].gen_indices;
    std::sort(g.begin(), g.end());
    if (g == idx) return i;
  }
  return fs.size();
}

// Generators of stalk(x) that become units at y.
std::vector<std::size_t> units_at(const FineMonoid& mx, const MonoidHom& gen, const FineMonoid& my) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mx.ngens(); ++i)
    if (my.units().contains(gen.apply(mx.gens()[i]))) idx.push_back(i);
  return idx;
}

GroupHom inverse(const GroupHom& h) {
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < h.target().ngens(); ++j) {
    auto x = preimage(h, unit_vector(h.target().ngens(), j));
    if (!x) fail("identification map is not surjective");
    cols.push_back(*x);
  }
  GroupHom inv(h.target(), h.source(), Matrix::from_columns(cols, h.source().ngens()));
  for (std::size_t j = 0; j < h.source().ngens(); ++j) {
    Vec e = unit_vector(h.source().ngens(), j);
    if (!h.source().equal_elements(inv.apply(h.apply(e)), e)) fail("identification map is not injective");
  }
  return inv;
}

bool same_map(const GroupHom& a, const GroupHom& b) {
  for (std::size_t j = 0; j < a.source().ngens(); ++j) {
    Vec e = unit_vector(a.source().ngens(), j);
    if (!a.target().equal_elements(a.apply(e), b.apply(e))) return false;
  }
  return true;
}

FineMonoid trivial_monoid() { return FineMonoid(AbGroup::free(0), {}); }

}  // namespace

Fan::Fan(std::vector<std::string> names, std::vector<FineMonoid> stalks, std::vector<std::vector<bool>> le,
         std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gen_maps)
    : names_(std::move(names)), stalks_(std::move(stalks)), le_(std::move(le)), gen_(std::move(gen_maps)) {
  const std::size_t n = stalks_.size();
  if (n == 0) fail("a fan needs at least one point");
  if (names_.size() != n || le_.size() != n) fail("fan data sizes disagree");
  for (const auto& row : le_)
    if (row.size() != n) fail("order matrix is not square");
  for (std::size_t x = 0; x < n; ++x) {
    if (!le_[x][x]) fail("order is not reflexive at " + names_[x]);
    for (std::size_t y = 0; y < n; ++y) {
      if (x != y && le_[x][y] && le_[y][x]) fail("order is not antisymmetric at " + names_[x] + ", " + names_[y]);
      for (std::size_t z = 0; z < n; ++z)
        if (le_[x][y] && le_[y][z] && !le_[x][z]) fail("order is not transitive");
    }
  }
  for (const auto& [k, h] : gen_)
    if (k.first == k.second || !le_[k.first][k.second]) fail("generization map between unrelated points");
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y || !le_[x][y]) continue;
      auto it = gen_.find({x, y});
      if (it == gen_.end()) fail("missing generization map " + names_[x] + " -> " + names_[y]);
      const MonoidHom& h = it->second;
      if (!(h.source().ambient() == stalks_[x].ambient()) || !(h.target().ambient() == stalks_[y].ambient()))
        fail("generization map " + names_[x] + " -> " + names_[y] + " has the wrong groups");
      if (!is_localization(h)) fail("generization map " + names_[x] + " -> " + names_[y] + " is not a localization");
    }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z) {
        if (x == y || y == z || !le_[x][y] || !le_[y][z]) continue;
        if (!agree_on_gens(gen_map(y, z).after(gen_map(x, y)), gen_map(x, z)))
          fail("generization maps do not compose at " + names_[x] + " < " + names_[y] + " < " + names_[z]);
      }
  // U_x must look like Spec of its stalk.
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<Face> fs = faces(stalks_[x]);
    std::vector<std::size_t> up = up_set(x);
    if (up.size() != fs.size())
      fail("neighbourhood of " + names_[x] + " has " + std::to_string(up.size()) + " points but its stalk has " +
           std::to_string(fs.size()) + " faces");
    std::vector<std::size_t> idx(n, fs.size());
    std::vector<bool> hit(fs.size(), false);
    for (auto y : up) {
      std::size_t i = face_with_gens(fs, units_at(stalks_[x], gen_map(x, y), stalks_[y]));
      if (i == fs.size() || hit[i]) fail("neighbourhood of " + names_[x] + " does not match the faces of its stalk");
      hit[i] = true;
      idx[y] = i;
    }
    for (auto y : up)
      for (auto z : up)
        if (le_[y][z] != face_leq(fs[idx[y]], fs[idx[z]]))
          fail("order near " + names_[x] + " does not match the faces of its stalk");
  }
}

bool Fan::covers(std::size_t x, std::size_t y) const {
  if (x == y || !le_[x][y]) return false;
  for (std::size_t z = 0; z < size(); ++z)
    if (z != x && z != y && le_[x][z] && le_[z][y]) return false;
  return true;
}

MonoidHom Fan::gen_map(std::size_t x, std::size_t y) const {
  if (x == y) return MonoidHom::identity(stalks_[x]);
  auto it = gen_.find({x, y});
  if (it == gen_.end()) throw std::out_of_range("fanlib: points are not related");
  return it->second;
}

std::vector<std::size_t> Fan::up_set(std::size_t x) const {
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < size(); ++y)
    if (le_[x][y]) out.push_back(y);
  return out;
}

std::vector<std::size_t> Fan::down_set(std::size_t x) const {
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < size(); ++y)
    if (le_[y][x]) out.push_back(y);
  return out;
}

std::vector<std::size_t> Fan::maximal_points() const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < size(); ++x)
    if (up_set(x).size() == 1) out.push_back(x);
  return out;
}

std::optional<std::size_t> Fan::affine_center() const {
  for (std::size_t x = 0; x < size(); ++x)
    if (up_set(x).size() == size()) return x;
  return std::nullopt;
}

FanMap::FanMap(Fan source, Fan target, std::vector<std::size_t> points, std::vector<MonoidHom> stalk_maps)
    : src_(std::move(source)), tgt_(std::move(target)), pts_(std::move(points)), maps_(std::move(stalk_maps)) {
  const std::size_t n = src_.size();
  if (pts_.size() != n || maps_.size() != n) fail("map data sizes disagree");
  for (std::size_t x = 0; x < n; ++x) {
    if (pts_[x] >= tgt_.size()) fail("point " + src_.name(x) + " maps outside the target");
    const MonoidHom& h = maps_[x];
    if (!(h.source().ambient() == tgt_.stalk(pts_[x]).ambient()) || !same_monoid(h.source(), tgt_.stalk(pts_[x])))
      fail("stalk map at " + src_.name(x) + " does not start at the target stalk");
    if (!(h.target().ambient() == src_.stalk(x).ambient()) || !same_monoid(h.target(), src_.stalk(x)))
      fail("stalk map at " + src_.name(x) + " does not land in the source stalk");
    if (!is_local(h)) fail("stalk map at " + src_.name(x) + " is not local");
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y || !src_.leq(x, y)) continue;
      if (!tgt_.leq(pts_[x], pts_[y])) fail("point map is not monotone at " + src_.name(x) + " < " + src_.name(y));
      MonoidHom a = src_.gen_map(x, y).after(maps_[x]);
      MonoidHom b = maps_[y].after(tgt_.gen_map(pts_[x], pts_[y]));
      if (!agree_on_gens(a, b)) fail("stalk maps do not commute with generization at " + src_.name(x));
    }
}

std::vector<std::size_t> FanMap::fiber(std::size_t y) const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < pts_.size(); ++x)
    if (pts_[x] == y) out.push_back(x);
  return out;
}

Fan spec_fan(const FineMonoid& p) {
  std::vector<Face> fs = faces(p);
  const std::size_t n = fs.size();
  std::vector<std::string> names;
  std::vector<FineMonoid> stalks;
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("f" + std::to_string(i));
    stalks.push_back(localize(p, fs[i]).monoid);
  }
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      le[i][j] = face_leq(fs[i], fs[j]);
      if (i != j && le[i][j]) gens.emplace(std::make_pair(i, j), MonoidHom(stalks[i], stalks[j], GroupHom::identity(p.ambient())));
    }
  return Fan(names, stalks, le, gens);
}

FanMap spec_of(const MonoidHom& h) {
  Fan x = spec_fan(h.target());
  Fan y = spec_fan(h.source());
  std::vector<std::size_t> pts = spec_map(h);
  std::vector<MonoidHom> maps;
  for (std::size_t i = 0; i < x.size(); ++i) maps.emplace_back(y.stalk(pts[i]), x.stalk(i), h.map());
  return FanMap(x, y, pts, maps);
}

Fan point_fan() { return spec_fan(trivial_monoid()); }

FanMap to_point(const Fan& x) {
  Fan pt = point_fan();
  std::vector<MonoidHom> maps;
  for (std::size_t i = 0; i < x.size(); ++i)
    maps.emplace_back(pt.stalk(0), x.stalk(i), GroupHom::zero(AbGroup::free(0), x.stalk(i).ambient()));
  return FanMap(x, pt, std::vector<std::size_t>(x.size(), 0), maps);
}

FanMap identity_map(const Fan& x) {
  std::vector<std::size_t> pts(x.size());
  std::iota(pts.begin(), pts.end(), 0);
  std::vector<MonoidHom> maps;
  for (std::size_t i = 0; i < x.size(); ++i) maps.push_back(MonoidHom::identity(x.stalk(i)));
  return FanMap(x, x, pts, maps);
}

Fan open_subfan(const Fan& x, const std::vector<std::size_t>& points) {
  std::vector<std::size_t> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<std::size_t> pos(x.size(), x.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] >= x.size()) fail("no such point");
    pos[pts[i]] = i;
  }
  for (auto p : pts)
    for (auto q : x.up_set(p))
      if (pos[q] == x.size()) fail("subset is not open: " + x.name(q) + " generizes " + x.name(p));
  const std::size_t n = pts.size();
  std::vector<std::string> names;
  std::vector<FineMonoid> stalks;
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(x.name(pts[i]));
    stalks.push_back(x.stalk(pts[i]));
    for (std::size_t j = 0; j < n; ++j) {
      le[i][j] = x.leq(pts[i], pts[j]);
      if (i != j && le[i][j]) gens.emplace(std::make_pair(i, j), x.gen_map(pts[i], pts[j]));
    }
  }
  return Fan(names, stalks, le, gens);
}

Fan glue(const std::vector<Fan>& pieces, const std::vector<Identification>& ids) {
  std::vector<std::size_t> offset{0};
  for (const auto& p : pieces) offset.push_back(offset.back() + p.size());
  const std::size_t total = offset.back();
  auto global = [&](std::size_t piece, std::size_t point) {
    if (piece >= pieces.size() || point >= pieces[piece].size()) fail("identification names a missing point");
    return offset[piece] + point;
  };
  std::vector<std::size_t> piece_of(total), point_of(total);
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t p = 0; p < pieces[i].size(); ++p) {
      piece_of[offset[i] + p] = i;
      point_of[offset[i] + p] = p;
    }
  auto stalk = [&](std::size_t g) -> const FineMonoid& { return pieces[piece_of[g]].stalk(point_of[g]); };

  // edges in both directions with their isomorphisms
  std::vector<std::vector<std::pair<std::size_t, GroupHom>>> adj(total);
  for (const auto& id : ids) {
    std::size_t a = global(id.piece_a, id.point_a), b = global(id.piece_b, id.point_b);
    const FineMonoid& ma = stalk(a);
    const FineMonoid& mb = stalk(b);
    if (!(id.iso.source() == ma.ambient()) || !(id.iso.target() == mb.ambient()))
      fail("identification map has the wrong groups");
    GroupHom inv = inverse(id.iso);
    std::vector<Vec> img;
    for (const auto& g : ma.gens()) img.push_back(id.iso.apply(g));
    if (!same_monoid(FineMonoid(mb.ambient(), img), mb)) fail("identification does not match the stalks");
    adj[a].emplace_back(b, id.iso);
    adj[b].emplace_back(a, inv);
  }
  // to_rep[g]: ambient of g -> ambient of its representative
  std::vector<std::size_t> rep(total, total);
  std::vector<GroupHom> to_rep(total);
  for (std::size_t s = 0; s < total; ++s) {
    if (rep[s] != total) continue;
    rep[s] = s;
    to_rep[s] = GroupHom::identity(stalk(s).ambient());
    std::vector<GroupHom> from_rep(total);  // rep ambient -> g ambient
    from_rep[s] = to_rep[s];
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (const auto& [v, iso] : adj[u]) {
        GroupHom f = iso.after(from_rep[u]);
        if (rep[v] == total) {
          rep[v] = s;
          from_rep[v] = f;
          to_rep[v] = inverse(f);
          q.push(v);
        } else if (!same_map(f, from_rep[v])) {
          fail("identifications disagree around a cycle");
        }
      }
    }
  }
  std::vector<std::size_t> reps;
  std::vector<std::size_t> index(total);
  for (std::size_t g = 0; g < total; ++g)
    if (rep[g] == g) {
      index[g] = reps.size();
      reps.push_back(g);
    }
  for (std::size_t g = 0; g < total; ++g) index[g] = index[rep[g]];
  const std::size_t n = reps.size();
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  std::vector<std::string> names;
  std::vector<FineMonoid> stalks;
  for (auto r : reps) {
    names.push_back(std::to_string(piece_of[r]) + "." + pieces[piece_of[r]].name(point_of[r]));
    stalks.push_back(stalk(r));
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Fan& f = pieces[i];
    for (std::size_t x = 0; x < f.size(); ++x)
      for (std::size_t y = 0; y < f.size(); ++y) {
        if (x == y || !f.leq(x, y)) continue;
        std::size_t gx = offset[i] + x, gy = offset[i] + y;
        std::size_t a = index[gx], b = index[gy];
        if (a == b) fail("gluing collapses two related points");
        le[a][b] = true;
        GroupHom m = to_rep[gy].after(f.gen_map(x, y).map()).after(inverse(to_rep[gx]));
        MonoidHom h(stalks[a], stalks[b], m);
        auto it = gens.find({a, b});
        if (it == gens.end())
          gens.emplace(std::make_pair(a, b), h);
        else if (!agree_on_gens(it->second, h))
          fail("pieces disagree on the generization map " + names[a] + " -> " + names[b]);
      }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (le[i][k] && le[k][j] && !le[i][j]) fail("identifications leave the glued neighbourhoods incomplete");
  return Fan(names, stalks, le, gens);
}

FiberProduct fiber_product_fine(const FanMap& f, const FanMap& g) {
  if (!posets_isomorphic(f.target(), g.target()) || f.target().size() != g.target().size())
    fail("maps of a fiber product need a common target");
  for (std::size_t y = 0; y < f.target().size(); ++y)
    if (!same_monoid(f.target().stalk(y), g.target().stalk(y)) || f.target().name(y) != g.target().name(y))
      fail("maps of a fiber product need a common target");
  const Fan& x = f.source();
  const Fan& z = g.source();
  FiberProduct out;
  std::vector<PushoutResult> po;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = 0; b < z.size(); ++b) {
      if (f(a) != g(b)) continue;
      PushoutResult p = pushout_int(f.stalk_map(a), g.stalk_map(b));
      if (!is_local(p.left) || !is_local(p.right)) {
        ++out.dropped;
        continue;
      }
      out.pairs.emplace_back(a, b);
      out.certified.push_back(p.certified);
      po.push_back(p);
    }
  const std::size_t n = out.pairs.size();
  if (n == 0) fail("fiber product is empty");
  std::vector<std::string> names;
  std::vector<FineMonoid> stalks;
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("(" + x.name(out.pairs[i].first) + "," + z.name(out.pairs[i].second) + ")");
    stalks.push_back(po[i].monoid);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto [a, b] = out.pairs[i];
      auto [c, d] = out.pairs[j];
      le[i][j] = x.leq(a, c) && z.leq(b, d);
      if (i == j || !le[i][j]) continue;
      const PushoutResult& p = po[i];
      const PushoutResult& q = po[j];
      const AbGroup& pa = p.monoid.ambient();
      Matrix w = p.left.map().matrix().hconcat(p.right.map().matrix()).hconcat(pa.relations());
      IntSolver solver(w);
      GroupHom gx = x.gen_map(a, c).map(), gz = z.gen_map(b, d).map();
      const std::size_t nx = gx.source().ngens(), nz = gz.source().ngens();
      std::vector<Vec> cols;
      for (std::size_t k = 0; k < pa.ngens(); ++k) {
        auto s = solver.solve(unit_vector(pa.ngens(), k));
        if (!s) throw std::logic_error("fanlib: pushout group is not generated by its legs");
        Vec u(s->begin(), s->begin() + nx), v(s->begin() + nx, s->begin() + nx + nz);
        cols.push_back(q.monoid.ambient().reduce(vadd(q.left.apply(gx.apply(u)), q.right.apply(gz.apply(v)))));
      }
      gens.emplace(std::make_pair(i, j),
                   MonoidHom(stalks[i], stalks[j], GroupHom(pa, q.monoid.ambient(), Matrix::from_columns(cols, q.monoid.ambient().ngens()))));
    }
  out.fan = Fan(names, stalks, le, gens);
  std::vector<std::size_t> lp, rp;
  std::vector<MonoidHom> lm, rm;
  for (std::size_t i = 0; i < n; ++i) {
    lp.push_back(out.pairs[i].first);
    rp.push_back(out.pairs[i].second);
    lm.push_back(po[i].left);
    rm.push_back(po[i].right);
  }
  out.to_left = FanMap(out.fan, x, lp, lm);
  out.to_right = FanMap(out.fan, z, rp, rm);
  return out;
}

namespace {

FineMonoid closure_stalk(const Fan& x, std::size_t p, std::size_t top) {
  const FineMonoid& m = x.stalk(p);
  std::vector<Face> fs = faces(m);
  std::size_t i = face_with_gens(fs, units_at(m, x.gen_map(p, top), x.stalk(top)));
  if (i == fs.size()) throw std::logic_error("fanlib: generization does not cut out a face");
  return face_monoid(m, fs[i]);
}

}  // namespace

Boundary boundary(const Fan& x, std::size_t point) {
  Boundary out;
  out.points = x.down_set(point);
  const std::size_t n = out.points.size();
  std::vector<std::string> names;
  std::vector<FineMonoid> stalks;
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  for (auto p : out.points) {
    names.push_back(x.name(p));
    stalks.push_back(closure_stalk(x, p, point));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      le[i][j] = x.leq(out.points[i], out.points[j]);
      if (i != j && le[i][j])
        gens.emplace(std::make_pair(i, j), MonoidHom(stalks[i], stalks[j], x.gen_map(out.points[i], out.points[j]).map()));
    }
  out.fan = Fan(names, stalks, le, gens);
  return out;
}

FanMap boundary_map(const FanMap& f, std::size_t point) {
  Boundary bx = boundary(f.source(), point);
  Boundary by = boundary(f.target(), f(point));
  std::vector<std::size_t> pts;
  std::vector<MonoidHom> maps;
  for (std::size_t i = 0; i < bx.points.size(); ++i) {
    std::size_t y = f(bx.points[i]);
    auto it = std::find(by.points.begin(), by.points.end(), y);
    if (it == by.points.end()) throw std::logic_error("fanlib: point map leaves the closure");
    std::size_t j = static_cast<std::size_t>(it - by.points.begin());
    pts.push_back(j);
    maps.emplace_back(by.fan.stalk(j), bx.fan.stalk(i), f.stalk_map(bx.points[i]).map());
  }
  return FanMap(bx.fan, by.fan, pts, maps);
}

// ---- properties of maps ----

bool is_affine_map(const FanMap& f) {
  const Fan& x = f.source();
  const Fan& y = f.target();
  for (std::size_t b = 0; b < y.size(); ++b) {
    std::vector<std::size_t> pre;
    for (std::size_t a = 0; a < x.size(); ++a)
      if (y.leq(b, f(a))) pre.push_back(a);
    if (pre.empty()) return false;
    bool found = false;
    for (auto a : pre)
      if (x.up_set(a) == pre) found = true;
    if (!found) return false;
  }
  return true;
}

namespace {

// Plain ambient coordinates when the group is all of a free ambient, canonical ones otherwise.
Vec torus_coords(const FineMonoid& t, const Vec& v) {
  const AbGroup& amb = t.ambient();
  if (amb.torsion().empty() && t.gp().group() == amb) {
    bool whole = true;
    for (std::size_t i = 0; i < amb.rank() && whole; ++i) whole = t.gp().contains(unit_vector(amb.rank(), i));
    if (whole) return v;
  }
  auto c = t.gp().coords(v);
  if (!c) throw std::logic_error("fanlib: element outside the torus group");
  const std::size_t r = t.gp().group().rank();
  return Vec(c->begin(), c->begin() + r);
}

std::size_t torus_rank(const Fan& x, std::size_t t) { return x.stalk(t).gp().group().rank(); }

void add_unique(std::vector<Vec>& v, const Vec& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

Cell lift_cell(const Fan& x, std::size_t point, std::size_t torus_point) {
  Cell c;
  const FineMonoid& m = x.stalk(point);
  MonoidHom g = x.gen_map(point, torus_point);
  for (std::size_t i = 0; i < m.ngens(); ++i) {
    Vec row = torus_coords(x.stalk(torus_point), g.apply(m.gens()[i]));
    if (is_zero(row)) continue;
    add_unique(m.is_unit_gen(i) ? c.equal : c.strict, row);
  }
  return c;
}

Cell base_cell(const FanMap& f, std::size_t base_point, std::size_t torus_point) {
  Cell c;
  const Fan& y = f.target();
  const FineMonoid& m = y.stalk(base_point);
  MonoidHom g = f.stalk_map(torus_point).after(y.gen_map(base_point, f(torus_point)));
  for (std::size_t i = 0; i < m.ngens(); ++i) {
    Vec row = torus_coords(f.source().stalk(torus_point), g.apply(m.gens()[i]));
    if (is_zero(row)) {
      if (!m.is_unit_gen(i)) c.strict.push_back(row);  // no local functional at all
      continue;
    }
    add_unique(m.is_unit_gen(i) ? c.equal : c.strict, row);
  }
  return c;
}

std::optional<ValuativeWitness> separatedness_failure(const FanMap& f) {
  const Fan& x = f.source();
  for (auto t : torus(x)) {
    const std::size_t r = torus_rank(x, t);
    std::vector<std::size_t> below = x.down_set(t);
    for (std::size_t i = 0; i < below.size(); ++i)
      for (std::size_t j = i + 1; j < below.size(); ++j) {
        std::size_t a = below[i], b = below[j];
        if (f(a) != f(b)) continue;
        Cell ca = lift_cell(x, a, t), cb = lift_cell(x, b, t);
        std::vector<Vec> strict = ca.strict, eq = ca.equal;
        strict.insert(strict.end(), cb.strict.begin(), cb.strict.end());
        eq.insert(eq.end(), cb.equal.begin(), cb.equal.end());
        if (auto p = open_cell_point(r, strict, {}, eq)) return ValuativeWitness{t, f(a), *p, {a, b}};
      }
  }
  return std::nullopt;
}

std::optional<ValuativeWitness> properness_failure(const FanMap& f) {
  if (auto w = separatedness_failure(f)) return w;
  const Fan& x = f.source();
  const Fan& y = f.target();
  for (auto t : torus(x)) {
    const std::size_t r = torus_rank(x, t);
    for (auto b : y.down_set(f(t))) {
      Cell base = base_cell(f, b, t);
      std::vector<std::size_t> cands;
      std::vector<Cell> cells;
      std::vector<Vec> funcs;
      for (auto a : x.down_set(t))
        if (f(a) == b) {
          cands.push_back(a);
          cells.push_back(lift_cell(x, a, t));
          for (const auto& v : cells.back().strict) add_unique(funcs, v);
          for (const auto& v : cells.back().equal) add_unique(funcs, v);
        }
      // sign of each functional along the current branch
      std::vector<int> sign(funcs.size(), 0);
      std::optional<Vec> hole;
      std::function<void(std::size_t, std::vector<Vec>&, std::vector<Vec>&)> walk =
          [&](std::size_t k, std::vector<Vec>& strict, std::vector<Vec>& eq) {
            if (hole) return;
            auto p = open_cell_point(r, strict, {}, eq);
            if (!p) return;
            if (k == funcs.size()) {
              for (const auto& c : cells) {
                bool ok = true;
                for (const auto& v : c.strict)
                  if (sign[static_cast<std::size_t>(std::find(funcs.begin(), funcs.end(), v) - funcs.begin())] != 1) ok = false;
                for (const auto& v : c.equal)
                  if (sign[static_cast<std::size_t>(std::find(funcs.begin(), funcs.end(), v) - funcs.begin())] != 0) ok = false;
                if (ok) return;
              }
              hole = *p;
              return;
            }
            const Vec& l = funcs[k];
            sign[k] = 1;
            strict.push_back(l);
            walk(k + 1, strict, eq);
            strict.pop_back();
            sign[k] = 0;
            eq.push_back(l);
            walk(k + 1, strict, eq);
            eq.pop_back();
            sign[k] = -1;
            strict.push_back(vneg(l));
            walk(k + 1, strict, eq);
            strict.pop_back();
          };
      std::vector<Vec> strict = base.strict, eq = base.equal;
      walk(0, strict, eq);
      if (hole) return ValuativeWitness{t, b, *hole, {}};
    }
  }
  return std::nullopt;
}

MapReport classify_map(const FanMap& f) {
  MapReport r;
  const Fan& x = f.source();
  const Fan& y = f.target();
  r.affine = is_affine_map(f);
  r.quasi_finite = true;
  r.exact = true;
  r.cze = true;
  bool all_flat = true, any_not_flat = false;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const MonoidHom& h = f.stalk_map(a);
    SmithReport u = smith_decompose(units_map(h));
    if (u.rank != h.target().units().group().rank()) r.quasi_finite = false;
    if (!is_cartesian(h)) r.exact = false;
    if (!cze_basis(h)) r.cze = false;
    FlatCertificate c = flat_certificate(h);
    if (c.kind != FlatCertificate::Flat) all_flat = false;
    if (c.kind == FlatCertificate::NotFlat) any_not_flat = true;
  }
  r.flat = any_not_flat ? FlatCertificate::NotFlat : all_flat ? FlatCertificate::Flat : FlatCertificate::Unknown;

  std::optional<Int> dim;
  bool equi = true;
  for (std::size_t b = 0; b < y.size(); ++b) {
    FiberDimension fd = fiber_dimension(f, b);
    for (const auto& [a, d] : fd.dims) {
      if (!dim) dim = d;
      if (*dim != d) equi = false;
      if (!smith_decompose(units_map(f.stalk_map(a))).is_injective) r.equidim_sufficient_only = true;
    }
  }
  if (equi && dim) r.equidimensional = dim;

  r.separated_witness = separatedness_failure(f);
  r.separated = !r.separated_witness;
  r.proper_witness = properness_failure(f);
  r.proper = !r.proper_witness;
  return r;
}

std::vector<Stratum> stratification_report(const Fan& x) {
  std::vector<Stratum> out;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const AbGroup& u = x.stalk(a).units().group();
    out.push_back({a, u.rank(), u.torsion()});
  }
  return out;
}

FiberDimension fiber_dimension(const FanMap& f, std::size_t y) {
  FiberDimension out;
  std::vector<std::size_t> fib = f.fiber(y);
  for (auto a : fib) {
    bool maximal = true;
    for (auto b : fib)
      if (b != a && f.source().leq(a, b)) maximal = false;
    if (!maximal) continue;
    SmithReport s = smith_decompose(units_map(f.stalk_map(a)));
    out.dims.emplace_back(a, static_cast<Int>(s.cokernel.group.rank()));
  }
  for (const auto& d : out.dims)
    if (d.second != out.dims.front().second) out.pure = false;
  return out;
}

std::vector<std::size_t> torus(const Fan& x) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < x.size(); ++a)
    if (x.stalk(a).is_group()) out.push_back(a);
  return out;
}

// ---- cohomology ----

namespace {

using Chain = std::vector<std::size_t>;

std::vector<std::vector<Chain>> chains_of(const Fan& x) {
  std::vector<std::vector<Chain>> out;
  std::vector<Chain> cur;
  for (std::size_t a = 0; a < x.size(); ++a) cur.push_back({a});
  while (!cur.empty()) {
    out.push_back(cur);
    std::vector<Chain> next;
    for (const auto& c : cur)
      for (std::size_t b = 0; b < x.size(); ++b)
        if (b != c.back() && x.leq(c.back(), b)) {
          Chain d = c;
          d.push_back(b);
          next.push_back(d);
        }
    cur = std::move(next);
  }
  return out;
}

struct Cochains {
  std::vector<Chain> chains;
  std::vector<std::size_t> offset;  // start of each chain's block
  std::size_t dim = 0;
  Matrix relations;
};

Cochains cochains(const Fan& x, const std::vector<Chain>& chains, std::size_t r) {
  Cochains c;
  c.chains = chains;
  std::vector<Int> orders;
  for (const auto& ch : chains) {
    c.offset.push_back(orders.size());
    const AbGroup& u = x.stalk(ch.back()).units().group();
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < u.ngens(); ++i) orders.push_back(u.gen_order(i));
  }
  c.dim = orders.size();
  std::vector<Vec> rel;
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (orders[i] != 0) rel.push_back(vscale(orders[i], unit_vector(c.dim, i)));
  c.relations = Matrix::from_columns(rel, c.dim);
  return c;
}

Matrix coboundary(const Fan& x, const Cochains& from, const Cochains& to, std::size_t r) {
  Matrix d(to.dim, from.dim);
  auto index = [&](const Chain& c) {
    auto it = std::find(from.chains.begin(), from.chains.end(), c);
    return static_cast<std::size_t>(it - from.chains.begin());
  };
  for (std::size_t t = 0; t < to.chains.size(); ++t) {
    const Chain& ch = to.chains[t];
    const std::size_t len = ch.size();  // n + 2 points
    const std::size_t top = ch.back();
    const std::size_t gt = x.stalk(top).units().group().ngens();
    for (std::size_t i = 0; i + 1 < len; ++i) {
      Chain f = ch;
      f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
      std::size_t s = index(f);
      Int sgn = (i % 2 == 0) ? 1 : -1;
      for (std::size_t k = 0; k < r * gt; ++k) d(to.offset[t] + k, from.offset[s] + k) += sgn;
    }
    Chain f(ch.begin(), ch.end() - 1);
    std::size_t s = index(f);
    Int sgn = ((len - 1) % 2 == 0) ? 1 : -1;
    Matrix rho = units_map(x.gen_map(f.back(), top)).matrix();
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < rho.rows(); ++i)
        for (std::size_t j = 0; j < rho.cols(); ++j)
          d(to.offset[t] + k * rho.rows() + i, from.offset[s] + k * rho.cols() + j) += sgn * rho(i, j);
  }
  return d;
}

}  // namespace

AbGroup poset_cohomology(const Fan& x, std::size_t r, std::size_t degree) {
  std::vector<std::vector<Chain>> all = chains_of(x);
  auto level = [&](std::size_t n) { return n < all.size() ? all[n] : std::vector<Chain>{}; };
  if (degree >= all.size() || r == 0) return AbGroup();
  Cochains c = cochains(x, level(degree), r);
  Cochains cn = cochains(x, level(degree + 1), r);
  if (c.dim == 0) return AbGroup();
  // cocycles: kernel of C^n -> C^{n+1} modulo its relations
  std::vector<Vec> cyc;
  if (cn.dim == 0) {
    for (std::size_t i = 0; i < c.dim; ++i) cyc.push_back(unit_vector(c.dim, i));
  } else {
    Matrix d = coboundary(x, c, cn, r);
    Matrix k = IntSolver(d.hconcat(cn.relations)).kernel_basis();
    for (std::size_t j = 0; j < k.cols(); ++j) {
      Vec v(c.dim);
      for (std::size_t i = 0; i < c.dim; ++i) v[i] = k(i, j);
      if (!is_zero(v)) cyc.push_back(v);
    }
  }
  if (cyc.empty()) return AbGroup();
  Matrix basis = IntSolver(Matrix::from_columns(cyc, c.dim)).lattice_basis();
  if (basis.cols() == 0) return AbGroup();
  IntSolver coords(basis);
  std::vector<Vec> rel;
  auto add_rel = [&](const Vec& v) {
    auto s = coords.solve(v);
    if (!s) throw std::logic_error("fanlib: coboundary outside the cocycles");
    rel.push_back(*s);
  };
  for (std::size_t j = 0; j < c.relations.cols(); ++j) add_rel(c.relations.column(j));
  if (degree > 0) {
    Cochains cp = cochains(x, level(degree - 1), r);
    if (cp.dim > 0) {
      Matrix d = coboundary(x, cp, c, r);
      for (std::size_t j = 0; j < d.cols(); ++j) add_rel(d.column(j));
    }
  }
  return present(Matrix::from_columns(rel, basis.cols())).group;
}

AbGroup cohomology_G(const Fan& x, const AbGroup& a, std::size_t degree) {
  if (auto c = x.affine_center()) {
    const AbGroup& u = x.stalk(*c).units().group();
    if (degree == 0) return hom_group(a, u);
    if (degree == 1) return ext_group(a, u);
    return AbGroup();
  }
  if (a.torsion().empty()) return poset_cohomology(x, a.rank(), degree);
  if (degree == 0) return hom_group(a, poset_cohomology(x, 1, 0));
  fail("cohomology with torsion coefficients in positive degree needs an affine fan");
}

// ---- transforms ----

FanTransform fan_transform(const Fan& x, Transform which) {
  if (which != Transform::sat && which != Transform::tf && which != Transform::trc)
    fail("fan transforms are sat, tf and trc");
  std::vector<Transformed> t;
  for (std::size_t a = 0; a < x.size(); ++a) t.push_back(transform(x.stalk(a), which));
  const std::size_t n = x.size();
  std::vector<FineMonoid> stalks;
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  for (const auto& s : t) stalks.push_back(s.monoid);
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      le[a][b] = x.leq(a, b);
      if (a == b || !le[a][b]) continue;
      const AbGroup& src = stalks[a].ambient();
      std::vector<Vec> cols;
      for (std::size_t k = 0; k < src.ngens(); ++k) {
        auto u = preimage(t[a].map, unit_vector(src.ngens(), k));
        if (!u) throw std::logic_error("fanlib: transform map is not surjective");
        cols.push_back(t[b].map.apply(x.gen_map(a, b).apply(*u)));
      }
      gens.emplace(std::make_pair(a, b),
                   MonoidHom(stalks[a], stalks[b], GroupHom(src, stalks[b].ambient(), Matrix::from_columns(cols, stalks[b].ambient().ngens()))));
    }
  FanTransform out;
  out.fan = Fan(x.names(), stalks, le, gens);
  std::vector<std::size_t> pts(n);
  std::iota(pts.begin(), pts.end(), 0);
  std::vector<MonoidHom> maps;
  for (std::size_t a = 0; a < n; ++a) maps.emplace_back(x.stalk(a), stalks[a], t[a].map);
  out.comparison = FanMap(out.fan, x, pts, maps);
  return out;
}

bool sharp_invariance(const Fan& x) {
  for (std::size_t a = 0; a < x.size(); ++a) {
    Transformed s = transform(x.stalk(a), Transform::sharp);
    if (!spec_is_isomorphism(MonoidHom(x.stalk(a), s.monoid, s.map))) return false;
  }
  return true;
}

// ---- classical fans ----

FineMonoid dual_lattice_monoid(const RationalCone& sigma) {
  const std::size_t n = sigma.ambient_rank();
  // Saturated lattice of span(sigma); pairing with it maps Z^n onto Z^d.
  Matrix span = Matrix::identity(n);
  if (!sigma.equations().empty()) span = IntSolver(Matrix::from_rows(sigma.equations(), n)).kernel_basis();
  const std::size_t d = span.cols();
  std::vector<Vec> gens;
  // sigma^perp, the units
  if (d > 0) {
    Matrix perp = IntSolver(span.transpose()).kernel_basis();
    for (std::size_t j = 0; j < perp.cols(); ++j) {
      Vec w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = perp(i, j);
      gens.push_back(w);
      gens.push_back(vneg(w));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      gens.push_back(unit_vector(n, i));
      gens.push_back(vneg(unit_vector(n, i)));
    }
  }
  if (d > 0 && !sigma.rays().empty()) {
    IntSolver in_span(span);
    std::vector<Vec> ineq;
    for (const auto& r : sigma.rays()) ineq.push_back(*in_span.solve(r));
    std::vector<Vec> all;
    for (std::size_t i = 0; i < d; ++i) all.push_back(unit_vector(d, i));
    IntSolver pairing(span.transpose());
    for (const auto& h : hilbert_basis(d, all, ineq)) gens.push_back(*pairing.solve(h));
  }
  return minimize_generators(FineMonoid(AbGroup::free(n), gens));
}

namespace {

bool relints_meet(const RationalCone& a, const RationalCone& b) {
  std::vector<Vec> strict = a.facets(), eq = a.equations();
  strict.insert(strict.end(), b.facets().begin(), b.facets().end());
  eq.insert(eq.end(), b.equations().begin(), b.equations().end());
  return open_cell_point(a.ambient_rank(), strict, {}, eq).has_value();
}

}  // namespace

void validate_classical(const ClassicalFanData& d) {
  if (d.cones.empty()) fail("a classical fan needs at least one cone");
  for (std::size_t i = 0; i < d.cones.size(); ++i) {
    const RationalCone& c = d.cones[i];
    if (c.ambient_rank() != d.rank) fail("cone " + std::to_string(i) + " lives in the wrong lattice");
    if (!c.is_sharp()) fail("cone " + std::to_string(i) + " contains a line");
    for (const auto& f : face_lattice(c).faces) {
      RationalCone fc = face_cone(c, f);
      if (std::none_of(d.cones.begin(), d.cones.end(), [&](const RationalCone& o) { return o == fc; }))
        fail("a face of cone " + std::to_string(i) + " is missing");
    }
  }
  for (std::size_t i = 0; i < d.cones.size(); ++i)
    for (std::size_t j = i + 1; j < d.cones.size(); ++j)
      if (relints_meet(d.cones[i], d.cones[j]))
        fail("cones " + std::to_string(i) + " and " + std::to_string(j) + " overlap in their interiors");
}

Fan from_classical(const ClassicalFanData& d) {
  validate_classical(d);
  const std::size_t n = d.cones.size();
  std::vector<std::string> names;
  std::vector<FineMonoid> stalks;
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  std::map<std::pair<std::size_t, std::size_t>, MonoidHom> gens;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("c" + std::to_string(i));
    stalks.push_back(dual_lattice_monoid(d.cones[i]));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      le[i][j] = d.cones[i].contains(d.cones[j]);
      if (i != j && le[i][j])
        gens.emplace(std::make_pair(i, j), MonoidHom(stalks[i], stalks[j], GroupHom::identity(AbGroup::free(d.rank))));
    }
  return Fan(names, stalks, le, gens);
}

ClassicalResult to_classical(const Fan& x) {
  ClassicalResult out;
  for (std::size_t a = 0; a < x.size(); ++a)
    if (!x.stalk(a).is_toric()) {
      out.reason = "stalk at " + x.name(a) + " is not toric";
      return out;
    }
  std::vector<std::size_t> top = x.maximal_points();
  if (top.size() != 1) {
    out.reason = "fan has " + std::to_string(top.size()) + " generic points";
    return out;
  }
  const std::size_t g = top.front();
  const FineMonoid& mg = x.stalk(g);
  if (!mg.is_group()) {
    out.reason = "generic stalk is not a group";
    return out;
  }
  const std::size_t n = mg.gp().group().rank();
  ClassicalFanData d;
  d.rank = n;
  for (std::size_t a = 0; a < x.size(); ++a) {
    MonoidHom h = x.gen_map(a, g);
    std::vector<Vec> imgs;
    for (const auto& v : x.stalk(a).gens()) imgs.push_back(torus_coords(mg, h.apply(v)));
    d.cones.push_back(dual_cone(RationalCone::from_generators(n, imgs)));
  }
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b)
      if (relints_meet(d.cones[a], d.cones[b])) {
        out.reason = "points " + x.name(a) + " and " + x.name(b) + " give overlapping cones";
        return out;
      }
  out.data = d;
  return out;
}

bool same_classical(const ClassicalFanData& a, const ClassicalFanData& b) {
  if (a.rank != b.rank || a.cones.size() != b.cones.size()) return false;
  std::vector<bool> used(b.cones.size(), false);
  for (const auto& c : a.cones) {
    bool found = false;
    for (std::size_t j = 0; j < b.cones.size() && !found; ++j)
      if (!used[j] && b.cones[j] == c) used[j] = found = true;
    if (!found) return false;
  }
  return true;
}

bool posets_isomorphic(const Fan& a, const Fan& b) {
  const std::size_t n = a.size();
  if (b.size() != n) return false;
  auto sig = [](const Fan& f, std::size_t x) { return std::make_pair(f.up_set(x).size(), f.down_set(x).size()); };
  std::vector<std::size_t> perm(n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || sig(a, i) != sig(b, j)) continue;
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k)
        ok = a.leq(k, i) == b.leq(perm[k], j) && a.leq(i, k) == b.leq(j, perm[k]);
      if (!ok) continue;
      used[j] = true;
      perm[i] = j;
      if (go(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return go(0);
}

}  // namespace fanlib
