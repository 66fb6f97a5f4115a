#pragma once

// Brute-force reference computations. Nothing here calls the cone or monoid algorithms;
// the only library pieces used are the value types and group coordinates.

#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "fanlib/fan.hpp"

namespace fanlib::oracle {

using Big = __int128;

struct Rat {
  Big num = 0, den = 1;
  Rat() = default;
  Rat(Big n, Big d = 1) : num(n), den(d) { norm(); }
  void norm() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    Big a = num < 0 ? -num : num, b = den;
    while (b) {
      Big t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
  }
  bool zero() const { return num == 0; }
  friend Rat operator-(Rat a, Rat b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Rat operator*(Rat a, Rat b) { return Rat(a.num * b.num, a.den * b.den); }
  friend Rat operator/(Rat a, Rat b) { return Rat(a.num * b.den, a.den * b.num); }
};

// Solves sum_j c_j cols[j] = x; nullopt if inconsistent. Columns must be independent.
inline std::optional<std::vector<Rat>> solve_columns(const std::vector<Vec>& cols, const Vec& x) {
  std::size_t n = x.size(), k = cols.size();
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = Rat(cols[j][i]);
    a[i][k] = Rat(x[i]);
  }
  std::size_t row = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < k && row < n; ++c) {
    std::size_t p = row;
    while (p < n && a[p][c].zero()) ++p;
    if (p == n) continue;
    std::swap(a[p], a[row]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || a[i][c].zero()) continue;
      Rat f = a[i][c] / a[row][c];
      for (std::size_t j = c; j <= k; ++j) a[i][j] = a[i][j] - f * a[row][j];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (std::size_t i = row; i < n; ++i)
    if (!a[i][k].zero()) return std::nullopt;
  std::vector<Rat> sol(k, Rat(0));
  for (std::size_t i = 0; i < row; ++i) sol[pivot_col[i]] = a[i][k] / a[i][pivot_col[i]];
  return sol;
}

inline std::size_t rank_of(const std::vector<Vec>& vs, std::size_t n) {
  std::vector<std::vector<Rat>> a;
  for (const auto& v : vs) {
    std::vector<Rat> r;
    for (auto x : v) r.emplace_back(x);
    a.push_back(r);
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < a.size(); ++c) {
    std::size_t p = rank;
    while (p < a.size() && a[p][c].zero()) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t i = rank + 1; i < a.size(); ++i) {
      if (a[i][c].zero()) continue;
      Rat f = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] = a[i][j] - f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

// Caratheodory: x lies in the cone iff it is a nonnegative combination of independent generators.
inline bool in_cone(const std::vector<Vec>& gens, const Vec& x) {
  if (is_zero(x)) return true;
  std::size_t n = x.size(), k = gens.size();
  std::vector<std::size_t> pick;
  bool found = false;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (found) return;
    if (!pick.empty()) {
      std::vector<Vec> cols;
      for (auto i : pick) cols.push_back(gens[i]);
      if (rank_of(cols, n) < cols.size()) return;
      if (auto s = solve_columns(cols, x)) {
        bool ok = true;
        for (const auto& q : *s) ok = ok && q.num >= 0;
        if (ok) {
          found = true;
          return;
        }
      }
    }
    if (pick.size() == n) return;
    for (std::size_t i = start; i < k; ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return found;
}

inline bool is_dual_of(const std::vector<Vec>& primal, const std::vector<Vec>& dual_gens) {
  for (const auto& p : primal)
    for (const auto& d : dual_gens)
      if (dot(p, d) < 0) return false;
  return true;
}

inline std::vector<Vec> free_parts(const FineMonoid& p) {
  std::vector<Vec> out;
  for (const auto& g : p.gens()) out.push_back(p.free_part(g));
  return out;
}

// Faces as generator index sets: the minimal face containing x consists of the generators g
// with -g in cone(gens, -x).
inline std::set<std::vector<std::size_t>> faces(const std::vector<Vec>& gens, std::size_t n) {
  std::set<std::vector<std::size_t>> out;
  std::size_t k = gens.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Vec x(n, 0);
    for (std::size_t i = 0; i < k; ++i)
      if ((mask >> i) & 1) x = vadd(x, gens[i]);
    std::vector<Vec> ext = gens;
    ext.push_back(vneg(x));
    std::vector<std::size_t> face;
    for (std::size_t i = 0; i < k; ++i)
      if (in_cone(ext, vneg(gens[i]))) face.push_back(i);
    out.insert(face);
  }
  return out;
}

inline std::size_t face_dim(const std::vector<Vec>& gens, const std::vector<std::size_t>& face, std::size_t n) {
  std::vector<Vec> vs;
  for (auto i : face) vs.push_back(gens[i]);
  return rank_of(vs, n);
}

// Longest and shortest maximal chain, counted in faces.
inline std::pair<std::size_t, std::size_t> chain_lengths(const std::vector<std::vector<std::size_t>>& fs) {
  auto sub = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return a != b && std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  std::size_t m = fs.size();
  std::vector<std::size_t> lo(m, 0), hi(m, 0);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a].size() > fs[b].size(); });
  // covers of i: j strictly above with nothing between
  for (auto i : order) {
    std::vector<std::size_t> up;
    for (std::size_t j = 0; j < m; ++j) {
      if (!sub(fs[i], fs[j])) continue;
      bool cover = true;
      for (std::size_t k = 0; k < m && cover; ++k)
        if (sub(fs[i], fs[k]) && sub(fs[k], fs[j])) cover = false;
      if (cover) up.push_back(j);
    }
    if (up.empty()) {
      lo[i] = hi[i] = 1;
      continue;
    }
    lo[i] = SIZE_MAX;
    for (auto j : up) {
      lo[i] = std::min(lo[i], lo[j] + 1);
      hi[i] = std::max(hi[i], hi[j] + 1);
    }
  }
  std::size_t bottom = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (fs[i].size() < fs[bottom].size()) bottom = i;
  return {lo[bottom], hi[bottom]};
}

// Evaluates a functional given on the free part of the canonical coordinates of a stalk's group.
inline std::optional<Int> evaluate(const FineMonoid& m, const Vec& phi, const Vec& x) {
  auto c = m.gp().coords(x);
  if (!c) return std::nullopt;
  Int s = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += phi[i] * (*c)[i];
  return s;
}

// Does phi (on the group of stalk t) make Spec N -> X land at x?
inline bool lands_at(const Fan& x, std::size_t pt, std::size_t t, const Vec& phi) {
  if (!x.leq(pt, t)) return false;
  MonoidHom g = x.gen_map(pt, t);
  const FineMonoid& m = x.stalk(pt);
  for (std::size_t i = 0; i < m.ngens(); ++i) {
    auto v = evaluate(x.stalk(t), phi, g.apply(m.gens()[i]));
    if (!v) return false;
    if (m.is_unit_gen(i) ? *v != 0 : *v <= 0) return false;
  }
  return true;
}

struct LiftSearch {
  bool separated = true, proper = true;
  std::size_t problems = 0;
};

// Enumerates every functional with entries in [-box, box] at every torus point.
inline LiftSearch lift_search(const FanMap& f, Int box) {
  LiftSearch out;
  const Fan& x = f.source();
  const Fan& y = f.target();
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!x.stalk(t).is_group()) continue;
    const AbGroup& g = x.stalk(t).gp().group();
    std::size_t r = g.rank();
    Vec phi(r, -box);
    std::size_t s = f(t);
    const MonoidHom& ft = f.stalk_map(t);
    for (bool more = true; more;) {
      // pushed-down functional at s, evaluated through f_t
      for (std::size_t b = 0; b < y.size(); ++b) {
        if (!y.leq(b, s)) continue;
        MonoidHom gy = y.gen_map(b, s);
        const FineMonoid& mb = y.stalk(b);
        bool base = true;
        for (std::size_t i = 0; i < mb.ngens() && base; ++i) {
          auto v = evaluate(x.stalk(t), phi, ft.apply(gy.apply(mb.gens()[i])));
          base = v && (mb.is_unit_gen(i) ? *v == 0 : *v > 0);
        }
        if (!base) continue;
        ++out.problems;
        std::size_t lifts = 0;
        for (std::size_t p = 0; p < x.size(); ++p)
          if (f(p) == b && lands_at(x, p, t, phi)) ++lifts;
        if (lifts > 1) out.separated = out.proper = false;
        if (lifts == 0) out.proper = false;
      }
      more = false;
      for (std::size_t i = 0; i < r; ++i) {
        if (phi[i] < box) {
          ++phi[i];
          more = true;
          break;
        }
        phi[i] = -box;
      }
    }
  }
  return out;
}

}  // namespace fanlib::oracle
