#include "fanlib/arith.hpp"

#include <algorithm>
#include <cstdlib>

namespace fanlib {

namespace {
[[noreturn]] void overflow() { throw std::overflow_error("fanlib: integer overflow"); }
}  // namespace

Int add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) overflow();
  return r;
}
Int sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) overflow();
  return r;
}
Int mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) overflow();
  return r;
}
Int neg(Int a) { return sub(0, a); }

Int gcd(Int a, Int b) {
  if (a < 0) a = neg(a);
  if (b < 0) b = neg(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int lcm(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  Int g = gcd(a, b);
  Int r = mul(a / g, b);
  return r < 0 ? neg(r) : r;
}

Int floor_div(Int a, Int b) {
  if (b == 0) throw std::domain_error("fanlib: division by zero");
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int mod(Int a, Int b) {
  if (b < 0) b = neg(b);
  Int r = a % b;
  return r < 0 ? r + b : r;
}

Int dot(const Vec& a, const Vec& b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = add(s, mul(a[i], b[i]));
  return s;
}

Vec vadd(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = add(a[i], b[i]);
  return r;
}
Vec vsub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = sub(a[i], b[i]);
  return r;
}
Vec vscale(Int k, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mul(k, a[i]);
  return r;
}
Vec vneg(const Vec& a) { return vscale(-1, a); }
bool is_zero(const Vec& a) {
  return std::all_of(a.begin(), a.end(), [](Int x) { return x == 0; });
}
Int content(const Vec& a) {
  Int g = 0;
  for (Int x : a) g = gcd(g, x);
  return g;
}
Vec primitive(const Vec& a) {
  Int g = content(a);
  if (g <= 1) return a;
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] / g;
  return r;
}
Vec unit_vector(std::size_t n, std::size_t i) {
  Vec r(n, 0);
  r[i] = 1;
  return r;
}

// ---- Matrix

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}
Matrix Matrix::from_rows(const std::vector<Vec>& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("fanlib: ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}
Matrix Matrix::from_columns(const std::vector<Vec>& columns, std::size_t rows) {
  Matrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != rows) throw std::invalid_argument("fanlib: ragged matrix columns");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
  }
  return m;
}
Matrix Matrix::diagonal(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}
Vec Matrix::row(std::size_t i) const { return Vec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_); }
Vec Matrix::column(std::size_t j) const {
  Vec v(r_);
  for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
  return v;
}
std::vector<Vec> Matrix::row_list() const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < r_; ++i) out.push_back(row(i));
  return out;
}
std::vector<Vec> Matrix::column_list() const {
  std::vector<Vec> out;
  for (std::size_t j = 0; j < c_; ++j) out.push_back(column(j));
  return out;
}
Matrix Matrix::transpose() const {
  Matrix t(c_, r_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}
Matrix Matrix::hconcat(const Matrix& b) const {
  if (b.r_ != r_) throw std::invalid_argument("fanlib: hconcat row mismatch");
  Matrix m(r_, c_ + b.c_);
  for (std::size_t i = 0; i < r_; ++i) {
    for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(i, j);
    for (std::size_t j = 0; j < b.c_; ++j) m(i, c_ + j) = b(i, j);
  }
  return m;
}
Matrix Matrix::vconcat(const Matrix& b) const {
  if (b.c_ != c_) throw std::invalid_argument("fanlib: vconcat column mismatch");
  Matrix m(r_ + b.r_, c_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(i, j);
  for (std::size_t i = 0; i < b.r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) m(r_ + i, j) = b(i, j);
  return m;
}
Matrix Matrix::select_columns(const std::vector<std::size_t>& idx) const {
  Matrix m(r_, idx.size());
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
  return m;
}
Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
  Matrix m(idx.size(), c_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(idx[i], j);
  return m;
}
bool Matrix::is_zero() const { return fanlib::is_zero(a_); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("fanlib: matrix product shape mismatch");
  Matrix m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      Int x = a(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) = add(m(i, j), mul(x, b(k, j)));
    }
  return m;
}

Vec operator*(const Matrix& a, const Vec& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("fanlib: matrix-vector shape mismatch");
  Vec r(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) r[i] = add(r[i], mul(a(i, k), x[k]));
  return r;
}

// ---- Smith normal form

namespace {

struct SmithWork {
  Matrix a, u, uinv, v, vinv;

  void row_swap(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < a.cols(); ++k) std::swap(a(i, k), a(j, k));
    for (std::size_t k = 0; k < u.cols(); ++k) std::swap(u(i, k), u(j, k));
    for (std::size_t k = 0; k < uinv.rows(); ++k) std::swap(uinv(k, i), uinv(k, j));
  }
  // row_i += q * row_j
  void row_add(std::size_t i, std::size_t j, Int q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) = add(a(i, k), mul(q, a(j, k)));
    for (std::size_t k = 0; k < u.cols(); ++k) u(i, k) = add(u(i, k), mul(q, u(j, k)));
    for (std::size_t k = 0; k < uinv.rows(); ++k) uinv(k, j) = sub(uinv(k, j), mul(q, uinv(k, i)));
  }
  void row_neg(std::size_t i) {
    for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) = neg(a(i, k));
    for (std::size_t k = 0; k < u.cols(); ++k) u(i, k) = neg(u(i, k));
    for (std::size_t k = 0; k < uinv.rows(); ++k) uinv(k, i) = neg(uinv(k, i));
  }
  void col_swap(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < a.rows(); ++k) std::swap(a(k, i), a(k, j));
    for (std::size_t k = 0; k < v.rows(); ++k) std::swap(v(k, i), v(k, j));
    for (std::size_t k = 0; k < vinv.cols(); ++k) std::swap(vinv(i, k), vinv(j, k));
  }
  // col_i += q * col_j
  void col_add(std::size_t i, std::size_t j, Int q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < a.rows(); ++k) a(k, i) = add(a(k, i), mul(q, a(k, j)));
    for (std::size_t k = 0; k < v.rows(); ++k) v(k, i) = add(v(k, i), mul(q, v(k, j)));
    for (std::size_t k = 0; k < vinv.cols(); ++k) vinv(j, k) = sub(vinv(j, k), mul(q, vinv(i, k)));
  }
};

Int iabs(Int x) { return x < 0 ? neg(x) : x; }

}  // namespace

Smith smith(const Matrix& m) {
  SmithWork w{m, Matrix::identity(m.rows()), Matrix::identity(m.rows()), Matrix::identity(m.cols()),
              Matrix::identity(m.cols())};
  const std::size_t R = m.rows(), C = m.cols(), N = std::min(R, C);
  Smith out;
  out.diag.assign(N, 0);
  for (std::size_t t = 0; t < N; ++t) {
    // Pivot: smallest nonzero entry of the remaining block.
    std::size_t pi = R, pj = C;
    Int best = 0;
    for (std::size_t i = t; i < R; ++i)
      for (std::size_t j = t; j < C; ++j) {
        Int x = iabs(w.a(i, j));
        if (x != 0 && (best == 0 || x < best)) {
          best = x;
          pi = i;
          pj = j;
        }
      }
    if (best == 0) break;
    w.row_swap(t, pi);
    w.col_swap(t, pj);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (w.a(i, t) == 0) continue;
        w.row_add(i, t, neg(w.a(i, t) / w.a(t, t)));
        if (w.a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (w.a(t, j) == 0) continue;
        w.col_add(j, t, neg(w.a(t, j) / w.a(t, t)));
        if (w.a(t, j) != 0) clean = false;
      }
      if (!clean) {
        // Remainders are smaller than the pivot; move the smallest into place.
        std::size_t bi = t, bj = t;
        Int b = iabs(w.a(t, t));
        for (std::size_t i = t + 1; i < R; ++i)
          if (w.a(i, t) != 0 && iabs(w.a(i, t)) < b) b = iabs(w.a(i, t)), bi = i, bj = t;
        for (std::size_t j = t + 1; j < C; ++j)
          if (w.a(t, j) != 0 && iabs(w.a(t, j)) < b) b = iabs(w.a(t, j)), bi = t, bj = j;
        w.row_swap(t, bi);
        w.col_swap(t, bj);
        continue;
      }
      bool divides = true;
      for (std::size_t i = t + 1; i < R && divides; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (w.a(i, j) % w.a(t, t) != 0) {
            w.row_add(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (w.a(t, t) < 0) w.row_neg(t);
    out.diag[t] = w.a(t, t);
    ++out.rank;
  }
  out.u = std::move(w.u);
  out.uinv = std::move(w.uinv);
  out.v = std::move(w.v);
  out.vinv = std::move(w.vinv);
  return out;
}

Int determinant(const Matrix& a0) {
  if (a0.rows() != a0.cols()) throw std::invalid_argument("fanlib: determinant of non-square matrix");
  const std::size_t n = a0.rows();
  if (n == 0) return 1;
  Matrix a = a0;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = sub(mul(a(i, j), a(k, k)), mul(a(i, k), a(k, j))) / prev;
    prev = a(k, k);
  }
  return mul(sign, a(n - 1, n - 1));
}

std::size_t rank_of(const Matrix& a) { return smith(a).rank; }

// ---- IntSolver

IntSolver::IntSolver(const Matrix& w) : s_(smith(w)) {}

std::optional<Vec> IntSolver::solve(const Vec& x) const {
  Vec y = s_.u * x;
  Vec z(cols(), 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i < s_.rank) {
      if (y[i] % s_.diag[i] != 0) return std::nullopt;
      z[i] = y[i] / s_.diag[i];
    } else if (y[i] != 0) {
      return std::nullopt;
    }
  }
  return s_.v * z;
}

std::optional<Int> IntSolver::denominator(const Vec& x) const {
  Vec y = s_.u * x;
  Int t = 1;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i < s_.rank)
      t = lcm(t, s_.diag[i] / gcd(s_.diag[i], y[i]));
    else if (y[i] != 0)
      return std::nullopt;
  }
  return t;
}

Matrix IntSolver::lattice_basis() const {
  Matrix b(rows(), s_.rank);
  for (std::size_t j = 0; j < s_.rank; ++j)
    for (std::size_t i = 0; i < rows(); ++i) b(i, j) = mul(s_.diag[j], s_.uinv(i, j));
  return b;
}

Matrix IntSolver::kernel_basis() const {
  std::vector<std::size_t> idx;
  for (std::size_t j = s_.rank; j < cols(); ++j) idx.push_back(j);
  return s_.v.select_columns(idx);
}

Matrix IntSolver::left_kernel() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = s_.rank; i < rows(); ++i) idx.push_back(i);
  return s_.u.select_rows(idx);
}

Matrix canonical_row_basis(const Matrix& m) {
  std::vector<Vec> rows = m.row_list();
  const std::size_t n = m.cols();
  std::vector<Vec> out;
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][col] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    rows[r] = primitive(rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      Int g = gcd(rows[r][col], rows[i][col]);
      rows[i] = primitive(vsub(vscale(rows[r][col] / g, rows[i]), vscale(rows[i][col] / g, rows[r])));
    }
    ++r;
  }
  for (std::size_t i = 0; i < r; ++i) {
    Vec v = primitive(rows[i]);
    auto lead = std::find_if(v.begin(), v.end(), [](Int x) { return x != 0; });
    if (lead != v.end() && *lead < 0) v = vneg(v);
    out.push_back(v);
  }
  return Matrix::from_rows(out, n);
}

Matrix span_equations(const Matrix& w) { return canonical_row_basis(IntSolver(w).left_kernel()); }

std::pair<Vec, Int> solve_rational(const Matrix& a, const Vec& b) {
  const std::size_t n = a.rows();
  Int d = determinant(a);
  if (d == 0) throw std::domain_error("fanlib: singular system");
  Vec num(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix ai = a;
    for (std::size_t k = 0; k < n; ++k) ai(k, i) = b[k];
    num[i] = determinant(ai);
  }
  if (d < 0) {
    d = neg(d);
    num = vneg(num);
  }
  Int g = gcd(content(num), d);
  if (g > 1) {
    for (auto& x : num) x /= g;
    d /= g;
  }
  return {num, d};
}

std::string vec_to_string(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

}  // namespace fanlib
