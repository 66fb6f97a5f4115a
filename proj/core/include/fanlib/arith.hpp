#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fanlib {

using Int = std::int64_t;
using Vec = std::vector<Int>;

// Overflow-checked integer arithmetic. All throw std::overflow_error.
Int add(Int a, Int b);
Int sub(Int a, Int b);
Int mul(Int a, Int b);
Int neg(Int a);
Int gcd(Int a, Int b);
Int lcm(Int a, Int b);
Int floor_div(Int a, Int b);
Int mod(Int a, Int b);  // in [0, |b|)

Int dot(const Vec& a, const Vec& b);
Vec vadd(const Vec& a, const Vec& b);
Vec vsub(const Vec& a, const Vec& b);
Vec vscale(Int k, const Vec& a);
Vec vneg(const Vec& a);
bool is_zero(const Vec& a);
Int content(const Vec& a);  // gcd of entries, 0 for the zero vector
Vec primitive(const Vec& a);
Vec unit_vector(std::size_t n, std::size_t i);

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, 0) {}
  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows, std::size_t cols);
  static Matrix from_columns(const std::vector<Vec>& columns, std::size_t rows);
  static Matrix diagonal(const Vec& d);

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  Int& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  Int operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  Vec row(std::size_t i) const;
  Vec column(std::size_t j) const;
  std::vector<Vec> row_list() const;
  std::vector<Vec> column_list() const;
  Matrix transpose() const;
  Matrix hconcat(const Matrix& b) const;
  Matrix vconcat(const Matrix& b) const;
  Matrix select_columns(const std::vector<std::size_t>& idx) const;
  Matrix select_rows(const std::vector<std::size_t>& idx) const;
  bool is_zero() const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Int> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, const Vec& x);

// u * m * v = diag, with diag[0] | diag[1] | ... and entries >= 0.
struct Smith {
  Matrix u, uinv, v, vinv;
  Vec diag;  // length min(rows, cols)
  std::size_t rank = 0;
};
Smith smith(const Matrix& m);

Int determinant(const Matrix& a);
std::size_t rank_of(const Matrix& a);

// Integer linear algebra against a fixed generator matrix W (columns are generators).
class IntSolver {
 public:
  IntSolver() = default;
  explicit IntSolver(const Matrix& w);
  std::optional<Vec> solve(const Vec& x) const;
  bool contains(const Vec& x) const { return solve(x).has_value(); }
  // Least t > 0 with t*x in the column lattice; nullopt outside the rational span.
  std::optional<Int> denominator(const Vec& x) const;
  Matrix lattice_basis() const;  // columns
  Matrix kernel_basis() const;   // columns, basis of {y : W y = 0}
  Matrix left_kernel() const;    // rows r with r W = 0
  std::size_t rank() const { return s_.rank; }
  std::size_t rows() const { return s_.u.rows(); }
  std::size_t cols() const { return s_.v.rows(); }

 private:
  Smith s_;
};

// Row-reduced primitive basis of a row space; canonical for the subspace.
Matrix canonical_row_basis(const Matrix& rows);
// Rows cutting out the rational span of the columns of w.
Matrix span_equations(const Matrix& w);

// Square nonsingular a: returns (num, den) with a * num = den * b, den > 0.
std::pair<Vec, Int> solve_rational(const Matrix& a, const Vec& b);

std::string vec_to_string(const Vec& v);

}  // namespace fanlib
