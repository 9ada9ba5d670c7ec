#pragma once

// Exact dense linear algebra over Q and over the number field: rank,
// nullspace, solving, inverse. Plain Gaussian elimination with exact pivot
// tests; Eigen supplies storage and expressions only.

#include "polycut/number_field.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace cps {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using QMat = Mat<Rat>;
using QVec = Vec<Rat>;
using IMat = Mat<Int>;
using IVec = Vec<Int>;
using FMat = Mat<Fs>;
using FVec = Vec<Fs>;

inline bool exact_is_zero(const Rat& v) { return v == 0; }
inline bool exact_is_zero(const Int& v) { return v == 0; }
inline bool exact_is_zero(const Fs& v) { return v.is_zero(); }

// In-place reduced row echelon form; returns the pivot columns.
template <class S>
std::vector<int> rref(Mat<S>& a) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
    int p = -1;
    for (int r = row; r < a.rows(); ++r)
      if (!exact_is_zero(a(r, col))) {
        p = r;
        break;
      }
    if (p < 0) continue;
    if (p != row) a.row(p).swap(a.row(row));
    S inv = S(1) / a(row, col);
    for (int c = col; c < a.cols(); ++c) a(row, c) = a(row, c) * inv;
    for (int r = 0; r < a.rows(); ++r) {
      if (r == row || exact_is_zero(a(r, col))) continue;
      S f = a(r, col);
      for (int c = col; c < a.cols(); ++c) a(r, c) = a(r, c) - f * a(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class S>
int exact_rank(Mat<S> a) {
  return static_cast<int>(rref(a).size());
}

// Columns form a basis of {x : a x = 0}.
template <class S>
Mat<S> nullspace(const Mat<S>& a) {
  Mat<S> r = a;
  std::vector<int> pivots = rref(r);
  int n = static_cast<int>(a.cols());
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  Mat<S> ker(n, n - static_cast<int>(pivots.size()));
  int out = 0;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    for (int i = 0; i < n; ++i) ker(i, out) = S(0);
    ker(free, out) = S(1);
    for (size_t pi = 0; pi < pivots.size(); ++pi)
      ker(pivots[pi], out) = -r(static_cast<int>(pi), free);
    ++out;
  }
  return ker;
}

// All solutions of a x = b: returns a particular solution if consistent.
template <class S>
std::optional<Vec<S>> solve_consistent(const Mat<S>& a, const Vec<S>& b) {
  Mat<S> aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  std::vector<int> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  Vec<S> x = Vec<S>::Constant(a.cols(), S(0));
  for (size_t pi = 0; pi < pivots.size(); ++pi)
    x(pivots[pi]) = aug(static_cast<int>(pi), a.cols());
  return x;
}

// Unique solution of square invertible a x = b.
template <class S>
Vec<S> solve_square(const Mat<S>& a, const Vec<S>& b) {
  auto x = solve_consistent(a, b);
  if (!x || exact_rank(Mat<S>(a)) != a.cols())
    throw std::invalid_argument("singular system");
  return *x;
}

template <class S>
Mat<S> exact_inverse(const Mat<S>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("not square");
  int n = static_cast<int>(a.rows());
  Mat<S> aug(n, 2 * n);
  aug.leftCols(n) = a;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) aug(i, n + j) = S(i == j ? 1 : 0);
  std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) != n || pivots.back() != n - 1)
    throw std::invalid_argument("matrix not invertible");
  return aug.rightCols(n);
}

// Splits each field entry into its g power-basis coordinates: an m x k field
// matrix becomes an (m*g) x k rational matrix whose integer kernel equals
// {v in Z^k : M v = 0}.
QMat rational_restriction(const FMat& m, int degree);

// Field matrix -> rational matrix when every entry is rational.
std::optional<QMat> as_rational(const FMat& m);

inline FMat to_field(const QMat& m) {
  FMat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = Fs(m(i, j));
  return out;
}

inline QMat to_rational(const IMat& m) {
  QMat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = Rat(m(i, j));
  return out;
}

inline FVec to_field_vec(const QVec& v) {
  FVec out(v.size());
  for (int i = 0; i < v.size(); ++i) out(i) = Fs(v(i));
  return out;
}

}  // namespace cps
