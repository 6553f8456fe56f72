#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

// Small dense matrices over an exact field (Rational, RationalFunction).
// Everything here is exact arithmetic: deterministic first-nonzero pivoting,
// no magnitude comparisons.  Intended for the hand-sized systems that appear
// in the stability analysis (n <= 8), not for numerical work.

namespace ksw {

template <class T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& at(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  Matrix transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      throw std::invalid_argument("matrix product shape mismatch");
    Matrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a.at(i, k) == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          m.at(i, j) = m.at(i, j) + a.at(i, k) * b.at(k, j);
      }
    return m;
  }

  // Reduced row echelon form in place; returns the rank.
  std::size_t rref() {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
      std::size_t pivot = rank;
      while (pivot < rows_ && at(pivot, col) == T(0)) ++pivot;
      if (pivot == rows_) continue;
      if (pivot != rank)
        for (std::size_t j = 0; j < cols_; ++j)
          std::swap(at(pivot, j), at(rank, j));
      T inv = T(1) / at(rank, col);
      for (std::size_t j = col; j < cols_; ++j) at(rank, j) = at(rank, j) * inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == rank || at(i, col) == T(0)) continue;
        T f = at(i, col);
        for (std::size_t j = col; j < cols_; ++j)
          at(i, j) = at(i, j) - f * at(rank, j);
      }
      ++rank;
    }
    return rank;
  }

  std::size_t rank() const {
    Matrix m = *this;
    return m.rref();
  }

  // Basis of the kernel {x : A x = 0}, one vector per free column.
  std::vector<std::vector<T>> null_space() const {
    Matrix m = *this;
    std::size_t rank = m.rref();
    std::vector<int> pivot_row(cols_, -1);
    for (std::size_t r = 0, col = 0; r < rank && col < cols_; ++col) {
      if (!(m.at(r, col) == T(0))) {
        pivot_row[col] = static_cast<int>(r);
        ++r;
      }
    }
    std::vector<std::vector<T>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
      if (pivot_row[free] >= 0) continue;
      std::vector<T> v(cols_, T(0));
      v[free] = T(1);
      for (std::size_t col = 0; col < cols_; ++col)
        if (pivot_row[col] >= 0)
          v[col] = T(0) - m.at(static_cast<std::size_t>(pivot_row[col]), free);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  T det() const {
    if (rows_ != cols_) throw std::invalid_argument("det of non-square matrix");
    Matrix m = *this;
    T result(1);
    for (std::size_t col = 0; col < cols_; ++col) {
      std::size_t pivot = col;
      while (pivot < rows_ && m.at(pivot, col) == T(0)) ++pivot;
      if (pivot == rows_) return T(0);
      if (pivot != col) {
        for (std::size_t j = 0; j < cols_; ++j)
          std::swap(m.at(pivot, j), m.at(col, j));
        result = T(0) - result;
      }
      result = result * m.at(col, col);
      T inv = T(1) / m.at(col, col);
      for (std::size_t i = col + 1; i < rows_; ++i) {
        if (m.at(i, col) == T(0)) continue;
        T f = m.at(i, col) * inv;
        for (std::size_t j = col; j < cols_; ++j)
          m.at(i, j) = m.at(i, j) - f * m.at(col, j);
      }
    }
    return result;
  }

  // Unique solution of A x = b, or nullopt when none exists or the solution
  // space has positive dimension.
  std::optional<std::vector<T>> solve(const std::vector<T>& b) const {
    if (b.size() != rows_)
      throw std::invalid_argument("right-hand side length mismatch");
    Matrix aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols_) = b[i];
    }
    std::size_t rank = aug.rref();
    // inconsistent: a pivot in the augmented column
    for (std::size_t i = 0; i < rows_; ++i) {
      bool zero_row = true;
      for (std::size_t j = 0; j < cols_; ++j)
        if (!(aug.at(i, j) == T(0))) {
          zero_row = false;
          break;
        }
      if (zero_row && !(aug.at(i, cols_) == T(0))) return std::nullopt;
    }
    if (rank != cols_) return std::nullopt;
    std::vector<T> x(cols_, T(0));
    for (std::size_t i = 0; i < cols_; ++i) x[i] = aug.at(i, cols_);
    return x;
  }

  // det of the top-left k x k corner for k = 1..n.
  std::vector<T> leading_principal_minors() const {
    if (rows_ != cols_)
      throw std::invalid_argument("principal minors of non-square matrix");
    std::vector<T> minors;
    minors.reserve(rows_);
    for (std::size_t k = 1; k <= rows_; ++k) {
      Matrix sub(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = at(i, j);
      minors.push_back(sub.det());
    }
    return minors;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> data_;
};

// Congruence diagonalisation of a symmetric matrix: returns P and the
// diagonal entries d with P^T A P = diag(d).  Columns of P whose diagonal
// entry is negative are explicit witnesses of indefiniteness.
template <class T>
struct CongruenceResult {
  Matrix<T> basis;         // P
  std::vector<T> diagonal;  // d
};

template <class T>
CongruenceResult<T> congruence_diagonalize(const Matrix<T>& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("congruence of non-square matrix");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (!(a.at(i, j) == a.at(j, i)))
        throw std::invalid_argument("congruence of non-symmetric matrix");
  std::size_t n = a.rows();
  Matrix<T> m = a;
  Matrix<T> p = Matrix<T>::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (m.at(k, k) == T(0)) {
      // bring a nonzero onto the diagonal: prefer a later diagonal entry,
      // otherwise use a_kj != 0 and add row/column j to k
      std::size_t src = n;
      for (std::size_t j = k + 1; j < n; ++j)
        if (!(m.at(j, j) == T(0))) {
          src = j;
          break;
        }
      if (src < n) {
        for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(src, j));
        for (std::size_t i = 0; i < n; ++i) std::swap(m.at(i, k), m.at(i, src));
        for (std::size_t i = 0; i < n; ++i) std::swap(p.at(i, k), p.at(i, src));
      } else {
        std::size_t off = n;
        for (std::size_t j = k + 1; j < n; ++j)
          if (!(m.at(k, j) == T(0))) {
            off = j;
            break;
          }
        if (off == n) continue;  // whole row/column zero: diagonal entry 0
        for (std::size_t j = 0; j < n; ++j)
          m.at(k, j) = m.at(k, j) + m.at(off, j);
        for (std::size_t i = 0; i < n; ++i)
          m.at(i, k) = m.at(i, k) + m.at(i, off);
        for (std::size_t i = 0; i < n; ++i)
          p.at(i, k) = p.at(i, k) + p.at(i, off);
      }
    }
    if (m.at(k, k) == T(0)) continue;
    T inv = T(1) / m.at(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m.at(i, k) == T(0)) continue;
      T f = m.at(i, k) * inv;
      for (std::size_t j = 0; j < n; ++j)
        m.at(i, j) = m.at(i, j) - f * m.at(k, j);
      for (std::size_t j = 0; j < n; ++j)
        m.at(j, i) = m.at(j, i) - f * m.at(j, k);
      for (std::size_t j = 0; j < n; ++j)
        p.at(j, i) = p.at(j, i) - f * p.at(j, k);
    }
  }
  CongruenceResult<T> out;
  out.basis = p;
  out.diagonal.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.diagonal.push_back(m.at(k, k));
  return out;
}

// Determinant by cofactor expansion for ring-valued entries (no division
// required); `zero` supplies the additive identity, e.g. Poly::zero(ring).
template <class T>
T det_cofactor(const std::vector<std::vector<T>>& a, const T& zero) {
  std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("det of empty matrix");
  if (n == 1) return a[0][0];
  T acc = zero;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == zero) continue;
    std::vector<std::vector<T>> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<T> row;
      row.reserve(n - 1);
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(std::move(row));
    }
    T term = a[0][j] * det_cofactor(minor, zero);
    if (j % 2 == 0)
      acc = acc + term;
    else
      acc = acc - term;
  }
  return acc;
}

}  // namespace ksw
