#ifndef TENRANK_MATRIX_HPP
#define TENRANK_MATRIX_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tenrank/defaults.hpp"
#include "tenrank/scalar.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// Small dense row-major matrix over double or Rational. Everything in this
// project is desk-scale (dimensions in the single digits), so clarity beats
// blocking and the exact backend shares all the plumbing.
template <class T>
struct Mat {
  Index rows = 0;
  Index cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(Index r, Index c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c), T(0)) {
    if (r < 0 || c < 0) throw std::invalid_argument("negative matrix dimension");
  }
  Mat(Index r, Index c, std::vector<T> data) : rows(r), cols(c), a(std::move(data)) {
    if (static_cast<Index>(a.size()) != r * c)
      throw std::invalid_argument("matrix data length does not match dimensions");
  }
  Mat(std::initializer_list<std::initializer_list<T>> init) {
    rows = static_cast<Index>(init.size());
    cols = rows ? static_cast<Index>(init.begin()->size()) : 0;
    a.reserve(static_cast<std::size_t>(rows * cols));
    for (const auto& row : init) {
      if (static_cast<Index>(row.size()) != cols)
        throw std::invalid_argument("ragged matrix initializer");
      for (const T& x : row) a.push_back(x);
    }
  }

  static Mat identity(Index n) {
    Mat m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  const T& operator()(Index i, Index j) const {
    return a[static_cast<std::size_t>(i * cols + j)];
  }
  T& operator()(Index i, Index j) { return a[static_cast<std::size_t>(i * cols + j)]; }

  bool operator==(const Mat& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

template <class T>
Mat<T> mat_mul(const Mat<T>& x, const Mat<T>& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: inner dimensions differ");
  Mat<T> z(x.rows, y.cols);
  for (Index i = 0; i < x.rows; ++i)
    for (Index k = 0; k < x.cols; ++k) {
      const T& xik = x(i, k);
      if (xik == T(0)) continue;
      for (Index j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

template <class T>
Vec<T> mat_vec(const Mat<T>& x, const Vec<T>& v) {
  if (x.cols != static_cast<Index>(v.size()))
    throw std::invalid_argument("mat_vec: dimension mismatch");
  Vec<T> out(static_cast<std::size_t>(x.rows), T(0));
  for (Index i = 0; i < x.rows; ++i)
    for (Index j = 0; j < x.cols; ++j)
      out[static_cast<std::size_t>(i)] += x(i, j) * v[static_cast<std::size_t>(j)];
  return out;
}

template <class T>
Mat<T> transpose(const Mat<T>& x) {
  Mat<T> t(x.cols, x.rows);
  for (Index i = 0; i < x.rows; ++i)
    for (Index j = 0; j < x.cols; ++j) t(j, i) = x(i, j);
  return t;
}

namespace detail {

// Picks the elimination pivot row: exact scalars take the first nonzero entry,
// doubles the entry of largest magnitude (partial pivoting).
template <class T>
Index pivot_row(const Mat<T>& m, Index col, Index from) {
  if constexpr (ScalarTraits<T>::is_exact) {
    for (Index i = from; i < m.rows; ++i)
      if (!(m(i, col) == T(0))) return i;
    return -1;
  } else {
    Index best = -1;
    T best_abs(0);
    for (Index i = from; i < m.rows; ++i) {
      T v = abs_value(m(i, col));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    return best;
  }
}

}  // namespace detail

// Row echelon reduction with division; exact over Rational. Returns the rank,
// determinant (square inputs; 0 when rank-deficient), and the pivot columns,
// which form a column-space basis of the input.
template <class T>
struct EchelonResult {
  Mat<T> echelon;
  std::vector<Index> pivot_cols;
  T det = T(0);
  Index rank = 0;
};

template <class T>
EchelonResult<T> row_echelon(Mat<T> m) {
  EchelonResult<T> res;
  T det(1);
  int swaps = 0;
  Index row = 0;
  for (Index col = 0; col < m.cols && row < m.rows; ++col) {
    const Index p = detail::pivot_row(m, col, row);
    if (p < 0 || m(p, col) == T(0)) continue;
    if (p != row) {
      for (Index j = 0; j < m.cols; ++j) std::swap(m.a[p * m.cols + j], m.a[row * m.cols + j]);
      ++swaps;
    }
    res.pivot_cols.push_back(col);
    const T pivot = m(row, col);
    det *= pivot;
    for (Index i = row + 1; i < m.rows; ++i) {
      if (m(i, col) == T(0)) continue;
      const T f = m(i, col) / pivot;
      for (Index j = col; j < m.cols; ++j) m(i, j) -= f * m(row, j);
      m(i, col) = T(0);
    }
    ++row;
  }
  res.rank = row;
  if (m.rows == m.cols)
    res.det = (res.rank == m.rows) ? (swaps % 2 ? T(-det) : det) : T(0);
  res.echelon = std::move(m);
  return res;
}

template <class T>
T determinant(const Mat<T>& m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant of non-square matrix");
  return row_echelon(m).det;
}

// Gauss-Jordan inverse. Throws on exactly singular input; float callers are
// expected to have rank-checked first.
template <class T>
Mat<T> inverse(const Mat<T>& m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
  const Index n = m.rows;
  Mat<T> aug(n, 2 * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  for (Index col = 0; col < n; ++col) {
    Index p = detail::pivot_row(aug, col, col);
    if (p < 0 || aug(p, col) == T(0))
      throw std::runtime_error("inverse: matrix is singular");
    if (p != col)
      for (Index j = 0; j < 2 * n; ++j) std::swap(aug.a[p * 2 * n + j], aug.a[col * 2 * n + j]);
    const T pivot = aug(col, col);
    for (Index j = 0; j < 2 * n; ++j) aug(col, j) /= pivot;
    for (Index i = 0; i < n; ++i) {
      if (i == col || aug(i, col) == T(0)) continue;
      const T f = aug(i, col);
      for (Index j = 0; j < 2 * n; ++j) aug(i, j) -= f * aug(col, j);
    }
  }
  Mat<T> inv(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

inline Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (Index i = 0; i < m.rows; ++i)
    for (Index j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

inline Mat<double> from_eigen(const Eigen::MatrixXd& e) {
  Mat<double> m(e.rows(), e.cols());
  for (Index i = 0; i < m.rows; ++i)
    for (Index j = 0; j < m.cols; ++j) m(i, j) = e(i, j);
  return m;
}

inline std::vector<double> singular_values(const Mat<double>& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

// Numerical rank: number of singular values above tol * sigma_max * max(rows, cols).
inline Index matrix_rank_tol(const Mat<double>& m, double tol = defaults::rank_tol) {
  if (tol < 0) throw std::invalid_argument("matrix_rank_tol: negative tolerance");
  const std::vector<double> s = singular_values(m);
  if (s.empty()) return 0;
  const double cutoff = tol * s.front() * static_cast<double>(std::max(m.rows, m.cols));
  Index r = 0;
  for (double v : s)
    if (v > cutoff) ++r;
  return r;
}

// Exact rank by elimination; the tolerance argument is accepted for interface
// symmetry and ignored.
inline Index matrix_rank_tol(const Mat<Rational>& m, double /*tol*/ = 0.0) {
  return row_echelon(m).rank;
}

inline Mat<double> to_double_mat(const Mat<Rational>& m) {
  Mat<double> d(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) d.a[i] = m.a[i].get_d();
  return d;
}

}  // namespace tenrank

#endif  // TENRANK_MATRIX_HPP
