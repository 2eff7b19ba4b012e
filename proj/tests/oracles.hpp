#ifndef TENRANK_TESTS_ORACLES_HPP
#define TENRANK_TESTS_ORACLES_HPP

// Independent reference implementations used to validate library results.
// Every oracle here is coded straight from its defining formula and shares no
// helper code with the library path it checks, so agreement between the two
// is meaningful evidence rather than a tautology.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tenrank/matrix.hpp"
#include "tenrank/scalar.hpp"
#include "tenrank/tensor.hpp"

namespace oracles {

using tenrank::DenseTensor;
using tenrank::Index;
using tenrank::Mat;
using tenrank::Rational;
using tenrank::Shape;
using tenrank::Vec;

// Multilinear action on an order-3 tensor, straight from the definition:
// B(p,q,r) = sum_{i,j,k} L(p,i) M(q,j) N(r,k) A(i,j,k).
template <class T>
DenseTensor<T> mmm3(const DenseTensor<T>& a, const Mat<T>& l, const Mat<T>& m,
                    const Mat<T>& n) {
  DenseTensor<T> b(Shape{l.rows, m.rows, n.rows});
  for (Index p = 0; p < l.rows; ++p)
    for (Index q = 0; q < m.rows; ++q)
      for (Index r = 0; r < n.rows; ++r) {
        T acc(0);
        for (Index i = 0; i < l.cols; ++i)
          for (Index j = 0; j < m.cols; ++j)
            for (Index k = 0; k < n.cols; ++k)
              acc += l(p, i) * m(q, j) * n(r, k) * a.at({i, j, k});
        b.at({p, q, r}) = acc;
      }
  return b;
}

// Mode-m rank by direct Gaussian elimination over the mode-m fibers, with no
// flattening step: each fiber (the vector obtained by letting index m run
// while the others stay fixed) becomes one row of an elimination tableau.
template <class T>
std::vector<Vec<T>> collect_fibers(const DenseTensor<T>& a, int mode) {
  std::vector<Vec<T>> fibers;
  Shape rest = a.shape();
  rest.erase(rest.begin() + mode);
  std::vector<Index> outer(rest.size(), 0);
  Index d = a.dim(mode);
  while (true) {
    Vec<T> fiber;
    for (Index i = 0; i < d; ++i) {
      std::vector<Index> idx(outer.begin(), outer.begin() + mode);
      idx.push_back(i);
      idx.insert(idx.end(), outer.begin() + mode, outer.end());
      fiber.push_back(a.at(idx));
    }
    fibers.push_back(std::move(fiber));
    int pos = static_cast<int>(rest.size()) - 1;
    while (pos >= 0) {
      if (++outer[static_cast<std::size_t>(pos)] < rest[static_cast<std::size_t>(pos)]) break;
      outer[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return fibers;
}

inline bool oracle_is_zero(const Rational& x, double) { return x == 0; }
inline bool oracle_is_zero(double x, double tol) { return std::abs(x) <= tol; }

template <class T>
Index fiber_rank(const DenseTensor<T>& a, int mode, double tol = 0) {
  std::vector<Vec<T>> rows = collect_fibers(a, mode);
  // Scale the float zero test by the largest entry so the oracle is not
  // fooled by uniformly large or small tensors.
  double scale = 0;
  for (const auto& row : rows)
    for (const T& x : row) scale = std::max(scale, std::abs(tenrank::to_double(x)));
  double cut = tol * (scale > 0 ? scale : 1.0);

  std::size_t d = rows.empty() ? 0 : rows[0].size();
  Index rank = 0;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < d && lead < rows.size(); ++col) {
    std::size_t pivot = lead;
    for (std::size_t r = lead; r < rows.size(); ++r)
      if (std::abs(tenrank::to_double(rows[r][col])) >
          std::abs(tenrank::to_double(rows[pivot][col])))
        pivot = r;
    if (oracle_is_zero(rows[pivot][col], cut)) continue;
    std::swap(rows[lead], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == lead) continue;
      T factor = rows[r][col] / rows[lead][col];
      for (std::size_t c = col; c < d; ++c) rows[r][c] -= factor * rows[lead][c];
    }
    ++lead;
    ++rank;
  }
  return rank;
}

// Hyperdeterminant of a 2x2x2 array through the slab identity
// ((det(S1+S2) - det(S1-S2))/2)^2 - 4 det(S1) det(S2), where S1, S2 are the
// two mode-1 slabs. Uses nothing but 2x2 determinants.
template <class T>
T delta_slabs(const DenseTensor<T>& a) {
  // The explicit return type matters: exact backends build lazy expressions
  // referencing the parameters, which must be forced into a value before the
  // parameters go out of scope.
  auto det2 = [](T a00, T a01, T a10, T a11) -> T { return a00 * a11 - a01 * a10; };
  T s1[4] = {a.at({0, 0, 0}), a.at({0, 0, 1}), a.at({0, 1, 0}), a.at({0, 1, 1})};
  T s2[4] = {a.at({1, 0, 0}), a.at({1, 0, 1}), a.at({1, 1, 0}), a.at({1, 1, 1})};
  T det_sum = det2(s1[0] + s2[0], s1[1] + s2[1], s1[2] + s2[2], s1[3] + s2[3]);
  T det_diff = det2(s1[0] - s2[0], s1[1] - s2[1], s1[2] - s2[2], s1[3] - s2[3]);
  T mixed = (det_sum - det_diff) / T(2);
  return mixed * mixed - T(4) * det2(s1[0], s1[1], s1[2], s1[3]) *
                             det2(s2[0], s2[1], s2[2], s2[3]);
}

// The six 2x2 minors of the mode flattening of a 2x2x2 array, written out by
// hand. For mode 0 the two rows are the slabs (a_0jk), (a_1jk) and the columns
// run over (j,k) in row-major order; the six column pairs give the minors
//   a000*a101 - a001*a100,   a000*a110 - a010*a100,   a000*a111 - a011*a100,
//   a001*a110 - a010*a101,   a001*a111 - a011*a101,   a010*a111 - a011*a110.
// Other modes follow by putting the chosen index first. All six vanish exactly
// when the mode flattening has rank at most 1.
template <class T>
std::vector<T> six_minors(const DenseTensor<T>& a, int mode) {
  auto entry = [&](Index lead, Index r, Index c) {
    std::vector<Index> idx(3, 0);
    idx[static_cast<std::size_t>(mode)] = lead;
    int pos = 0;
    for (int m = 0; m < 3; ++m) {
      if (m == mode) continue;
      idx[static_cast<std::size_t>(m)] = pos == 0 ? r : c;
      ++pos;
    }
    return a.at(idx);
  };
  // Columns of the flattening indexed by (r,c) pairs 00,01,10,11.
  const Index pairs[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::vector<T> minors;
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q)
      minors.push_back(entry(0, pairs[p][0], pairs[p][1]) * entry(1, pairs[q][0], pairs[q][1]) -
                       entry(0, pairs[q][0], pairs[q][1]) * entry(1, pairs[p][0], pairs[p][1]));
  return minors;
}

// Naive CP evaluation: accumulate each rank-1 term entry by entry.
template <class T>
DenseTensor<T> eval_cp_naive(const std::vector<T>& weights,
                             const std::vector<std::vector<Vec<T>>>& vectors,
                             const Shape& shape) {
  DenseTensor<T> out(shape);
  std::vector<Index> idx(shape.size(), 0);
  while (true) {
    T value(0);
    for (std::size_t t = 0; t < weights.size(); ++t) {
      T term = weights[t];
      for (std::size_t m = 0; m < shape.size(); ++m)
        term = term * vectors[t][m][static_cast<std::size_t>(idx[m])];
      value += term;
    }
    out.at(idx) = value;
    int pos = static_cast<int>(shape.size()) - 1;
    while (pos >= 0) {
      if (++idx[static_cast<std::size_t>(pos)] < shape[static_cast<std::size_t>(pos)]) break;
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

// Deterministic input generators for property tests. These only build inputs,
// so sharing std::mt19937_64 with the library is harmless; draws use raw
// engine bits to stay platform-stable.
inline int rand_int(std::mt19937_64& eng, int lo, int hi) {
  return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline double rand_unit(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

template <class T>
DenseTensor<T> random_int_tensor(const Shape& shape, std::mt19937_64& eng, int lo = -3,
                                 int hi = 3) {
  DenseTensor<T> a(shape);
  for (T& x : a.data()) x = T(rand_int(eng, lo, hi));
  return a;
}

inline DenseTensor<double> random_real_tensor(const Shape& shape, std::mt19937_64& eng) {
  DenseTensor<double> a(shape);
  for (double& x : a.data()) x = rand_unit(eng);
  return a;
}

template <class T>
Mat<T> random_int_matrix(Index rows, Index cols, std::mt19937_64& eng, int lo = -3,
                         int hi = 3) {
  Mat<T> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = T(rand_int(eng, lo, hi));
  return m;
}

// Square integer matrix redrawn until it is invertible (checked by the 2x2 or
// general determinant below, not by library code).
template <class T>
T naive_det(const Mat<T>& m) {
  if (m.rows == 1) return m(0, 0);
  T acc(0);
  int sign = 1;
  for (Index j = 0; j < m.cols; ++j) {
    Mat<T> minor(m.rows - 1, m.cols - 1);
    for (Index r = 1; r < m.rows; ++r) {
      Index cc = 0;
      for (Index c = 0; c < m.cols; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    T term = m(0, j) * naive_det(minor);
    acc += sign > 0 ? term : -term;
    sign = -sign;
  }
  return acc;
}

template <class T>
Mat<T> random_invertible(Index n, std::mt19937_64& eng, int lo = -3, int hi = 3) {
  while (true) {
    Mat<T> m = random_int_matrix<T>(n, n, eng, lo, hi);
    if (naive_det(m) != T(0)) return m;
  }
}

inline Vec<double> random_real_vec(Index dim, std::mt19937_64& eng) {
  Vec<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = rand_unit(eng);
  return v;
}

}  // namespace oracles

#endif  // TENRANK_TESTS_ORACLES_HPP
