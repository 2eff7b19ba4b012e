#ifndef TENRANK_MULTILINEAR_HPP
#define TENRANK_MULTILINEAR_HPP

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tenrank/matrix.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// A k-tuple of matrices (L_1,…,L_k) acting on order-k tensors mode by mode.
template <class T>
struct MultilinearMap {
  std::vector<Mat<T>> factors;

  MultilinearMap() = default;
  explicit MultilinearMap(std::vector<Mat<T>> f) : factors(std::move(f)) {}

  int order() const { return static_cast<int>(factors.size()); }

  static MultilinearMap identity(const Shape& shape) {
    std::vector<Mat<T>> f;
    f.reserve(shape.size());
    for (Index d : shape) f.push_back(Mat<T>::identity(d));
    return MultilinearMap(std::move(f));
  }

  bool invertible() const {
    for (const auto& m : factors) {
      if (m.rows != m.cols) return false;
      if (determinant(m) == T(0)) return false;
    }
    return true;
  }
};

// Componentwise composition: (M ∘ N)_i = M_i · N_i, so that applying N then M
// equals applying the composition.
template <class T>
MultilinearMap<T> compose(const MultilinearMap<T>& m, const MultilinearMap<T>& n) {
  if (m.order() != n.order())
    throw std::invalid_argument("compose: map orders differ");
  std::vector<Mat<T>> f;
  f.reserve(m.factors.size());
  for (std::size_t i = 0; i < m.factors.size(); ++i)
    f.push_back(mat_mul(m.factors[i], n.factors[i]));
  return MultilinearMap<T>(std::move(f));
}

template <class T>
MultilinearMap<T> inverse(const MultilinearMap<T>& m) {
  std::vector<Mat<T>> f;
  f.reserve(m.factors.size());
  for (const auto& x : m.factors) f.push_back(inverse(x));
  return MultilinearMap<T>(std::move(f));
}

// Mode-m product: contracts L (c × d_m) against the mode-m index of A.
template <class T>
DenseTensor<T> mode_product(const DenseTensor<T>& a, const Mat<T>& l, int mode) {
  if (mode < 0 || mode >= a.order())
    throw std::invalid_argument("mode_product: mode out of range");
  if (l.cols != a.dim(mode))
    throw std::invalid_argument("mode_product: factor column count mismatch");
  Shape shape = a.shape();
  shape[static_cast<std::size_t>(mode)] = l.rows;
  DenseTensor<T> out(shape);
  std::vector<Index> idx(shape.size(), 0);
  do {
    T s(0);
    std::vector<Index> src(idx);
    for (Index j = 0; j < l.cols; ++j) {
      src[static_cast<std::size_t>(mode)] = j;
      const T& lij = l(idx[static_cast<std::size_t>(mode)], j);
      if (!(lij == T(0))) s += lij * a.at(src);
    }
    out.at(idx) = s;
  } while (next_index(idx, shape));
  return out;
}

// Multilinear multiplication (L_1,…,L_k)·A, computed as successive mode products.
template <class T>
DenseTensor<T> mmm(const DenseTensor<T>& a, const MultilinearMap<T>& m) {
  if (m.order() != a.order())
    throw std::invalid_argument("mmm: map order does not match tensor order");
  DenseTensor<T> cur = a;
  for (int mode = 0; mode < a.order(); ++mode)
    cur = mode_product(cur, m.factors[static_cast<std::size_t>(mode)], mode);
  return cur;
}

// Mode-i unfolding: d_i × prod_{j≠i} d_j matrix whose columns are the mode-i
// fibers. Column order is fixed project-wide: row-major over the remaining
// indices in increasing mode order.
template <class T>
Mat<T> flatten(const DenseTensor<T>& a, int mode) {
  if (mode < 0 || mode >= a.order())
    throw std::invalid_argument("flatten: mode out of range");
  Index ncols = 1;
  for (int m = 0; m < a.order(); ++m)
    if (m != mode) ncols *= a.dim(m);
  Mat<T> out(a.dim(mode), ncols);

  Shape rest_shape;
  std::vector<int> rest_modes;
  for (int m = 0; m < a.order(); ++m)
    if (m != mode) {
      rest_shape.push_back(a.dim(m));
      rest_modes.push_back(m);
    }

  std::vector<Index> rest(rest_shape.size(), 0);
  std::vector<Index> idx(a.shape().size(), 0);
  Index col = 0;
  if (rest_shape.empty()) rest_shape.push_back(1);  // order-1 tensor: single column
  do {
    for (std::size_t m = 0; m < rest_modes.size(); ++m)
      idx[static_cast<std::size_t>(rest_modes[m])] = rest[m];
    for (Index r = 0; r < a.dim(mode); ++r) {
      idx[static_cast<std::size_t>(mode)] = r;
      out(r, col) = a.at(idx);
    }
    ++col;
  } while (next_index(rest, rest_shape));
  return out;
}

// Multilinear rank: the tuple of flattening ranks (r_1,…,r_k).
struct MlRank {
  std::vector<Index> ranks;

  MlRank() = default;
  explicit MlRank(std::vector<Index> r) : ranks(std::move(r)) {}
  MlRank(std::initializer_list<Index> r) : ranks(r) {}

  bool operator==(const MlRank& o) const { return ranks == o.ranks; }

  bool all_at_most(Index bound) const {
    for (Index r : ranks)
      if (r > bound) return false;
    return true;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      if (i) os << ',';
      os << ranks[i];
    }
    os << ')';
    return os.str();
  }
};

template <class T>
MlRank mrank(const DenseTensor<T>& a, double tol = defaults::rank_tol) {
  std::vector<Index> r;
  r.reserve(static_cast<std::size_t>(a.order()));
  for (int mode = 0; mode < a.order(); ++mode)
    r.push_back(matrix_rank_tol(flatten(a, mode), tol));
  return MlRank(std::move(r));
}

}  // namespace tenrank

#endif  // TENRANK_MULTILINEAR_HPP
