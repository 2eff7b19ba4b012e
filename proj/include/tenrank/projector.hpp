#ifndef TENRANK_PROJECTOR_HPP
#define TENRANK_PROJECTOR_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tenrank/matrix.hpp"
#include "tenrank/multilinear.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// Basis of the mode-m fiber span, returned as a d_m × r matrix with the basis
// vectors as columns. Exact scalars use the pivot columns of the unfolding;
// floating point uses left singular vectors, which are orthonormal.
template <class T>
Mat<T> support_basis(const DenseTensor<T>& a, int mode, double tol = defaults::rank_tol) {
  Mat<T> f = flatten(a, mode);
  if constexpr (ScalarTraits<T>::is_exact) {
    EchelonResult<T> ech = row_echelon(f);
    Mat<T> b(f.rows, static_cast<Index>(ech.pivot_cols.size()));
    for (std::size_t j = 0; j < ech.pivot_cols.size(); ++j)
      for (Index i = 0; i < f.rows; ++i) b(i, static_cast<Index>(j)) = f(i, ech.pivot_cols[j]);
    return b;
  } else {
    Eigen::MatrixXd m = to_eigen(f);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? tol * sv(0) * static_cast<double>(std::max(f.rows, f.cols)) : 0.0;
    Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff) ++r;
    Mat<T> b(f.rows, r);
    for (Index i = 0; i < f.rows; ++i)
      for (Index j = 0; j < r; ++j) b(i, j) = svd.matrixU()(i, j);
    return b;
  }
}

// Extends the columns of b to span at least `target` dimensions by appending
// standard basis vectors in index order, keeping only those that enlarge the
// span. Deterministic, and keeps exact inputs exact.
template <class T>
Mat<T> complete_basis(const Mat<T>& b, Index target, double tol = defaults::rank_tol) {
  if (target > b.rows)
    throw std::invalid_argument("complete_basis: target exceeds ambient dimension");
  Mat<T> cur = b;
  Index rank = matrix_rank_tol(cur, tol);
  for (Index e = 0; e < b.rows && rank < target; ++e) {
    Mat<T> trial(cur.rows, cur.cols + 1);
    for (Index i = 0; i < cur.rows; ++i) {
      for (Index j = 0; j < cur.cols; ++j) trial(i, j) = cur(i, j);
      trial(i, cur.cols) = T(i == e ? 1 : 0);
    }
    Index trial_rank = matrix_rank_tol(trial, tol);
    if (trial_rank > rank) {
      cur = trial;
      rank = trial_rank;
    }
  }
  if (rank < target)
    throw std::runtime_error("complete_basis: could not reach target dimension");
  return cur;
}

// Extends orthonormal columns to `target` columns by Gram–Schmidt against the
// standard basis vectors in index order, keeping a candidate only when its
// residual is numerically nonzero. Float-only counterpart of complete_basis.
inline Mat<double> gram_schmidt_complete(const Mat<double>& b, Index target,
                                         double tol = defaults::unit_tol) {
  if (target > b.rows)
    throw std::invalid_argument("gram_schmidt_complete: target exceeds ambient dimension");
  Mat<double> cur = b;
  for (Index e = 0; e < b.rows && cur.cols < target; ++e) {
    std::vector<double> v(static_cast<std::size_t>(b.rows), 0.0);
    v[static_cast<std::size_t>(e)] = 1.0;
    for (Index j = 0; j < cur.cols; ++j) {
      double dot = 0.0;
      for (Index i = 0; i < cur.rows; ++i) dot += cur(i, j) * v[static_cast<std::size_t>(i)];
      for (Index i = 0; i < cur.rows; ++i) v[static_cast<std::size_t>(i)] -= dot * cur(i, j);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm <= tol) continue;
    Mat<double> next(cur.rows, cur.cols + 1);
    for (Index i = 0; i < cur.rows; ++i) {
      for (Index j = 0; j < cur.cols; ++j) next(i, j) = cur(i, j);
      next(i, cur.cols) = v[static_cast<std::size_t>(i)] / norm;
    }
    cur = next;
  }
  if (cur.cols < target)
    throw std::runtime_error("gram_schmidt_complete: could not reach target dimension");
  return cur;
}

// Orthogonal projector onto the column span of b: P = B (BᵀB)⁻¹ Bᵀ.
// Exact over rationals; over doubles B is orthonormal so BᵀB is near identity.
template <class T>
Mat<T> projector_onto(const Mat<T>& b) {
  if (b.cols == 0) {
    Mat<T> zero(b.rows, b.rows);
    return zero;
  }
  Mat<T> bt = transpose(b);
  Mat<T> gram = mat_mul(bt, b);
  Mat<T> inv_gram = inverse(gram);
  return mat_mul(mat_mul(b, inv_gram), bt);
}

// Orthogonal projector onto the mode-m fiber span of a.
template <class T>
Mat<T> supporting_projector(const DenseTensor<T>& a, int mode, double tol = defaults::rank_tol) {
  return projector_onto(support_basis(a, mode, tol));
}

// All supporting projectors of a, as a multilinear map (P_1,…,P_k).
template <class T>
MultilinearMap<T> supporting_projectors(const DenseTensor<T>& a, double tol = defaults::rank_tol) {
  std::vector<Mat<T>> p;
  p.reserve(static_cast<std::size_t>(a.order()));
  for (int mode = 0; mode < a.order(); ++mode)
    p.push_back(supporting_projector(a, mode, tol));
  return MultilinearMap<T>(std::move(p));
}

// Projects b onto the support of a in every mode: (P_1,…,P_k)·b. Projecting a
// tensor onto its own support leaves it fixed.
template <class T>
DenseTensor<T> project_onto_support(const DenseTensor<T>& a, const DenseTensor<T>& b,
                                    double tol = defaults::rank_tol) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("project_onto_support: shape mismatch");
  return mmm(b, supporting_projectors(a, tol));
}

}  // namespace tenrank

#endif  // TENRANK_PROJECTOR_HPP
