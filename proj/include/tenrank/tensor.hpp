#ifndef TENRANK_TENSOR_HPP
#define TENRANK_TENSOR_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tenrank/scalar.hpp"

namespace tenrank {

using Index = std::int64_t;
using Shape = std::vector<Index>;

template <class T>
using Vec = std::vector<T>;

inline Index shape_size(const Shape& shape) {
  Index n = 1;
  for (Index d : shape) n *= d;
  return n;
}

inline void check_shape_valid(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor order must be at least 1");
  for (Index d : shape)
    if (d < 1) throw std::invalid_argument("tensor dimensions must be positive");
}

// Advances a multi-index through a shape in row-major order (last index fastest).
// Returns false after the last index wraps around to all zeros.
inline bool next_index(std::vector<Index>& idx, const Shape& shape) {
  for (int m = static_cast<int>(shape.size()) - 1; m >= 0; --m) {
    if (++idx[m] < shape[m]) return true;
    idx[m] = 0;
  }
  return false;
}

// Dense k-way array over double or Rational entries, stored row-major with the
// last index fastest. Values are immutable in spirit: operations below are pure
// functions; mutation is only used while building a tensor.
template <class T>
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape_valid(shape_);
    data_.assign(static_cast<std::size_t>(shape_size(shape_)), T(0));
  }

  DenseTensor(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape_valid(shape_);
    if (static_cast<Index>(data_.size()) != shape_size(shape_))
      throw std::invalid_argument("tensor data length does not match shape");
  }

  int order() const { return static_cast<int>(shape_.size()); }
  const Shape& shape() const { return shape_; }
  Index dim(int mode) const { return shape_.at(static_cast<std::size_t>(mode)); }
  Index size() const { return static_cast<Index>(data_.size()); }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  Index offset_of(const std::vector<Index>& idx) const {
    if (static_cast<int>(idx.size()) != order())
      throw std::invalid_argument("index arity does not match tensor order");
    Index off = 0;
    for (int m = 0; m < order(); ++m) {
      if (idx[m] < 0 || idx[m] >= shape_[m])
        throw std::out_of_range("tensor index out of range");
      off = off * shape_[m] + idx[m];
    }
    return off;
  }

  const T& at(const std::vector<Index>& idx) const {
    return data_[static_cast<std::size_t>(offset_of(idx))];
  }
  T& at(const std::vector<Index>& idx) {
    return data_[static_cast<std::size_t>(offset_of(idx))];
  }

  template <class... Is>
  const T& operator()(Is... is) const {
    return at(std::vector<Index>{static_cast<Index>(is)...});
  }
  template <class... Is>
  T& operator()(Is... is) {
    return at(std::vector<Index>{static_cast<Index>(is)...});
  }

  bool operator==(const DenseTensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <class T>
inline void check_same_shape(const DenseTensor<T>& a, const DenseTensor<T>& b,
                             const char* what) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(what) + ": tensor shapes differ");
}

template <class T>
DenseTensor<T> operator+(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  check_same_shape(a, b, "tensor sum");
  DenseTensor<T> c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

template <class T>
DenseTensor<T> operator-(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  check_same_shape(a, b, "tensor difference");
  DenseTensor<T> c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

template <class T>
DenseTensor<T> scale(const DenseTensor<T>& a, const T& c) {
  DenseTensor<T> out = a;
  for (T& x : out.data()) x *= c;
  return out;
}

// x_1 ⊗ … ⊗ x_k: the decomposable tensor with entries prod_i x_i[j_i].
template <class T>
DenseTensor<T> outer_product(const std::vector<Vec<T>>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("outer_product of no vectors");
  Shape shape;
  for (const auto& v : vectors) {
    if (v.empty()) throw std::invalid_argument("outer_product with an empty vector");
    shape.push_back(static_cast<Index>(v.size()));
  }
  DenseTensor<T> out(shape);
  std::vector<Index> idx(shape.size(), 0);
  Index off = 0;
  do {
    T p = vectors[0][static_cast<std::size_t>(idx[0])];
    for (std::size_t m = 1; m < vectors.size(); ++m)
      p *= vectors[m][static_cast<std::size_t>(idx[m])];
    out.data()[static_cast<std::size_t>(off++)] = p;
  } while (next_index(idx, shape));
  return out;
}

// Tensor product of two tensors: order k+l, entries a[I]*b[J]. With row-major
// storage the result is the flat outer product of the two data arrays.
template <class T>
DenseTensor<T> tensor_otimes(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  Shape shape = a.shape();
  shape.insert(shape.end(), b.shape().begin(), b.shape().end());
  std::vector<T> data;
  data.reserve(a.data().size() * b.data().size());
  for (const T& x : a.data())
    for (const T& y : b.data()) data.push_back(x * y);
  return DenseTensor<T>(std::move(shape), std::move(data));
}

// Direct sum: shape (d_i + c_i); A occupies the leading block, B the trailing
// block, and every mixed index is zero.
template <class T>
DenseTensor<T> direct_sum(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  if (a.order() != b.order())
    throw std::invalid_argument("direct_sum: tensor orders differ");
  Shape shape(a.shape());
  for (int m = 0; m < a.order(); ++m) shape[m] += b.dim(m);
  DenseTensor<T> out(shape);

  std::vector<Index> idx(a.order(), 0);
  do {
    out.at(idx) = a.at(idx);
  } while (next_index(idx, a.shape()));

  idx.assign(b.order(), 0);
  do {
    std::vector<Index> shifted(idx);
    for (int m = 0; m < b.order(); ++m) shifted[m] += a.dim(m);
    out.at(shifted) = b.at(idx);
  } while (next_index(idx, b.shape()));
  return out;
}

// Mode permutation: entry (j_1,…,j_k) of the output with j_{perm[m]} = i_m equals
// entry (i_1,…,i_k) of the input. perm is 0-based.
template <class T>
DenseTensor<T> permute_modes(const DenseTensor<T>& a, const std::vector<int>& perm) {
  const int k = a.order();
  if (static_cast<int>(perm.size()) != k)
    throw std::invalid_argument("permute_modes: permutation arity mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    if (p < 0 || p >= k || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("permute_modes: not a permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  Shape shape(a.shape().size());
  for (int m = 0; m < k; ++m) shape[static_cast<std::size_t>(perm[m])] = a.dim(m);
  DenseTensor<T> out(shape);
  std::vector<Index> idx(a.shape().size(), 0), jdx(a.shape().size(), 0);
  do {
    for (int m = 0; m < k; ++m) jdx[static_cast<std::size_t>(perm[m])] = idx[m];
    out.at(jdx) = a.at(idx);
  } while (next_index(idx, a.shape()));
  return out;
}

// Canonical embedding A ↦ A ⊕ 0: A in the leading block of the larger shape.
template <class T>
DenseTensor<T> embed_pad(const DenseTensor<T>& a, const Shape& new_shape) {
  if (static_cast<int>(new_shape.size()) != a.order())
    throw std::invalid_argument("embed_pad: order mismatch");
  for (int m = 0; m < a.order(); ++m)
    if (new_shape[m] < a.dim(m))
      throw std::invalid_argument("embed_pad: new shape must not shrink any mode");
  DenseTensor<T> out(new_shape);
  std::vector<Index> idx(a.shape().size(), 0);
  do {
    out.at(idx) = a.at(idx);
  } while (next_index(idx, a.shape()));
  return out;
}

// Frobenius inner product <A,B> = sum of entrywise products.
template <class T>
T frobenius(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  check_same_shape(a, b, "frobenius");
  T s(0);
  for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

template <class T>
T frobenius_norm_squared(const DenseTensor<T>& a) {
  return frobenius(a, a);
}

// ‖A‖_F as a double; for rational tensors this is the square root of the exact
// squared norm, rounded once at the end.
template <class T>
double frobenius_norm(const DenseTensor<T>& a) {
  return std::sqrt(to_double(frobenius_norm_squared(a)));
}

template <class T>
bool is_zero_tensor(const DenseTensor<T>& a) {
  for (const T& x : a.data())
    if (!(x == T(0))) return false;
  return true;
}

template <class T>
DenseTensor<T> zeros_like(const DenseTensor<T>& a) {
  return DenseTensor<T>(a.shape());
}

// Entrywise conversion to the double backend (exact for small integers, rounded
// otherwise); used by reports and by float-mode cross-checks.
inline DenseTensor<double> to_double_tensor(const DenseTensor<Rational>& a) {
  std::vector<double> data;
  data.reserve(a.data().size());
  for (const Rational& q : a.data()) data.push_back(q.get_d());
  return DenseTensor<double>(a.shape(), std::move(data));
}

inline DenseTensor<Rational> to_rational_tensor(const DenseTensor<double>& a) {
  std::vector<Rational> data;
  data.reserve(a.data().size());
  for (double x : a.data()) data.emplace_back(x);
  return DenseTensor<Rational>(a.shape(), std::move(data));
}

}  // namespace tenrank

#endif  // TENRANK_TENSOR_HPP
