#ifndef TENRANK_CONSTRUCTIONS_HPP
#define TENRANK_CONSTRUCTIONS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tenrank/multilinear.hpp"
#include "tenrank/orbit222.hpp"
#include "tenrank/scalar.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// Rank labels attached to generated sequences. Labels are either re-verified
// by this library's own 2×2×2 orbit classifier (possible whenever the
// construction compresses to a 2×2×2 core) or asserted from known rank theory
// that the library cannot re-check; the tag keeps the two kinds apart.
enum class RankProvenance { verified_in_2x2x2, asserted_external };

inline const char* to_string(RankProvenance p) {
  return p == RankProvenance::verified_in_2x2x2 ? "verified-in-2x2x2" : "asserted-external";
}

// One weighted rank-1 term of a CP decomposition: weight · v_1 ⊗ … ⊗ v_k.
template <class T>
struct CpTerm {
  T weight;
  std::vector<Vec<T>> vectors;
};

template <class T>
DenseTensor<T> evaluate_cp(const std::vector<CpTerm<T>>& terms, const Shape& shape) {
  DenseTensor<T> out(shape);
  for (const CpTerm<T>& term : terms) {
    if (static_cast<int>(term.vectors.size()) != out.order())
      throw std::invalid_argument("evaluate_cp: term order does not match shape");
    for (std::size_t m = 0; m < term.vectors.size(); ++m)
      if (static_cast<Index>(term.vectors[m].size()) != shape[m])
        throw std::invalid_argument("evaluate_cp: term vector length does not match shape");
    out = out + scale(outer_product(term.vectors), term.weight);
  }
  return out;
}

// One member of a generated sequence, together with the explicit CP
// decomposition certifying its rank upper bound.
template <class T>
struct SequenceElement {
  DenseTensor<T> tensor;
  std::vector<CpTerm<T>> witness;
};

// A tensor sequence A_n → A whose elements have low rank but whose limit
// jumps to a higher one. The element generator is pure in n; rank labels for
// the limit carry their provenance tag.
template <class T>
struct SequenceHandle {
  std::function<SequenceElement<T>(long)> element;  // defined for 1 ≤ n (≤ max_n if set)
  DenseTensor<T> limit;
  Index element_rank_bound = 0;  // rank(A_n) ≤ this, certified by the witness
  Index limit_rank = 0;
  RankProvenance limit_rank_provenance = RankProvenance::verified_in_2x2x2;
  long max_n = 0;  // 0 means unbounded
};

namespace detail {

inline void check_sequence_index(long n, long max_n) {
  if (n < 1) throw std::invalid_argument("sequence index must be at least 1");
  if (max_n > 0 && n > max_n)
    throw std::invalid_argument("sequence index exceeds the handle's declared range");
}

template <class T>
Vec<T> vec_axpy(const Vec<T>& x, const Vec<T>& y, const T& c) {
  Vec<T> out(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * y[i];
  return out;
}

// Places v inside a zero vector of length dim starting at offset.
template <class T>
Vec<T> embed_vec(const Vec<T>& v, Index dim, Index offset) {
  Vec<T> out(static_cast<std::size_t>(dim), T(0));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(offset) + i] = v[i];
  return out;
}

}  // namespace detail

// The three-term boundary tensor x1⊗x2⊗y3 + x1⊗y2⊗x3 + y1⊗x2⊗x3. When each
// pair (xi, yi) is linearly independent this has rank 3 yet is a limit of
// rank-2 tensors (class D3 after compression); with any dependent pair the
// rank drops to 2 or below.
template <class T>
DenseTensor<T> dsl_tensor(const Vec<T>& x1, const Vec<T>& y1, const Vec<T>& x2,
                          const Vec<T>& y2, const Vec<T>& x3, const Vec<T>& y3) {
  if (x1.size() != y1.size() || x2.size() != y2.size() || x3.size() != y3.size())
    throw std::invalid_argument("dsl_tensor: paired vectors must have equal dimension");
  DenseTensor<T> a = outer_product<T>({x1, x2, y3});
  a = a + outer_product<T>({x1, y2, x3});
  a = a + outer_product<T>({y1, x2, x3});
  return a;
}

// The rank-2 sequence A_n = n(x1+y1/n)⊗(x2+y2/n)⊗(x3+y3/n) − n·x1⊗x2⊗x3
// converging to dsl_tensor. The error obeys ‖A_n − A‖ ≤ C1/n + C2/n² with
// C1 = ‖y1⊗y2⊗x3 + y1⊗x2⊗y3 + x1⊗y2⊗y3‖ and C2 = ‖y1⊗y2⊗y3‖.
template <class T>
SequenceHandle<T> dsl_sequence(const Vec<T>& x1, const Vec<T>& y1, const Vec<T>& x2,
                               const Vec<T>& y2, const Vec<T>& x3, const Vec<T>& y3) {
  SequenceHandle<T> h;
  h.limit = dsl_tensor(x1, y1, x2, y2, x3, y3);
  h.element_rank_bound = 2;
  // The limit compresses to a 2×2×2 core, so its rank label can be
  // re-verified internally instead of trusted.
  OrbitReport<T> rep = classify_general(h.limit).value();
  h.limit_rank = rep.outer_rank;
  h.limit_rank_provenance = RankProvenance::verified_in_2x2x2;
  Shape shape = h.limit.shape();
  h.element = [=](long n) {
    detail::check_sequence_index(n, 0);
    T nn = ScalarTraits<T>::from_long(n);
    T inv = T(1) / nn;
    SequenceElement<T> el;
    el.witness.push_back(
        {nn, {detail::vec_axpy(x1, y1, inv), detail::vec_axpy(x2, y2, inv),
              detail::vec_axpy(x3, y3, inv)}});
    el.witness.push_back({-nn, {x1, x2, x3}});
    el.tensor = evaluate_cp(el.witness, shape);
    return el;
  };
  return h;
}

// x^{⊗k}.
template <class T>
DenseTensor<T> veronese(const Vec<T>& x, int k) {
  if (k < 1) throw std::invalid_argument("veronese: order must be at least 1");
  return outer_product(std::vector<Vec<T>>(static_cast<std::size_t>(k), x));
}

// Symmetric order-k tensor built from a base vector and exponent-weighted
// direction vectors; see leibniz_tensor.
template <class T>
struct LeibnizSpec {
  int k = 3;                       // tensor order
  std::vector<int> exponents;      // a_1..a_j, each ≥ 1
  Vec<T> base;                     // x
  std::vector<Vec<T>> directions;  // y_1..y_j

  int total_exponent() const {
    int a = 0;
    for (int e : exponents) a += e;
    return a;
  }

  void validate() const {
    if (k < 3) throw std::invalid_argument("leibniz: order must be at least 3");
    if (base.empty()) throw std::invalid_argument("leibniz: empty base vector");
    if (exponents.size() != directions.size())
      throw std::invalid_argument("leibniz: exponent/direction count mismatch");
    for (int e : exponents)
      if (e < 1) throw std::invalid_argument("leibniz: exponents must be positive");
    for (const auto& y : directions)
      if (y.size() != base.size())
        throw std::invalid_argument("leibniz: direction dimension mismatch");
    if (total_exponent() > k)
      throw std::invalid_argument("leibniz: total exponent exceeds the order");
  }

  // Number of terms in the limit tensor: k! / ((k−a)!·a_1!⋯a_j!).
  long limit_term_count() const {
    long count = 1;
    int used = 0;
    // Multinomial coefficient accumulated as a product of binomials.
    auto binom = [](int n, int r) {
      long b = 1;
      for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
      return b;
    };
    for (int e : exponents) {
      used += e;
      count *= binom(k - total_exponent() + used, e);
    }
    return count;
  }

  // Number of Veronese points in the difference quotient: ∏(a_i+1).
  long quotient_term_count() const {
    long count = 1;
    for (int e : exponents) count *= e + 1;
    return count;
  }
};

// L_k(a_1,…,a_j): the sum of x^{⊗(k−a)}⊗y_1^{⊗a_1}⊗…⊗y_j^{⊗a_j} over all
// distinct assignments of the factors to the k modes. L_3(1) coincides with
// dsl_tensor(x,y,x,y,x,y).
template <class T>
DenseTensor<T> leibniz_tensor(const LeibnizSpec<T>& spec) {
  spec.validate();
  // Multiset of factor labels, 0 for x and i for y_i; next_permutation over
  // the sorted start enumerates each distinct arrangement exactly once.
  std::vector<int> labels;
  labels.insert(labels.end(), static_cast<std::size_t>(spec.k - spec.total_exponent()), 0);
  for (std::size_t i = 0; i < spec.exponents.size(); ++i)
    labels.insert(labels.end(), static_cast<std::size_t>(spec.exponents[i]),
                  static_cast<int>(i) + 1);

  Shape shape(static_cast<std::size_t>(spec.k), static_cast<Index>(spec.base.size()));
  DenseTensor<T> out(shape);
  do {
    std::vector<Vec<T>> factors;
    factors.reserve(labels.size());
    for (int label : labels)
      factors.push_back(label == 0 ? spec.base : spec.directions[static_cast<std::size_t>(label) - 1]);
    out = out + outer_product(factors);
  } while (std::next_permutation(labels.begin(), labels.end()));
  return out;
}

// Finite-difference approximation of leibniz_tensor with step t: the
// tensor-product forward-difference stencil applied to the Veronese points
// V_k(x + tΣ m_i y_i), divided by ∏a_i!·t^a. Error is O(t) as t → 0; the
// evaluation uses ∏(a_i+1) points.
template <class T>
DenseTensor<T> leibniz_quotient(const LeibnizSpec<T>& spec, const T& t) {
  spec.validate();
  if (t == T(0)) throw std::invalid_argument("leibniz_quotient: step must be nonzero");

  auto binom_long = [](int n, int r) {
    long b = 1;
    for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
  };

  Shape shape(static_cast<std::size_t>(spec.k), static_cast<Index>(spec.base.size()));
  DenseTensor<T> acc(shape);
  Shape grid;
  for (int e : spec.exponents) grid.push_back(static_cast<Index>(e) + 1);
  if (grid.empty()) return veronese(spec.base, spec.k);

  std::vector<Index> m(grid.size(), 0);
  do {
    long coeff_abs = 1;
    int parity = 0;
    Vec<T> point = spec.base;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      coeff_abs *= binom_long(spec.exponents[i], static_cast<int>(m[i]));
      parity += spec.exponents[i] - static_cast<int>(m[i]);
      if (m[i] != 0) {
        // Force the product into a plain scalar: exact backends with lazy
        // expression templates would otherwise derail template deduction.
        T step = t * ScalarTraits<T>::from_long(m[i]);
        point = detail::vec_axpy(point, spec.directions[i], step);
      }
    }
    T coeff = ScalarTraits<T>::from_long(parity % 2 ? -coeff_abs : coeff_abs);
    acc = acc + scale(veronese(point, spec.k), coeff);
  } while (next_index(m, grid));

  long fact = 1;
  for (int e : spec.exponents)
    for (int i = 2; i <= e; ++i) fact *= i;
  T denom = ScalarTraits<T>::from_long(fact);
  for (int i = 0; i < spec.total_exponent(); ++i) denom *= t;
  T inv_denom = T(1) / denom;
  return scale(acc, inv_denom);
}

// Diagonal tensor of the given order with r ones along the superdiagonal; the
// standard representative of an order-k tensor of rank exactly r.
template <class T>
DenseTensor<T> diagonal_tensor(Index r, int order) {
  if (r < 1) throw std::invalid_argument("diagonal_tensor: size must be positive");
  if (order < 1) throw std::invalid_argument("diagonal_tensor: order must be positive");
  DenseTensor<T> a(Shape(static_cast<std::size_t>(order), r));
  for (Index i = 0; i < r; ++i) a.at(std::vector<Index>(static_cast<std::size_t>(order), i)) = T(1);
  return a;
}

// Σ_j x_j^{(1)}⊗…⊗x_j^{(k)} with each mode's vector list linearly
// independent, which pins the rank at exactly r (and the multilinear rank at
// (r,…,r)).
template <class T>
DenseTensor<T> build_diag_rank(const std::vector<std::vector<Vec<T>>>& lists,
                               double tol = defaults::rank_tol) {
  if (lists.empty()) throw std::invalid_argument("build_diag_rank: no modes given");
  std::size_t r = lists[0].size();
  if (r == 0) throw std::invalid_argument("build_diag_rank: empty vector lists");
  for (std::size_t mode = 0; mode < lists.size(); ++mode) {
    const auto& list = lists[mode];
    if (list.size() != r)
      throw std::invalid_argument("build_diag_rank: modes disagree on the number of vectors");
    Mat<T> stacked(static_cast<Index>(r), static_cast<Index>(list[0].size()));
    for (std::size_t j = 0; j < r; ++j) {
      if (list[j].size() != list[0].size())
        throw std::invalid_argument("build_diag_rank: ragged vector list");
      for (std::size_t c = 0; c < list[j].size(); ++c)
        stacked(static_cast<Index>(j), static_cast<Index>(c)) = list[j][c];
    }
    if (matrix_rank_tol(stacked, tol) != static_cast<Index>(r))
      throw std::invalid_argument("build_diag_rank: vector list for mode " +
                                  std::to_string(mode + 1) + " is linearly dependent");
  }
  Shape shape;
  for (const auto& list : lists) shape.push_back(static_cast<Index>(list[0].size()));
  DenseTensor<T> out(shape);
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<Vec<T>> factors;
    factors.reserve(lists.size());
    for (const auto& list : lists) factors.push_back(list[j]);
    out = out + outer_product(factors);
  }
  return out;
}

namespace detail {

// Shared core of the rank-jump constructions: a diagonal block of size
// diag_r (possibly absent) direct-summed with copies of the unit-vector
// boundary sequence in 2×2×2. Returns the order-3 handle on shape side×side×side
// with side = diag_r + 2·copies; witnesses are embedded by block offset.
template <class T>
SequenceHandle<T> block_boundary_sequence(Index diag_r, Index copies) {
  const Vec<T> e1{T(1), T(0)};
  const Vec<T> e2{T(0), T(1)};
  DenseTensor<T> unit_limit = dsl_tensor(e1, e2, e1, e2, e1, e2);

  SequenceHandle<T> h;
  h.limit = diag_r > 0 ? diagonal_tensor<T>(diag_r, 3) : unit_limit;
  if (diag_r > 0) h.limit = direct_sum(h.limit, unit_limit);
  for (Index c = 1; c < copies; ++c) h.limit = direct_sum(h.limit, unit_limit);

  Index side = diag_r + 2 * copies;
  Shape shape{side, side, side};
  h.element = [=](long n) {
    SequenceElement<T> el;
    T nn = ScalarTraits<T>::from_long(n);
    T inv = T(1) / nn;
    for (Index i = 0; i < diag_r; ++i) {
      Vec<T> e = embed_vec(Vec<T>{T(1)}, side, i);
      el.witness.push_back({T(1), {e, e, e}});
    }
    for (Index c = 0; c < copies; ++c) {
      Index off = diag_r + 2 * c;
      Vec<T> u = embed_vec(vec_axpy(e1, e2, inv), side, off);
      Vec<T> x = embed_vec(e1, side, off);
      el.witness.push_back({nn, {u, u, u}});
      el.witness.push_back({-nn, {x, x, x}});
    }
    el.tensor = evaluate_cp(el.witness, shape);
    return el;
  };
  return h;
}

}  // namespace detail

// Sequence B_n of rank ≤ r whose limit has rank r+s: a diagonal block of rank
// r−2s direct-summed with s copies of the boundary sequence. The limit's rank
// label rests on additivity of rank over direct sums, which this library does
// not re-verify except in the single-copy 2×2×2 case.
template <class T>
SequenceHandle<T> gap_sequence(Index r, Index s, long n_max = 0) {
  if (s < 1 || r < 2 * s)
    throw std::invalid_argument("gap_sequence: need r >= 2s and s >= 1");
  SequenceHandle<T> h = detail::block_boundary_sequence<T>(r - 2 * s, s);
  h.element_rank_bound = r;
  h.limit_rank = r + s;
  h.max_n = n_max;
  if (r == 2 && s == 1) {
    // Pure 2×2×2 boundary case: the classifier itself certifies rank 3.
    h.limit_rank_provenance = RankProvenance::verified_in_2x2x2;
  } else {
    h.limit_rank_provenance = RankProvenance::asserted_external;
  }
  auto base = h.element;
  long max_n = n_max;
  h.element = [=](long n) {
    detail::check_sequence_index(n, max_n);
    return base(n);
  };
  return h;
}

// A rank-(r+1) tensor of the requested shape arising as the limit of rank-r
// tensors: diagonal block of rank r−2 plus the boundary core, embedded into
// the first three modes and tensored with unit vectors for any further modes.
template <class T>
SequenceHandle<T> rank_plus_one_instance(const Shape& shape, Index r) {
  if (shape.size() < 3)
    throw std::invalid_argument("rank_plus_one_instance: order must be at least 3");
  Index min_dim = shape[0];
  for (Index d : shape) {
    if (d < 2) throw std::invalid_argument("rank_plus_one_instance: dimensions must be at least 2");
    min_dim = std::min(min_dim, d);
  }
  if (r < 2 || r > min_dim)
    throw std::invalid_argument("rank_plus_one_instance: need 2 <= r <= min dimension");

  SequenceHandle<T> core = detail::block_boundary_sequence<T>(r - 2, 1);
  Shape first3{shape[0], shape[1], shape[2]};

  // Lift an order-3 element to the requested shape: pad the first three modes
  // and append unit-vector modes beyond them.
  auto lift_tensor = [shape, first3](const DenseTensor<T>& a) {
    DenseTensor<T> out = embed_pad(a, first3);
    for (std::size_t m = 3; m < shape.size(); ++m) {
      DenseTensor<T> unit(Shape{shape[m]});
      unit.at({0}) = T(1);
      out = tensor_otimes(out, unit);
    }
    return out;
  };
  auto lift_witness = [shape](const std::vector<CpTerm<T>>& terms) {
    std::vector<CpTerm<T>> out;
    out.reserve(terms.size());
    for (const CpTerm<T>& term : terms) {
      CpTerm<T> lifted{term.weight, {}};
      for (std::size_t m = 0; m < 3; ++m)
        lifted.vectors.push_back(detail::embed_vec(term.vectors[m], shape[m], 0));
      for (std::size_t m = 3; m < shape.size(); ++m) {
        Vec<T> unit(static_cast<std::size_t>(shape[m]), T(0));
        unit[0] = T(1);
        lifted.vectors.push_back(std::move(unit));
      }
      out.push_back(std::move(lifted));
    }
    return out;
  };

  SequenceHandle<T> h;
  h.limit = lift_tensor(core.limit);
  h.element_rank_bound = r;
  h.limit_rank = r + 1;
  bool plain_boundary = (r == 2 && shape == Shape{2, 2, 2});
  h.limit_rank_provenance =
      plain_boundary ? RankProvenance::verified_in_2x2x2 : RankProvenance::asserted_external;
  auto core_element = core.element;
  h.element = [=](long n) {
    detail::check_sequence_index(n, 0);
    SequenceElement<T> el3 = core_element(n);
    SequenceElement<T> el;
    el.witness = lift_witness(el3.witness);
    el.tensor = lift_tensor(el3.tensor);
    return el;
  };
  return h;
}

// Random member of a given orbit: an integer map (L,M,N) with entries in
// [−3,3] and nonzero determinants applied to the canonical representative.
// Entries come straight from the engine output so samples are identical
// across platforms and scalar types.
template <class T>
std::pair<DenseTensor<T>, MultilinearMap<T>> random_orbit_sample(OrbitClass cls,
                                                                 std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  auto draw = [&engine]() {
    for (;;) {
      Mat<T> m(2, 2);
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
          m(i, j) = T(static_cast<int>(engine() % 7) - 3);
      if (!(determinant(m) == T(0))) return m;
    }
  };
  Mat<T> l = draw(), mm = draw(), n = draw();
  MultilinearMap<T> g({l, mm, n});
  return {mmm(canonical<T>(cls), g), g};
}

}  // namespace tenrank

#endif  // TENRANK_CONSTRUCTIONS_HPP
