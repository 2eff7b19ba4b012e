#ifndef TENRANK_ORBIT222_HPP
#define TENRANK_ORBIT222_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "tenrank/defaults.hpp"
#include "tenrank/matrix.hpp"
#include "tenrank/multilinear.hpp"
#include "tenrank/projector.hpp"
#include "tenrank/scalar.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// The eight GL(2)×GL(2)×GL(2) orbits of real 2×2×2 tensors. Every such tensor
// is equivalent to exactly one canonical representative below; the letter is G
// for the two open (full-measure) orbits and D for the degenerate ones, with
// the subscript giving the tensor rank.
enum class OrbitClass { D0, D1, D2, D2p, D2pp, G2, D3, G3 };

inline constexpr std::array<OrbitClass, 8> all_orbit_classes = {
    OrbitClass::D0, OrbitClass::D1,  OrbitClass::D2, OrbitClass::D2p,
    OrbitClass::D2pp, OrbitClass::G2, OrbitClass::D3, OrbitClass::G3};

inline const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::D0: return "D0";
    case OrbitClass::D1: return "D1";
    case OrbitClass::D2: return "D2";
    case OrbitClass::D2p: return "D2p";
    case OrbitClass::D2pp: return "D2pp";
    case OrbitClass::G2: return "G2";
    case OrbitClass::D3: return "D3";
    case OrbitClass::G3: return "G3";
  }
  throw std::logic_error("to_string: invalid OrbitClass");
}

inline std::optional<OrbitClass> orbit_class_from_string(const std::string& s) {
  for (OrbitClass c : all_orbit_classes)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

// Per-class invariants. The hyperdeterminant sign, multilinear rank, tensor
// rank, and border rank are constants of the orbit.
inline int delta_sign_of(OrbitClass c) {
  switch (c) {
    case OrbitClass::G2: return 1;
    case OrbitClass::G3: return -1;
    default: return 0;
  }
}

inline MlRank mlrank_of(OrbitClass c) {
  switch (c) {
    case OrbitClass::D0: return MlRank{0, 0, 0};
    case OrbitClass::D1: return MlRank{1, 1, 1};
    case OrbitClass::D2: return MlRank{1, 2, 2};
    case OrbitClass::D2p: return MlRank{2, 1, 2};
    case OrbitClass::D2pp: return MlRank{2, 2, 1};
    default: return MlRank{2, 2, 2};
  }
}

inline Index outer_rank_of(OrbitClass c) {
  switch (c) {
    case OrbitClass::D0: return 0;
    case OrbitClass::D1: return 1;
    case OrbitClass::D2:
    case OrbitClass::D2p:
    case OrbitClass::D2pp:
    case OrbitClass::G2: return 2;
    case OrbitClass::D3:
    case OrbitClass::G3: return 3;
  }
  throw std::logic_error("outer_rank_of: invalid OrbitClass");
}

inline Index border_rank_of(OrbitClass c) {
  // Border rank equals rank except for D3, which is a limit of rank-2 tensors.
  return c == OrbitClass::D3 ? 2 : outer_rank_of(c);
}

// Slab view of a 2×2×2 tensor: slab(A,i)(j,k) = A(i,j,k).
template <class T>
Mat<T> slab(const DenseTensor<T>& a, Index i) {
  if (a.shape() != Shape{2, 2, 2})
    throw std::invalid_argument("slab: tensor must have shape 2x2x2");
  Mat<T> s(2, 2);
  for (Index j = 0; j < 2; ++j)
    for (Index k = 0; k < 2; ++k) s(j, k) = a.at({i, j, k});
  return s;
}

template <class T>
DenseTensor<T> from_slabs(const Mat<T>& s1, const Mat<T>& s2) {
  if (s1.rows != 2 || s1.cols != 2 || s2.rows != 2 || s2.cols != 2)
    throw std::invalid_argument("from_slabs: slabs must be 2x2");
  DenseTensor<T> a(Shape{2, 2, 2});
  for (Index j = 0; j < 2; ++j)
    for (Index k = 0; k < 2; ++k) {
      a.at({0, j, k}) = s1(j, k);
      a.at({1, j, k}) = s2(j, k);
    }
  return a;
}

// Canonical representative of each orbit, written as the slab pair it is
// usually displayed as: D1=(E11,0), D2=(I,0), D2p=(E11,E12), D2pp=(E11,E21),
// G2=(E11,E22), D3=(E11,E12+E21), G3=(I,[[0,-1],[1,0]]).
template <class T>
DenseTensor<T> canonical(OrbitClass c) {
  DenseTensor<T> a(Shape{2, 2, 2});
  switch (c) {
    case OrbitClass::D0:
      break;
    case OrbitClass::D1:
      a.at({0, 0, 0}) = T(1);
      break;
    case OrbitClass::D2:
      a.at({0, 0, 0}) = T(1);
      a.at({0, 1, 1}) = T(1);
      break;
    case OrbitClass::D2p:
      a.at({0, 0, 0}) = T(1);
      a.at({1, 0, 1}) = T(1);
      break;
    case OrbitClass::D2pp:
      a.at({0, 0, 0}) = T(1);
      a.at({1, 1, 0}) = T(1);
      break;
    case OrbitClass::G2:
      a.at({0, 0, 0}) = T(1);
      a.at({1, 1, 1}) = T(1);
      break;
    case OrbitClass::D3:
      a.at({0, 0, 0}) = T(1);
      a.at({1, 0, 1}) = T(1);
      a.at({1, 1, 0}) = T(1);
      break;
    case OrbitClass::G3:
      a.at({0, 0, 0}) = T(1);
      a.at({0, 1, 1}) = T(1);
      a.at({1, 0, 1}) = T(-1);
      a.at({1, 1, 0}) = T(1);
      break;
  }
  return a;
}

// Cayley's 2×2×2 hyperdeterminant, as the expanded degree-4 polynomial in the
// eight entries. Positive on the G2 orbit, negative on G3, zero on the rest.
template <class T>
T delta(const DenseTensor<T>& a) {
  if (a.shape() != Shape{2, 2, 2})
    throw std::invalid_argument("delta: tensor must have shape 2x2x2");
  const T& t000 = a.at({0, 0, 0});
  const T& t001 = a.at({0, 0, 1});
  const T& t010 = a.at({0, 1, 0});
  const T& t011 = a.at({0, 1, 1});
  const T& t100 = a.at({1, 0, 0});
  const T& t101 = a.at({1, 0, 1});
  const T& t110 = a.at({1, 1, 0});
  const T& t111 = a.at({1, 1, 1});

  T squares = t000 * t000 * t111 * t111 + t001 * t001 * t110 * t110 +
              t010 * t010 * t101 * t101 + t011 * t011 * t100 * t100;
  T pairs = t000 * t001 * t110 * t111 + t000 * t010 * t101 * t111 +
            t000 * t011 * t100 * t111 + t001 * t010 * t101 * t110 +
            t001 * t011 * t110 * t100 + t010 * t011 * t101 * t100;
  T diagonals = t000 * t011 * t101 * t110 + t001 * t010 * t100 * t111;
  return squares - T(2) * pairs + T(4) * diagonals;
}

namespace detail {

// Scale-aware zero test: exact scalars compare against zero, floats against
// tol times a caller-supplied homogeneous scale.
template <class T>
bool is_zero_at_scale(const T& v, double scale, double tol) {
  if constexpr (ScalarTraits<T>::is_exact) {
    (void)scale;
    (void)tol;
    return v == T(0);
  } else {
    return std::abs(v) <= tol * scale;
  }
}

template <class T>
int sign_at_scale(const T& v, double scale, double tol) {
  if (is_zero_at_scale(v, scale, tol)) return 0;
  return sign_of(v);
}

template <class T>
double mat_norm_double(const Mat<T>& m) {
  double s = 0;
  for (const T& x : m.a) {
    double d = to_double(x);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// True iff all six 2×2 minors of the mode-m unfolding vanish, i.e. the mode-m
// fibers span at most a line. Float zero tests are relative to ‖A‖²_F since
// minors are quadratic in the entries.
template <class T>
bool minors_vanish(const DenseTensor<T>& a, int mode, double tol = defaults::delta_tol) {
  if (a.shape() != Shape{2, 2, 2})
    throw std::invalid_argument("minors_vanish: tensor must have shape 2x2x2");
  if (mode < 0 || mode >= 3)
    throw std::invalid_argument("minors_vanish: mode out of range");
  Mat<T> m = flatten(a, mode);
  double scale = to_double(frobenius(a, a));
  for (Index p = 0; p < m.cols; ++p)
    for (Index q = p + 1; q < m.cols; ++q) {
      T minor = m(0, p) * m(1, q) - m(0, q) * m(1, p);
      if (!detail::is_zero_at_scale(minor, scale, tol)) return false;
    }
  return true;
}

// Classification result. The witness, when present, satisfies
// mmm(canonical(orbit_class), witness) == input (exactly over rationals).
template <class T>
struct OrbitReport {
  OrbitClass orbit_class = OrbitClass::D0;
  T delta_value = T(0);
  MlRank mlrank;
  Index outer_rank = 0;
  Index border_rank = 0;
  std::optional<MultilinearMap<T>> witness;
};

namespace detail {

// Maps the computed invariants to an orbit, rejecting combinations no real
// 2×2×2 tensor can produce. Hitting the reject path on a genuine input means
// a tolerance decision went wrong somewhere upstream.
inline OrbitClass classify_from_invariants(bool zero, const MlRank& r, int delta_sign) {
  auto fail = [&](const char* what) -> OrbitClass {
    throw std::runtime_error(std::string("classify222: ") + what + " (computed mlrank " +
                             r.to_string() + ", delta sign " + std::to_string(delta_sign) +
                             "); likely a numerical tolerance failure, retry in exact mode");
  };
  if (zero) return OrbitClass::D0;
  if (r.ranks.size() != 3) throw std::invalid_argument("classify_from_invariants: need 3 ranks");
  const MlRank r111{1, 1, 1}, r122{1, 2, 2}, r212{2, 1, 2}, r221{2, 2, 1}, r222{2, 2, 2};
  OrbitClass c;
  if (r == r111) c = OrbitClass::D1;
  else if (r == r122) c = OrbitClass::D2;
  else if (r == r212) c = OrbitClass::D2p;
  else if (r == r221) c = OrbitClass::D2pp;
  else if (r == r222) {
    if (delta_sign > 0) return OrbitClass::G2;
    if (delta_sign < 0) return OrbitClass::G3;
    return OrbitClass::D3;
  } else {
    return fail("multilinear rank pattern matches no orbit");
  }
  // Degenerate multilinear rank forces a vanishing hyperdeterminant.
  if (delta_sign != 0) return fail("nonzero hyperdeterminant with degenerate multilinear rank");
  return c;
}

}  // namespace detail

// Orbit classification from invariants alone (no witness): zero test, then
// multilinear rank, then the sign of the hyperdeterminant when the rank is
// full. Float mode tests Δ against tol·‖A‖⁴_F, matching its degree.
template <class T>
OrbitReport<T> classify222(const DenseTensor<T>& a, double delta_tol = defaults::delta_tol,
                           double rank_tol = defaults::rank_tol) {
  if (a.shape() != Shape{2, 2, 2})
    throw std::invalid_argument("classify222: tensor must have shape 2x2x2");
  OrbitReport<T> rep;
  rep.delta_value = delta(a);
  if (is_zero_tensor(a)) {
    rep.orbit_class = OrbitClass::D0;
    rep.mlrank = MlRank{0, 0, 0};
    return rep;
  }
  rep.mlrank = mrank(a, rank_tol);
  double norm2 = to_double(frobenius(a, a));
  int sgn = detail::sign_at_scale(rep.delta_value, norm2 * norm2, delta_tol);
  rep.orbit_class = detail::classify_from_invariants(false, rep.mlrank, sgn);
  rep.outer_rank = outer_rank_of(rep.orbit_class);
  rep.border_rank = border_rank_of(rep.orbit_class);
  return rep;
}

namespace detail {

// Working state for the constructive reduction: the two slabs of the current
// tensor plus the accumulated per-mode transforms, kept so that
// current = (P,Q,R)·input at every step.
template <class T>
struct ReduceState {
  Mat<T> s1, s2;    // current slabs
  Mat<T> p, q, r;   // accumulated transforms
  double delta_tol;
  double rank_tol;

  ReduceState(const DenseTensor<T>& a, double dtol, double rtol)
      : s1(slab(a, 0)),
        s2(slab(a, 1)),
        p(Mat<T>::identity(2)),
        q(Mat<T>::identity(2)),
        r(Mat<T>::identity(2)),
        delta_tol(dtol),
        rank_tol(rtol) {}

  // Mode-1 transform by m: replaces the slabs by linear combinations.
  void apply_mode1(const Mat<T>& m) {
    Mat<T> n1(2, 2), n2(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) {
        n1(i, j) = m(0, 0) * s1(i, j) + m(0, 1) * s2(i, j);
        n2(i, j) = m(1, 0) * s1(i, j) + m(1, 1) * s2(i, j);
      }
    s1 = std::move(n1);
    s2 = std::move(n2);
    p = mat_mul(m, p);
  }

  // Mode-2 transform: left-multiplies each slab.
  void apply_mode2(const Mat<T>& m) {
    s1 = mat_mul(m, s1);
    s2 = mat_mul(m, s2);
    q = mat_mul(m, q);
  }

  // Mode-3 transform: right-multiplies each slab by the transpose.
  void apply_mode3(const Mat<T>& m) {
    Mat<T> mt = transpose(m);
    s1 = mat_mul(s1, mt);
    s2 = mat_mul(s2, mt);
    r = mat_mul(m, r);
  }

  bool scalar_zero(const T& v, double scale) const {
    return is_zero_at_scale(v, scale, delta_tol);
  }
};

// Square root helper for the eigenvalue step. Exact mode demands an exact
// rational root: without one the orbit has no rational witness at all, so the
// honest outcome is an error, not an approximation.
template <class T>
T sqrt_or_throw(const T& v) {
  if constexpr (ScalarTraits<T>::is_exact) {
    std::optional<T> root = exact_sqrt(v);
    if (!root)
      throw std::runtime_error(
          "reduce222: pencil discriminant has no rational square root, so no exact "
          "witness exists over the rationals; use floating point for this input");
    return *root;
  } else {
    return std::sqrt(v);
  }
}

}  // namespace detail

// Constructive orbit reduction: returns the class together with an invertible
// per-mode witness (L,M,N) such that mmm(canonical(class),(L,M,N)) equals the
// input. The case analysis is on the rank of the slab pencil: an invertible
// slab reduces classification to the eigenstructure of S1⁻¹S2, a rank-1 slab
// to bookkeeping on the second slab's entries.
template <class T>
OrbitReport<T> reduce222(const DenseTensor<T>& a, double delta_tol = defaults::delta_tol,
                         double rank_tol = defaults::rank_tol) {
  if (a.shape() != Shape{2, 2, 2})
    throw std::invalid_argument("reduce222: tensor must have shape 2x2x2");

  OrbitReport<T> rep;
  rep.delta_value = delta(a);

  auto finish = [&](OrbitClass cls, detail::ReduceState<T>& st) {
    rep.orbit_class = cls;
    rep.mlrank = mlrank_of(cls);
    rep.outer_rank = outer_rank_of(cls);
    rep.border_rank = border_rank_of(cls);
    rep.witness = MultilinearMap<T>({inverse(st.p), inverse(st.q), inverse(st.r)});
    return rep;
  };

  detail::ReduceState<T> st(a, delta_tol, rank_tol);
  const Mat<T> swap2({{T(0), T(1)}, {T(1), T(0)}});

  if (is_zero_tensor(a)) return finish(OrbitClass::D0, st);

  // Pivot: make the first slab the one of larger rank, so that afterwards
  // rank(s1) ∈ {1,2} and rank(s2) ≤ rank(s1).
  if (matrix_rank_tol(st.s1, rank_tol) < matrix_rank_tol(st.s2, rank_tol))
    st.apply_mode1(swap2);

  if (matrix_rank_tol(st.s1, rank_tol) == 2) {
    // Invertible first slab: normalize to (I, C) and reduce C by similarity,
    // which acts as a simultaneous mode-2/mode-3 transform fixing I.
    st.apply_mode2(inverse(st.s1));
    Mat<T> c = st.s2;
    T tr = c(0, 0) + c(1, 1);
    T det_c = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    T disc = tr * tr - T(4) * det_c;
    double c_norm = detail::mat_norm_double(c);

    if (st.scalar_zero(disc, c_norm * c_norm)) {
      // Repeated eigenvalue λ. Either C = λI (pencil splits, class D2) or C
      // has a one-dimensional eigenspace (Jordan block, class D3).
      T lambda = tr / T(2);
      Mat<T> n = c;
      n(0, 0) -= lambda;
      n(1, 1) -= lambda;
      double n_norm = detail::mat_norm_double(n);
      bool nilpotent_zero;
      if constexpr (ScalarTraits<T>::is_exact)
        nilpotent_zero = (n == Mat<T>(2, 2));
      else
        nilpotent_zero = n_norm <= delta_tol * c_norm;

      if (nilpotent_zero) {
        // C = λI: subtract λ·s1 from s2 to reach (I, 0).
        st.apply_mode1(Mat<T>({{T(1), T(0)}, {-lambda, T(1)}}));
        return finish(OrbitClass::D2, st);
      }

      // Jordan case: pick v with Nv ≠ 0 (N is rank 1 and nilpotent), and use
      // the basis (Nv, v), in which C becomes λI + E12.
      std::vector<T> v{T(1), T(0)};
      std::vector<T> w{n(0, 0), n(1, 0)};
      double w0 = to_double(w[0]) * to_double(w[0]) + to_double(w[1]) * to_double(w[1]);
      double w1 = to_double(n(0, 1)) * to_double(n(0, 1)) + to_double(n(1, 1)) * to_double(n(1, 1));
      if ((ScalarTraits<T>::is_exact && w[0] == T(0) && w[1] == T(0)) ||
          (!ScalarTraits<T>::is_exact && w1 > w0)) {
        v = {T(0), T(1)};
        w = {n(0, 1), n(1, 1)};
      }
      Mat<T> basis({{w[0], v[0]}, {w[1], v[1]}});
      st.apply_mode2(inverse(basis));
      st.apply_mode3(transpose(basis));
      // Slabs are now (I, λI + E12); remove λ, then swap slabs and swap
      // columns, which carries (I, E12) to the canonical (E11, E12+E21).
      st.apply_mode1(Mat<T>({{T(1), T(0)}, {-lambda, T(1)}}));
      st.apply_mode1(swap2);
      st.apply_mode3(swap2);
      return finish(OrbitClass::D3, st);
    }

    int disc_sign = detail::sign_at_scale(disc, c_norm * c_norm, delta_tol);
    if (disc_sign > 0) {
      // Distinct real eigenvalues: diagonalize C, then take mode-1
      // combinations sending (I, diag(λ1,λ2)) to (E11, E22).
      T root = detail::sqrt_or_throw(disc);
      T l1 = (tr + root) / T(2);
      T l2 = (tr - root) / T(2);
      auto eigvec = [&](const T& lambda) -> std::vector<T> {
        // (c12, λ−c11) and (λ−c22, c21) are both annihilated by C−λI; pick
        // whichever is nonzero (the larger one in float for conditioning).
        std::vector<T> cand1{c(0, 1), lambda - c(0, 0)};
        std::vector<T> cand2{lambda - c(1, 1), c(1, 0)};
        if constexpr (ScalarTraits<T>::is_exact) {
          if (!(cand1[0] == T(0)) || !(cand1[1] == T(0))) return cand1;
          return cand2;
        } else {
          double n1 = cand1[0] * cand1[0] + cand1[1] * cand1[1];
          double n2 = cand2[0] * cand2[0] + cand2[1] * cand2[1];
          return n1 >= n2 ? cand1 : cand2;
        }
      };
      std::vector<T> u1 = eigvec(l1);
      std::vector<T> u2 = eigvec(l2);
      Mat<T> basis({{u1[0], u2[0]}, {u1[1], u2[1]}});
      st.apply_mode2(inverse(basis));
      st.apply_mode3(transpose(basis));
      T gap = l1 - l2;
      st.apply_mode1(Mat<T>({{-l2 / gap, T(1) / gap}, {l1 / gap, T(-1) / gap}}));
      return finish(OrbitClass::G2, st);
    }

    // Complex conjugate eigenvalues a ± bi: bring C to the rotation-scaling
    // normal form [[a,-b],[b,a]] in the basis (v, (C−aI)v/b), then subtract
    // a·s1 and divide by b to land on (I, [[0,-1],[1,0]]).
    T re = tr / T(2);
    // Negate into a named value first: GMP's expression templates would
    // otherwise hijack the deduced scalar type.
    T neg_disc = T(0) - disc;
    T im = detail::sqrt_or_throw(neg_disc) / T(2);
    std::vector<T> w{(c(0, 0) - re) / im, c(1, 0) / im};
    Mat<T> basis({{T(1), w[0]}, {T(0), w[1]}});
    st.apply_mode2(inverse(basis));
    st.apply_mode3(transpose(basis));
    st.apply_mode1(Mat<T>({{T(1), T(0)}, {-re / im, T(1) / im}}));
    return finish(OrbitClass::G3, st);
  }

  // Rank-1 first slab (and, by the pivot, rank(s2) ≤ 1). Factor s1 = u·vᵀ and
  // change bases so that s1 = E11; everything else is entry bookkeeping on s2.
  {
    Index pi = 0, pj = 0;
    if constexpr (ScalarTraits<T>::is_exact) {
      bool found = false;
      for (Index i = 0; i < 2 && !found; ++i)
        for (Index j = 0; j < 2 && !found; ++j)
          if (!(st.s1(i, j) == T(0))) {
            pi = i;
            pj = j;
            found = true;
          }
    } else {
      double best = -1;
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
          if (std::abs(to_double(st.s1(i, j))) > best) {
            best = std::abs(to_double(st.s1(i, j)));
            pi = i;
            pj = j;
          }
    }
    const T& pivot = st.s1(pi, pj);
    // u spans the columns (scaled so the pivot row carries 1), v the rows.
    std::vector<T> u{st.s1(0, pj) / pivot, st.s1(1, pj) / pivot};
    std::vector<T> v{st.s1(pi, 0), st.s1(pi, 1)};

    // Complete each vector to a basis with a standard basis vector chosen
    // against the (numerically) larger component.
    auto completion = [](const std::vector<T>& x) -> Mat<T> {
      bool first_larger;
      if constexpr (ScalarTraits<T>::is_exact)
        first_larger = !(x[0] == T(0));
      else
        first_larger = std::abs(to_double(x[0])) >= std::abs(to_double(x[1]));
      if (first_larger) return Mat<T>({{x[0], T(0)}, {x[1], T(1)}});
      return Mat<T>({{x[0], T(1)}, {x[1], T(0)}});
    };
    st.apply_mode2(inverse(completion(u)));
    st.apply_mode3(inverse(completion(v)));

    // s1 is now E11 (exactly so over the rationals). Clear the (1,1) entry of
    // s2 with a mode-1 shear, then branch on the remaining entries.
    st.apply_mode1(Mat<T>({{T(1), T(0)}, {-st.s2(0, 0), T(1)}}));

    T b = st.s2(0, 1);
    T c = st.s2(1, 0);
    T d = st.s2(1, 1);
    double s2_norm = detail::mat_norm_double(st.s2);
    bool bz = st.scalar_zero(b, s2_norm);
    bool cz = st.scalar_zero(c, s2_norm);
    bool dz = st.scalar_zero(d, s2_norm);

    if (!dz) {
      // d ≠ 0 forces the pencil to be concentrated on two diagonal positions
      // after shearing off b and c; the result is equivalent to (E11, E22).
      // Both shears must only mix the second row/column into the first so
      // that s1 = E11 survives them.
      st.apply_mode2(Mat<T>({{T(1), -b / d}, {T(0), T(1)}}));
      st.apply_mode3(Mat<T>({{T(1), -c / d}, {T(0), T(1)}}));
      T e = st.s2(0, 0);
      T dd = st.s2(1, 1);
      st.apply_mode1(Mat<T>({{T(1), T(0)}, {-e / dd, T(1) / dd}}));
      return finish(OrbitClass::G2, st);
    }
    if (bz && cz) return finish(OrbitClass::D1, st);
    if (!bz && cz) {
      st.apply_mode3(Mat<T>({{T(1), T(0)}, {T(0), T(1) / b}}));
      return finish(OrbitClass::D2p, st);
    }
    if (bz && !cz) {
      st.apply_mode2(Mat<T>({{T(1), T(0)}, {T(0), T(1) / c}}));
      return finish(OrbitClass::D2pp, st);
    }
    // b,c ≠ 0 with d = 0: reachable only when the rank pivot was fooled by a
    // borderline second slab; the honest reduction target is still D3.
    st.apply_mode3(Mat<T>({{T(1), T(0)}, {T(0), T(1) / b}}));
    st.apply_mode2(Mat<T>({{T(1), T(0)}, {T(0), T(1) / c}}));
    return finish(OrbitClass::D3, st);
  }
}

// Hyperdeterminant of a tensor whose multilinear rank is at most (2,2,2) in
// every mode: compress onto bases of the supporting subspaces and evaluate on
// the 2×2×2 core. Over doubles the bases are orthonormal and the value is the
// core's Δ; over rationals orthonormal bases need not exist, so we use any
// rational basis U and correct by the Gram determinants: if U = QR with Q
// orthonormal then Δ(core_U) = det(R)⁻²·Δ(core_Q) per mode, and det(UᵀU) =
// det(R)², so the product below reproduces the orthonormal value exactly.
template <class T>
T delta_extended(const DenseTensor<T>& a, double rank_tol = defaults::rank_tol) {
  if (a.order() != 3)
    throw std::invalid_argument("delta_extended: tensor must have order 3");
  if (a.shape() == Shape{2, 2, 2}) return delta(a);

  Shape padded = a.shape();
  for (Index& d : padded) d = std::max<Index>(d, 2);
  DenseTensor<T> work = (padded == a.shape()) ? a : embed_pad(a, padded);

  std::vector<Mat<T>> comp;
  T gram_det(1);
  for (int mode = 0; mode < 3; ++mode) {
    Mat<T> basis = support_basis(work, mode, rank_tol);
    if (basis.cols > 2)
      throw std::invalid_argument("delta_extended: multilinear rank exceeds (2,2,2) in mode " +
                                  std::to_string(mode + 1));
    if constexpr (ScalarTraits<T>::is_exact) {
      basis = complete_basis(basis, 2, rank_tol);
      Mat<T> gram = mat_mul(transpose(basis), basis);
      gram_det *= determinant(gram);
      comp.push_back(mat_mul(inverse(gram), transpose(basis)));
    } else {
      basis = gram_schmidt_complete(basis, 2);
      comp.push_back(transpose(basis));
    }
  }
  DenseTensor<T> core = mmm(work, MultilinearMap<T>(std::move(comp)));
  return gram_det * delta(core);
}

// Orbit classification extended to any order-3 tensor of multilinear rank at
// most (2,2,2): compress to the 2×2×2 core, classify there, and report the
// core's class with the extended Δ value. Returns nullopt when some mode has
// rank 3 or more (no class is defined there).
template <class T>
std::optional<OrbitReport<T>> classify_general(const DenseTensor<T>& a,
                                               double delta_tol = defaults::delta_tol,
                                               double rank_tol = defaults::rank_tol) {
  if (a.order() != 3)
    throw std::invalid_argument("classify_general: tensor must have order 3");
  if (a.shape() == Shape{2, 2, 2}) return classify222(a, delta_tol, rank_tol);

  OrbitReport<T> rep;
  if (is_zero_tensor(a)) {
    rep.orbit_class = OrbitClass::D0;
    rep.mlrank = MlRank{0, 0, 0};
    return rep;
  }

  Shape padded = a.shape();
  for (Index& d : padded) d = std::max<Index>(d, 2);
  DenseTensor<T> work = (padded == a.shape()) ? a : embed_pad(a, padded);

  MlRank r = mrank(work, rank_tol);
  if (!r.all_at_most(2)) return std::nullopt;

  std::vector<Mat<T>> comp;
  T gram_det(1);
  for (int mode = 0; mode < 3; ++mode) {
    Mat<T> basis = support_basis(work, mode, rank_tol);
    if constexpr (ScalarTraits<T>::is_exact) {
      basis = complete_basis(basis, 2, rank_tol);
      Mat<T> gram = mat_mul(transpose(basis), basis);
      gram_det *= determinant(gram);
      comp.push_back(mat_mul(inverse(gram), transpose(basis)));
    } else {
      basis = gram_schmidt_complete(basis, 2);
      comp.push_back(transpose(basis));
    }
  }
  DenseTensor<T> core = mmm(work, MultilinearMap<T>(std::move(comp)));
  OrbitReport<T> core_rep = classify222(core, delta_tol, rank_tol);

  rep.orbit_class = core_rep.orbit_class;
  rep.delta_value = gram_det * core_rep.delta_value;
  rep.mlrank = r;
  rep.outer_rank = outer_rank_of(rep.orbit_class);
  rep.border_rank = border_rank_of(rep.orbit_class);
  return rep;
}

// Markdown table of the eight orbits and their invariants.
std::string orbit_table_markdown();

}  // namespace tenrank

#endif  // TENRANK_ORBIT222_HPP
