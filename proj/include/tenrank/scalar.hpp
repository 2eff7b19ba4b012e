#ifndef TENRANK_SCALAR_HPP
#define TENRANK_SCALAR_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace tenrank {

// Exact rational scalar. GMP keeps mpq_class values canonical under arithmetic;
// the helpers below guard the entry points where canonicalization is not automatic
// (raw numerator/denominator pairs and text).
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Parses "p/q" (also plain "p", meaning p/1). Whitespace is not accepted: the
// tensor file format stores these strings verbatim.
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      Rational q(mpz_class(text), 1);
      q.canonicalize();
      return q;
    }
    const mpz_class num(text.substr(0, slash));
    const mpz_class den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational '" + text + "'");
  }
}

// Canonical "p/q" with q > 0, including "0/1" and "3/1"; the inverse of
// parse_rational on everything this writes.
inline std::string format_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Exact square root when the value is a perfect square of a rational,
// std::nullopt otherwise (negative inputs included).
inline std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool is_exact = false;
  static constexpr const char* kind_name = "f64";
  static double to_double(double x) { return x; }
  static double from_long(long x) { return static_cast<double>(x); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool is_exact = true;
  static constexpr const char* kind_name = "rational";
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_long(long x) { return Rational(x); }
};

template <class T>
inline double to_double(const T& x) {
  return ScalarTraits<T>::to_double(x);
}

// |x| without dragging std::abs into scope for mpq_class (gmpxx provides
// a global abs overload found by ADL).
template <class T>
inline T abs_value(const T& x) {
  using std::abs;
  return abs(x);
}

// Sign in {-1, 0, +1}. For doubles this is an exact comparison; tolerance-aware
// zero tests live with the operations that own the tolerance policy.
template <class T>
inline int sign_of(const T& x) {
  if (x > T(0)) return 1;
  if (x < T(0)) return -1;
  return 0;
}

inline int sign_of(const Rational& x) { return sgn(x); }

}  // namespace tenrank

#endif  // TENRANK_SCALAR_HPP
