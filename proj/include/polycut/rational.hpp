#pragma once

// GMP-backed exact rationals: parsing, canonical printing, interval arithmetic.

#include <gmpxx.h>

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cps {

using Int = mpz_class;
using Rat = mpq_class;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts "p", "-p", "p/q" with nonzero q. Anything else throws ParseError.
Rat parse_rational(const std::string& s);

// Canonical "p/q" (or "p" when the denominator is 1).
std::string rational_string(const Rat& v);

// Fixed-point decimal with exactly `digits` fractional digits, ties to even.
std::string decimal_string(const Rat& v, int digits);

inline int sign(const Rat& v) { return sgn(v); }

// mpq_class(num, den) does not canonicalize; this does.
inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}
inline Rat rat_abs(const Rat& v) { return v < 0 ? Rat(-v) : v; }

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int rat_floor(const Rat& v) {
  return floor_div(v.get_num(), v.get_den());
}

// Closed rational interval; the building block for certified sign decisions.
struct QInterval {
  Rat lo, hi;

  QInterval() : lo(0), hi(0) {}
  QInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {}
  static QInterval point(const Rat& v) { return {v, v}; }

  Rat width() const { return hi - lo; }
  bool contains_zero() const { return lo <= 0 && 0 <= hi; }
  int sign() const {
    if (lo > 0) return 1;
    if (hi < 0) return -1;
    return 0;  // undecided
  }

  QInterval operator+(const QInterval& o) const { return {lo + o.lo, hi + o.hi}; }
  QInterval operator-(const QInterval& o) const { return {lo - o.hi, hi - o.lo}; }
  QInterval operator-() const { return {-hi, -lo}; }
  QInterval operator*(const QInterval& o) const {
    Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    Rat mn = a, mx = a;
    for (const Rat* v : {&b, &c, &d}) {
      if (*v < mn) mn = *v;
      if (*v > mx) mx = *v;
    }
    return {mn, mx};
  }
  QInterval operator*(const Rat& r) const {
    return r >= 0 ? QInterval{lo * r, hi * r} : QInterval{hi * r, lo * r};
  }
  QInterval operator+(const Rat& r) const { return {lo + r, hi + r}; }
};

}  // namespace cps

namespace Eigen {

template <>
struct NumTraits<cps::Rat> : GenericNumTraits<cps::Rat> {
  using Real = cps::Rat;
  using NonInteger = cps::Rat;
  using Nested = cps::Rat;
  using Literal = long;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 120,
    MulCost = 100,
  };
};

template <>
struct NumTraits<cps::Int> : GenericNumTraits<cps::Int> {
  using Real = cps::Int;
  using NonInteger = cps::Rat;
  using Nested = cps::Int;
  using Literal = long;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 100,
    MulCost = 80,
  };
};

}  // namespace Eigen
