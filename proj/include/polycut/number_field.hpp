#pragma once

// Real algebraic number field Q(theta) with exact arithmetic and decidable
// ordering. theta is pinned by a monic irreducible integer polynomial plus a
// rational interval isolating exactly one real root. Scalars are coordinate
// vectors in the power basis 1, theta, ..., theta^{g-1}.

#include "polycut/rational.hpp"

#include <memory>
#include <mutex>
#include <ostream>
#include <vector>

namespace cps {

struct FieldMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

class NumberField {
 public:
  // minpoly = c_0 ... c_g with c_g = 1, degree g >= 1. Checks: monic,
  // squarefree, exactly one root inside (lo, hi) (Sturm count). Irreducibility
  // beyond squarefreeness is the caller's contract.
  static FieldPtr make(std::vector<Int> minpoly, Rat root_lo, Rat root_hi);

  static FieldPtr rationals();  // degree 1, theta = 0 (x - 0)

  int degree() const { return degree_; }
  const std::vector<Int>& minpoly() const { return minpoly_; }

  // Isolating interval refined to width <= 2^-bits. Thread-safe.
  QInterval root_interval(unsigned bits) const;

  // Power-basis expansion of theta^m for m in [0, 2g-2].
  const std::vector<Rat>& power(int m) const { return powers_[m]; }

  bool same_as(const NumberField& o) const { return minpoly_ == o.minpoly_; }

 private:
  NumberField() = default;

  std::vector<Int> minpoly_;
  int degree_ = 1;
  std::vector<std::vector<Rat>> powers_;  // theta^0 .. theta^{2g-2}

  mutable std::mutex mu_;
  mutable QInterval root_;
};

class Fs {
 public:
  Fs() : c_{Rat(0)} {}
  Fs(long v) : c_{Rat(v)} {}      // NOLINT: Eigen literal conversions
  Fs(int v) : c_{Rat(v)} {}       // NOLINT
  Fs(const Rat& v) : c_{v} {}     // NOLINT
  Fs(FieldPtr field, std::vector<Rat> coeffs);

  static Fs theta(const FieldPtr& field);

  const FieldPtr& field() const { return field_; }  // null => plain rational
  const std::vector<Rat>& coeffs() const { return c_; }
  // Coefficient vector padded to the field degree g.
  std::vector<Rat> coeffs_padded(int g) const;

  bool is_zero() const;
  bool is_rational() const;
  Rat rational() const;  // requires is_rational()

  int sgn() const;                 // exact
  Int floor() const;               // exact
  QInterval enclosure(unsigned bits) const;  // certified, width <= 2^-bits
  double to_double() const;

  Fs operator-() const;
  Fs& operator+=(const Fs& o);
  Fs& operator-=(const Fs& o);
  Fs& operator*=(const Fs& o);
  Fs& operator/=(const Fs& o);
  Fs inverse() const;

  friend Fs operator+(Fs a, const Fs& b) { return a += b; }
  friend Fs operator-(Fs a, const Fs& b) { return a -= b; }
  friend Fs operator*(Fs a, const Fs& b) { return a *= b; }
  friend Fs operator/(Fs a, const Fs& b) { return a /= b; }

  friend bool operator==(const Fs& a, const Fs& b);
  friend bool operator!=(const Fs& a, const Fs& b) { return !(a == b); }
  friend bool operator<(const Fs& a, const Fs& b) { return compare(a, b) < 0; }
  friend bool operator>(const Fs& a, const Fs& b) { return compare(a, b) > 0; }
  friend bool operator<=(const Fs& a, const Fs& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const Fs& a, const Fs& b) { return compare(a, b) >= 0; }

  // Total order on the real embedding: -1, 0, +1.
  friend int compare(const Fs& a, const Fs& b);

  friend Fs abs(const Fs& a) { return a.sgn() < 0 ? -a : a; }

  // debugging / test output: the coefficient vector
  friend std::ostream& operator<<(std::ostream& os, const Fs& v) {
    os << "[";
    for (size_t i = 0; i < v.c_.size(); ++i) {
      if (i) os << " ";
      os << v.c_[i].get_str();
    }
    return os << "]";
  }

 private:
  // field_ null means a plain rational constant (c_ has a single entry);
  // binary ops promote it into the other operand's field.
  FieldPtr field_;
  std::vector<Rat> c_;

  static const FieldPtr& join_fields(const Fs& a, const Fs& b);
  void promote(const FieldPtr& f);
  void reduce_mod_minpoly(std::vector<Rat>& raw);
};

}  // namespace cps

namespace Eigen {

template <>
struct NumTraits<cps::Fs> : GenericNumTraits<cps::Fs> {
  using Real = cps::Fs;
  using NonInteger = cps::Fs;
  using Nested = cps::Fs;
  using Literal = long;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 16,
    AddCost = 300,
    MulCost = 600,
  };
};

}  // namespace Eigen
