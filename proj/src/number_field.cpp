#include "polycut/number_field.hpp"

#include <algorithm>
#include <cmath>

namespace cps {

namespace {

// Dense polynomials over Q, coefficient order c_0 ... c_deg.
using Poly = std::vector<Rat>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Rat poly_eval(const Poly& p, const Rat& x) {
  Rat acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QInterval poly_eval(const Poly& p, const QInterval& x) {
  QInterval acc;
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    acc = acc * x + QInterval::point(*it);
  return acc;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rat(static_cast<long>(i)));
  return d;
}

Poly neg_rem(const Poly& a, const Poly& b) {
  Poly r = a;
  trim(r);
  Poly bb = b;
  trim(bb);
  while (r.size() >= bb.size() && !r.empty()) {
    Rat f = r.back() / bb.back();
    size_t shift = r.size() - bb.size();
    for (size_t i = 0; i < bb.size(); ++i) r[i + shift] -= f * bb[i];
    trim(r);
  }
  for (auto& c : r) c = -c;
  return r;
}

int sign_variations(const std::vector<Poly>& chain, const Rat& x) {
  int count = 0, prev = 0;
  for (const Poly& p : chain) {
    int s = sgn(poly_eval(p, x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

// Number of distinct real roots in (lo, hi] for squarefree f.
int sturm_count(const Poly& f, const Rat& lo, const Rat& hi) {
  std::vector<Poly> chain{f, derivative(f)};
  while (true) {
    Poly next = neg_rem(chain[chain.size() - 2], chain.back());
    if (next.empty()) break;
    chain.push_back(next);
  }
  return sign_variations(chain, lo) - sign_variations(chain, hi);
}

Poly to_poly(const std::vector<Int>& p) {
  Poly q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[i] = Rat(p[i]);
  return q;
}

}  // namespace

FieldPtr NumberField::make(std::vector<Int> minpoly, Rat root_lo, Rat root_hi) {
  if (minpoly.size() < 2 || minpoly.back() != 1)
    throw std::invalid_argument("minpoly must be monic of degree >= 1");
  auto f = std::shared_ptr<NumberField>(new NumberField());
  f->minpoly_ = std::move(minpoly);
  f->degree_ = static_cast<int>(f->minpoly_.size()) - 1;
  if (root_lo >= root_hi)
    throw std::invalid_argument("empty root interval");

  Poly mp = to_poly(f->minpoly_);
  if (f->degree_ > 1) {
    // Squarefree check via Sturm chain degeneracy: gcd(f, f') must be constant,
    // which the chain construction detects by terminating at a nonzero constant.
    Poly g = mp, h = derivative(mp);
    while (true) {
      trim(h);
      if (h.empty()) throw std::invalid_argument("minpoly is not squarefree");
      if (h.size() == 1) break;
      Poly r = neg_rem(g, h);
      g = h;
      h = r;
    }
    if (poly_eval(mp, root_lo) == 0 || poly_eval(mp, root_hi) == 0)
      throw std::invalid_argument("root interval endpoint is a root");
    if (sturm_count(mp, root_lo, root_hi) != 1)
      throw std::invalid_argument("root interval does not isolate one root");
  } else {
    // degree 1: theta = -c_0 rational; the interval must contain it.
    Rat theta = -Rat(f->minpoly_[0]);
    if (theta < root_lo || theta > root_hi)
      throw std::invalid_argument("root interval misses the rational root");
  }
  f->root_ = QInterval(std::move(root_lo), std::move(root_hi));

  // theta^m mod minpoly for m <= 2g-2, used by multiplication.
  int g = f->degree_;
  f->powers_.assign(2 * g - 1, std::vector<Rat>(g, Rat(0)));
  for (int m = 0; m < g; ++m) f->powers_[m][m] = 1;
  for (int m = g; m <= 2 * g - 2; ++m) {
    // theta^m = theta * theta^{m-1}, reduced with theta^g = -(c_0 + ... ).
    const std::vector<Rat>& prev = f->powers_[m - 1];
    std::vector<Rat> cur(g, Rat(0));
    Rat top = prev[g - 1];
    for (int i = g - 1; i > 0; --i) cur[i] = prev[i - 1];
    cur[0] = 0;
    for (int i = 0; i < g; ++i) cur[i] -= top * Rat(f->minpoly_[i]);
    f->powers_[m] = std::move(cur);
  }
  return f;
}

FieldPtr NumberField::rationals() {
  static FieldPtr q = make({Int(0), Int(1)}, Rat(-1), Rat(1));
  return q;
}

QInterval NumberField::root_interval(unsigned bits) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (degree_ == 1) {
    Rat theta = -Rat(minpoly_[0]);
    return QInterval::point(theta);
  }
  Poly mp = to_poly(minpoly_);
  Rat target;
  mpq_div_2exp(target.get_mpq_t(), Rat(1).get_mpq_t(), bits);
  int slo = sgn(poly_eval(mp, root_.lo));
  while (root_.width() > target) {
    Rat mid = (root_.lo + root_.hi) / 2;
    // mid cannot be a root: irreducible minpoly of degree >= 2 has no
    // rational roots.
    int sm = sgn(poly_eval(mp, mid));
    if (sm == slo)
      root_.lo = mid;
    else
      root_.hi = mid;
  }
  return root_;
}

Fs::Fs(FieldPtr field, std::vector<Rat> coeffs)
    : field_(std::move(field)), c_(std::move(coeffs)) {
  if (!field_) throw std::invalid_argument("null field");
  c_.resize(field_->degree(), Rat(0));
}

Fs Fs::theta(const FieldPtr& field) {
  std::vector<Rat> c(field->degree(), Rat(0));
  if (field->degree() == 1)
    c[0] = -Rat(field->minpoly()[0]);
  else
    c[1] = 1;
  return Fs(field, std::move(c));
}

std::vector<Rat> Fs::coeffs_padded(int g) const {
  std::vector<Rat> out = c_;
  out.resize(g, Rat(0));
  return out;
}

bool Fs::is_zero() const {
  for (const Rat& v : c_)
    if (v != 0) return false;
  return true;
}

bool Fs::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rat Fs::rational() const {
  if (!is_rational()) throw std::logic_error("scalar is irrational");
  return c_.empty() ? Rat(0) : c_[0];
}

const FieldPtr& Fs::join_fields(const Fs& a, const Fs& b) {
  if (a.field_ && b.field_) {
    if (a.field_ != b.field_ && !a.field_->same_as(*b.field_))
      throw FieldMismatch("scalars from different number fields");
    return a.field_;
  }
  return a.field_ ? a.field_ : b.field_;
}

void Fs::promote(const FieldPtr& f) {
  if (field_ || !f) return;
  Rat v = c_.empty() ? Rat(0) : c_[0];
  field_ = f;
  c_.assign(f->degree(), Rat(0));
  c_[0] = v;
}

Fs Fs::operator-() const {
  Fs r = *this;
  for (Rat& v : r.c_) v = -v;
  return r;
}

Fs& Fs::operator+=(const Fs& o) {
  const FieldPtr& f = join_fields(*this, o);
  promote(f);
  Fs rhs = o;
  rhs.promote(f);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += rhs.c_[i];
  return *this;
}

Fs& Fs::operator-=(const Fs& o) {
  const FieldPtr& f = join_fields(*this, o);
  promote(f);
  Fs rhs = o;
  rhs.promote(f);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= rhs.c_[i];
  return *this;
}

void Fs::reduce_mod_minpoly(std::vector<Rat>& raw) {
  int g = field_->degree();
  std::vector<Rat> out(g, Rat(0));
  for (size_t m = 0; m < raw.size(); ++m) {
    if (raw[m] == 0) continue;
    const std::vector<Rat>& pw = field_->power(static_cast<int>(m));
    for (int i = 0; i < g; ++i) out[i] += raw[m] * pw[i];
  }
  c_ = std::move(out);
}

Fs& Fs::operator*=(const Fs& o) {
  const FieldPtr& f = join_fields(*this, o);
  if (!f) {  // both plain rationals
    c_[0] *= o.c_[0];
    return *this;
  }
  promote(f);
  Fs rhs = o;
  rhs.promote(f);
  int g = f->degree();
  std::vector<Rat> raw(2 * g - 1, Rat(0));
  for (int i = 0; i < g; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; j < g; ++j) {
      if (rhs.c_[j] == 0) continue;
      raw[i + j] += c_[i] * rhs.c_[j];
    }
  }
  reduce_mod_minpoly(raw);
  return *this;
}

Fs Fs::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero scalar");
  if (is_rational()) {
    Fs r = *this;
    r.c_[0] = 1 / c_[0];
    return r;
  }
  // Extended Euclid in Q[x] modulo the minimal polynomial.
  using Poly = std::vector<Rat>;
  int g = field_->degree();
  Poly r0(field_->minpoly().size());
  for (size_t i = 0; i < r0.size(); ++i) r0[i] = Rat(field_->minpoly()[i]);
  Poly r1 = c_;
  while (!r1.empty() && r1.back() == 0) r1.pop_back();
  Poly s0{}, s1{Rat(1)};  // s tracks the coefficient of this scalar
  while (true) {
    // divide r0 by r1
    Poly q;
    Poly rem = r0;
    while (rem.size() >= r1.size() && !rem.empty()) {
      Rat fct = rem.back() / r1.back();
      size_t shift = rem.size() - r1.size();
      if (q.size() < shift + 1) q.resize(shift + 1, Rat(0));
      q[shift] += fct;
      for (size_t i = 0; i < r1.size(); ++i) rem[i + shift] -= fct * r1[i];
      while (!rem.empty() && rem.back() == 0) rem.pop_back();
    }
    // s_next = s0 - q*s1
    Poly snext = s0;
    if (snext.size() < q.size() + s1.size()) snext.resize(q.size() + s1.size(), Rat(0));
    for (size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      for (size_t j = 0; j < s1.size(); ++j) snext[i + j] -= q[i] * s1[j];
    }
    while (!snext.empty() && snext.back() == 0) snext.pop_back();
    r0 = r1;
    r1 = rem;
    s0 = s1;
    s1 = snext;
    if (r1.empty()) break;
    if (r1.size() == 1) {
      // gcd is the nonzero constant r1[0]; inverse = s1 / r1[0]
      Rat cst = r1[0];
      std::vector<Rat> out(g, Rat(0));
      for (size_t i = 0; i < s1.size() && i < static_cast<size_t>(g); ++i)
        out[i] = s1[i] / cst;
      return Fs(field_, std::move(out));
    }
  }
  // gcd of nonconstant degree would contradict irreducibility
  throw std::logic_error("minpoly not irreducible: inverse failed");
}

Fs& Fs::operator/=(const Fs& o) { return *this *= o.inverse(); }

bool operator==(const Fs& a, const Fs& b) {
  const FieldPtr& f = Fs::join_fields(a, b);
  Fs x = a, y = b;
  x.promote(f);
  y.promote(f);
  return x.c_ == y.c_;
}

int Fs::sgn() const {
  if (is_rational()) return c_.empty() ? 0 : cps::sign(c_[0]);
  // Interval evaluation, refining the root until the sign is certified.
  // Terminates because a nonzero coefficient vector of degree < g cannot
  // vanish at theta (minpoly irreducible).
  for (unsigned bits = 16;; bits *= 2) {
    QInterval th = field_->root_interval(bits);
    QInterval val = poly_eval(c_, th);
    int s = val.sign();
    if (s != 0) return s;
    if (bits > 1u << 20)
      throw std::runtime_error("sign refinement exceeded precision cap");
  }
}

int compare(const Fs& a, const Fs& b) {
  if (a == b) return 0;
  Fs d = a - b;
  return d.sgn();
}

Int Fs::floor() const {
  if (!field_ || is_rational()) return rat_floor(c_.empty() ? Rat(0) : c_[0]);
  for (unsigned bits = 16;; bits *= 2) {
    QInterval th = field_->root_interval(bits);
    QInterval val = poly_eval(c_, th);
    Int flo = rat_floor(val.lo), fhi = rat_floor(val.hi);
    if (flo == fhi) return flo;
    // val.hi could sit exactly on an integer while the value is below it.
    if (fhi == flo + 1 && val.hi == Rat(fhi)) {
      Fs diff = *this - Fs(Rat(fhi));
      if (diff.sgn() < 0) return flo;
    }
    if (bits > 1u << 20)
      throw std::runtime_error("floor refinement exceeded precision cap");
  }
}

QInterval Fs::enclosure(unsigned bits) const {
  if (!field_ || is_rational())
    return QInterval::point(c_.empty() ? Rat(0) : c_[0]);
  Rat target;
  mpq_div_2exp(target.get_mpq_t(), Rat(1).get_mpq_t(), bits);
  for (unsigned b = bits + 4;; b *= 2) {
    QInterval th = field_->root_interval(b);
    QInterval val = poly_eval(c_, th);
    if (val.width() <= target) return val;
    if (b > 1u << 22)
      throw std::runtime_error("enclosure refinement exceeded precision cap");
  }
}

double Fs::to_double() const {
  QInterval v = enclosure(72);
  Rat mid = (v.lo + v.hi) / 2;
  return mid.get_d();
}

}  // namespace cps
