#include "polycut/enumerate.hpp"

#include <algorithm>
#include <cmath>

namespace cps {

namespace {

// Certified rational enclosure of a field scalar, width <= 2^-bits.
Rat approx_mid(const Fs& v, unsigned bits) {
  QInterval e = v.enclosure(bits);
  return (e.lo + e.hi) / 2;
}

}  // namespace

BoxEnumerator::BoxEnumerator(const FMat& a, const QVec& lo, const QVec& hi) {
  k_ = static_cast<int>(a.cols());
  exact_ = a;
  lo_ = lo;
  hi_ = hi;
  const unsigned kBits = 64;
  // slack absorbs both the rational approximation of A and double rounding in
  // the DFS pruning; the exact acceptance test keeps the result tight.
  Rat slack;
  mpq_div_2exp(slack.get_mpq_t(), Rat(1).get_mpq_t(), 40);

  QMat ar(a.rows(), k_);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < k_; ++j) ar(i, j) = approx_mid(a(i, j), kBits);

  // one-sided rows with enlarged bounds
  std::vector<Row> rows;
  for (int i = 0; i < a.rows(); ++i) {
    Rat scale(0);
    for (int j = 0; j < k_; ++j) scale += rat_abs(ar(i, j));
    Rat widen = slack * (Rat(1) + scale + rat_abs(hi(i)) + rat_abs(lo(i)));
    Row up;
    up.coef = ar.row(i).transpose();
    up.bound = hi(i) + widen;
    rows.push_back(up);
    Row down;
    down.coef = -ar.row(i).transpose();
    down.bound = -(lo(i) - widen);
    rows.push_back(down);
  }

  // Fourier-Motzkin from the last variable down; levels_[t] holds rows whose
  // support is within m_0..m_t.
  levels_.assign(k_, {});
  std::vector<Row> cur = std::move(rows);
  for (int var = k_ - 1; var >= 0; --var) {
    std::vector<Row> uppers, lowers, rest;
    for (Row& r : cur) {
      int s = sign(r.coef(var));
      if (s > 0)
        uppers.push_back(std::move(r));
      else if (s < 0)
        lowers.push_back(std::move(r));
      else
        rest.push_back(std::move(r));
    }
    if (uppers.empty() || lowers.empty())
      throw std::invalid_argument("enumeration region is unbounded");
    auto push_unique = [](std::vector<Row>& v, Row r) {
      // normalize so the leading nonzero coefficient is +-1 for dedup
      Rat lead(0);
      for (int j = 0; j < r.coef.size(); ++j)
        if (r.coef(j) != 0) {
          lead = rat_abs(r.coef(j));
          break;
        }
      if (lead != 0) {
        for (int j = 0; j < r.coef.size(); ++j) r.coef(j) /= lead;
        r.bound /= lead;
      }
      for (const Row& o : v)
        if (o.bound == r.bound && o.coef == r.coef) return;
      v.push_back(std::move(r));
    };
    std::vector<Row> lvl;
    for (const Row& r : uppers) push_unique(lvl, r);
    for (const Row& r : lowers) push_unique(lvl, r);
    levels_[var] = lvl;
    // eliminate
    std::vector<Row> next = std::move(rest);
    for (const Row& u : uppers)
      for (const Row& l : lowers) {
        // u: cu.m <= bu with cu_var > 0 ; l: cl.m <= bl with cl_var < 0
        Rat a1 = u.coef(var), a2 = -l.coef(var);
        Row comb;
        comb.coef = QVec::Constant(k_, Rat(0));
        for (int j = 0; j < k_; ++j)
          comb.coef(j) = u.coef(j) * a2 + l.coef(j) * a1;
        comb.bound = u.bound * a2 + l.bound * a1;
        bool zero = true;
        for (int j = 0; j < k_; ++j)
          if (comb.coef(j) != 0) {
            zero = false;
            break;
          }
        if (zero) {
          if (comb.bound < 0)
            throw std::invalid_argument("infeasible enumeration system");
          continue;
        }
        push_unique(next, std::move(comb));
      }
    cur = std::move(next);
  }

  approx_.resize(a.rows() * k_);
  margin_.resize(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    double rowscale = 1.0;
    for (int j = 0; j < k_; ++j) {
      double d = exact_(i, j).to_double();
      approx_[i * k_ + j] = d;
      rowscale += std::abs(d);
    }
    margin_[i] = 1e-9 * rowscale;
  }
}

bool BoxEnumerator::accept_exact(const IVec& m) const {
  for (int i = 0; i < exact_.rows(); ++i) {
    double acc = 0;
    double scale = 0;
    for (int j = 0; j < k_; ++j) {
      double mj = mpz_get_d(m(j).get_mpz_t());
      acc += approx_[i * k_ + j] * mj;
      scale += std::abs(mj);
    }
    double eps = margin_[i] * (1.0 + scale);
    double lo = lo_(i).get_d(), hi = hi_(i).get_d();
    if (acc > lo + eps && acc < hi - eps) continue;   // clearly inside
    if (acc < lo - eps || acc > hi + eps) return false;  // clearly outside
    // borderline: exact evaluation
    Fs val(0);
    for (int j = 0; j < k_; ++j) val += exact_(i, j) * Fs(Rat(m(j)));
    if (compare(val, Fs(lo_(i))) < 0 || compare(val, Fs(hi_(i))) > 0)
      return false;
  }
  return true;
}

void BoxEnumerator::run(const std::function<void(const IVec&)>& visit) const {
  nodes_ = 0;
  IVec m = IVec::Constant(k_, Int(0));

  std::function<void(int)> dfs = [&](int t) {
    ++nodes_;
    bool have_hi = false, have_lo = false;
    Rat lo, hi;
    for (const Row& r : levels_[t]) {
      Rat acc = r.bound;
      for (int j = 0; j < t; ++j)
        if (r.coef(j) != 0) acc -= r.coef(j) * Rat(m(j));
      const Rat& c = r.coef(t);
      Rat b = acc / c;
      if (c > 0) {  // m_t <= b
        if (!have_hi || b < hi) hi = b;
        have_hi = true;
      } else {  // division by negative flips: m_t >= b
        if (!have_lo || b > lo) lo = b;
        have_lo = true;
      }
    }
    if (!have_hi || !have_lo) return;  // FM keeps both sides; defensive only
    Int from = -rat_floor(-lo);        // ceil(lo)
    Int to = rat_floor(hi);
    for (Int v = from; v <= to; ++v) {
      m(t) = v;
      if (t + 1 == k_) {
        if (accept_exact(m)) visit(m);
      } else {
        dfs(t + 1);
      }
    }
  };
  if (k_ == 0) return;
  dfs(0);
}

}  // namespace cps
