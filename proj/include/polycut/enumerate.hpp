#pragma once

// Exact enumeration of integer points m with lo <= A m <= hi. The system is
// relaxed to a certified rational approximation, Fourier-Motzkin elimination
// yields per-level bounds conditioned on the fixed prefix, and candidates are
// confirmed against the exact field matrix (double fast path, exact fallback
// near boundaries).

#include "polycut/linalg.hpp"

#include <functional>

namespace cps {

class BoxEnumerator {
 public:
  // a: m x k exact constraint rows; bounds per row. The feasible region must
  // be bounded (rank k), or construction throws.
  BoxEnumerator(const FMat& a, const QVec& lo, const QVec& hi);

  // Visits every feasible integer point in lexicographic order.
  void run(const std::function<void(const IVec&)>& visit) const;

  long long visited_nodes() const { return nodes_; }

 private:
  struct Row {  // one-sided: coef . m <= bound
    QVec coef;
    Rat bound;
  };

  int k_;
  FMat exact_;
  QVec lo_, hi_;
  std::vector<std::vector<Row>> levels_;  // levels_[t]: rows on m_0..m_t
  std::vector<double> approx_;            // row-major exact_ as doubles
  std::vector<double> margin_;            // per-row double comparison slack
  mutable long long nodes_ = 0;

  bool accept_exact(const IVec& m) const;
};

}  // namespace cps
