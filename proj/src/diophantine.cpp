#include "polycut/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace cps {

namespace {

// Exact floor of (p + sqrt(d)) / q for non-square d > 0, q != 0.
Int floor_quad(const Int& p, const Int& d, const Int& q) {
  Int s;
  mpz_sqrt(s.get_mpz_t(), d.get_mpz_t());
  if (q > 0) return floor_div(p + s, q);
  // (p + sqrt(d))/q with q < 0: the value is irrational, so
  // floor(x) = -floor(-x) - 1 with -x = (p + sqrt(d))/|q|.
  Int aq = -q;
  return -floor_div(p + s, aq) - 1;
}

}  // namespace

CFExpansion cf_expand(const Fs& x, int depth) {
  if (x.is_rational()) throw ParamError("rational input");
  CFExpansion out;
  Fs cur = x;
  for (int i = 0; i < depth; ++i) {
    Int a = cur.floor();
    out.quotients.push_back(a);
    Fs frac = cur - Fs(Rat(a));
    if (frac.is_zero()) break;  // cannot happen for irrational input
    cur = frac.inverse();
  }

  const FieldPtr& f = x.field();
  if (f && f->degree() == 2) {
    // integer (P + sqrt(D))/Q representation with Q | D - P^2
    const std::vector<Int>& mp = f->minpoly();  // x^2 + p1 x + p0
    Int disc = mp[1] * mp[1] - 4 * mp[0];
    // pick the root branch: theta = (-p1 + s*sqrt(disc))/2
    QInterval ri = f->root_interval(8);
    Rat mid = make_rat(Int(-mp[1]), Int(2));
    int branch;
    if (ri.hi <= mid)
      branch = -1;
    else if (ri.lo >= mid)
      branch = 1;
    else {
      // refine until the isolating interval clears the symmetry point
      for (unsigned bits = 16;; bits *= 2) {
        ri = f->root_interval(bits);
        if (ri.hi <= mid || ri.lo >= mid) break;
        if (bits > 1u << 18)
          throw std::runtime_error("root branch refinement stalled");
      }
      branch = ri.lo >= mid ? 1 : -1;
    }
    std::vector<Rat> c = x.coeffs_padded(2);
    // x = c0 + c1 * (-p1 + branch*sqrt(disc))/2 = u + v*sqrt(disc)
    Rat u = c[0] - c[1] * Rat(mp[1]) / 2;
    Rat v = c[1] * Rat(branch) / 2;
    // common denominator: x = (U + V sqrt(disc)) / W
    Int w = u.get_den();
    {
      Int g;
      mpz_lcm(g.get_mpz_t(), w.get_mpz_t(), v.get_den().get_mpz_t());
      w = g;
    }
    Int uu = u.get_num() * (w / u.get_den());
    Int vv = v.get_num() * (w / v.get_den());
    Int P, Q, D;
    if (vv > 0) {
      P = uu;
      Q = w;
      D = vv * vv * disc;
    } else {
      P = -uu;
      Q = -w;
      D = vv * vv * disc;
    }
    // enforce Q | D - P^2
    if ((D - P * P) % Q != 0) {
      Int aq = Q < 0 ? Int(-Q) : Q;
      P = P * aq;
      D = D * aq * aq;
      Q = Q * aq;
    }
    std::map<std::pair<std::string, std::string>, int> seen;
    std::vector<Int> qts;
    int idx = 0;
    Int cp = P, cq = Q;
    while (true) {
      auto key = std::make_pair(cp.get_str(), cq.get_str());
      auto it = seen.find(key);
      if (it != seen.end()) {
        int start = it->second;
        out.periodic = std::make_pair(
            start, std::vector<Int>(qts.begin() + start, qts.end()));
        break;
      }
      seen.emplace(key, idx);
      Int a = floor_quad(cp, D, cq);
      qts.push_back(a);
      Int np = a * cq - cp;
      Int nq = (D - np * np) / cq;
      cp = np;
      cq = nq;
      ++idx;
      if (idx > 100000)
        throw std::runtime_error("continued fraction cycle not found");
    }
    // sanity: the integer recursion reproduces the field quotients
    for (size_t i = 0; i < out.quotients.size() && i < qts.size(); ++i)
      if (out.quotients[i] != qts[i])
        throw std::logic_error("cf cycle disagrees with field expansion");
    // extend the reported quotients if the field loop stopped short
    if (static_cast<int>(out.quotients.size()) < depth) {
      const auto& [start, period] = *out.periodic;
      while (static_cast<int>(out.quotients.size()) < depth) {
        size_t i = out.quotients.size();
        if (i < qts.size())
          out.quotients.push_back(qts[i]);
        else
          out.quotients.push_back(
              period[(i - start) % period.size()]);
      }
    }
  }
  return out;
}

QuadCertificate is_bad_quadratic(const Fs& x) {
  QuadCertificate cert;
  if (!x.field() || x.field()->degree() != 2 || x.is_rational()) {
    cert.applicable = false;
    return cert;
  }
  cert.applicable = true;
  cert.expansion = cf_expand(x, 8);
  cert.period = cert.expansion.periodic->second;
  return cert;
}

std::vector<Rat> default_schedule() {
  std::vector<Rat> s;
  for (int j = 4; j <= 16; ++j) s.push_back(Rat(Int(1) << j));
  return s;
}

namespace {

struct ExactValue {
  Fs dist;  // sup-norm distance to target (>= 0)
  Fs eta;   // sup-norm of the lift
};

// Compare value = dist * eta^(dn/nn): compare dist^nn * eta^dn exactly.
int compare_values(const ExactValue& a, const ExactValue& b, long dn, long nn) {
  Fs lhs(1), rhs(1);
  for (long i = 0; i < nn; ++i) {
    lhs *= a.dist;
    rhs *= b.dist;
  }
  for (long i = 0; i < dn; ++i) {
    lhs *= a.eta;
    rhs *= b.eta;
  }
  return compare(lhs, rhs);
}

Fs sup_norm(const FVec& v) {
  Fs m(0);
  for (int i = 0; i < v.size(); ++i) {
    Fs a = abs(v(i));
    if (compare(a, m) > 0) m = a;
  }
  return m;
}

}  // namespace

DiophantineEstimate dioph_estimate(const Scheme& s, const DiophGroup& group,
                                   const std::vector<FVec>& targets,
                                   const std::vector<Rat>& schedule,
                                   int /*threads*/) {
  if (targets.empty()) throw ParamError("no targets");
  if (group.delta <= 0) throw ParamError("delta must be positive");
  for (size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i - 1] < schedule[i]))
      throw ParamError("schedule must be strictly increasing");

  DiophantineEstimate est;
  est.group = group;
  est.targets = targets;
  est.schedule = schedule;

  int r = group.lift.rank();
  int rows = s.d + s.n;
  FMat a(rows, r);
  a.topRows(s.d) = group.phys;
  a.bottomRows(s.n) = group.internal;

  long dn = group.delta.get_num().get_si();  // delta = d_i/n_i reduced
  long nn = group.delta.get_den().get_si();

  double delta_d = Rat(group.delta).get_d();

  // doubles for the hot path
  std::vector<double> ad(static_cast<size_t>(rows) * r);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < r; ++j) ad[i * r + j] = a(i, j).to_double();
  std::vector<std::vector<double>> target_d;
  for (const FVec& t : targets) {
    std::vector<double> td(s.n);
    for (int i = 0; i < s.n; ++i) td[i] = t(i).to_double();
    target_d.push_back(std::move(td));
  }

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    DiophWitness wit;
    std::optional<ExactValue> exact;
  };
  std::vector<Best> best(targets.size());

  double lambda_min = std::numeric_limits<double>::infinity();

  auto consider = [&](const IVec& m) {
    bool zero = true;
    for (int j = 0; j < r; ++j)
      if (m(j) != 0) {
        zero = false;
        break;
      }
    if (zero) return;
    std::vector<double> y(rows, 0.0);
    for (int j = 0; j < r; ++j) {
      double mj = mpz_get_d(m(j).get_mpz_t());
      if (mj == 0) continue;
      for (int i = 0; i < rows; ++i) y[i] += ad[i * r + j] * mj;
    }
    double eta = 0;
    for (int i = 0; i < rows; ++i) eta = std::max(eta, std::abs(y[i]));
    lambda_min = std::min(lambda_min, eta);
    for (size_t t = 0; t < targets.size(); ++t) {
      double dist = 0;
      for (int i = 0; i < s.n; ++i)
        dist = std::max(dist, std::abs(y[s.d + i] - target_d[t][i]));
      double value = dist * std::pow(eta, delta_d);
      Best& b = best[t];
      if (value > b.value * (1.0 + 1e-7) + 1e-300) continue;
      // candidate: exact distance, exact coincidence test, exact min merge
      FVec internal = FVec::Constant(s.n, Fs(0));
      FVec physv = FVec::Constant(s.d, Fs(0));
      for (int j = 0; j < r; ++j) {
        if (m(j) == 0) continue;
        Fs mj((Rat(m(j))));
        for (int i = 0; i < s.n; ++i) internal(i) += group.internal(i, j) * mj;
        for (int i = 0; i < s.d; ++i) physv(i) += group.phys(i, j) * mj;
      }
      FVec diff = internal - targets[t];
      ExactValue ev;
      ev.dist = sup_norm(diff);
      if (ev.dist.is_zero()) continue;  // exact coincidence: skipped
      FVec total(rows);
      total.head(s.d) = physv;
      total.tail(s.n) = internal;
      ev.eta = sup_norm(total);
      bool better;
      if (!b.exact) {
        better = true;
      } else {
        int c = compare_values(ev, *b.exact, dn, nn);
        if (c != 0) {
          better = c < 0;
        } else {
          // deterministic tie-break: lexicographically smallest coordinates
          better = false;
          for (int j = 0; j < r; ++j) {
            if (m(j) == b.wit.coords(j)) continue;
            better = m(j) < b.wit.coords(j);
            break;
          }
        }
      }
      if (better) {
        b.exact = ev;
        b.wit.coords = m;
        b.wit.eta = ev.eta.to_double();
        b.wit.dist = ev.dist.to_double();
        b.wit.value = b.wit.dist * std::pow(b.wit.eta, delta_d);
        b.wit.set = true;
        b.value = b.wit.value;
      }
    }
  };

  // seed pass: the full box at the smallest radius pins lambda_min and the
  // initial minima that bound later slab widths
  Rat r0 = schedule.front();
  {
    QVec lo = QVec::Constant(rows, -r0), hi = QVec::Constant(rows, r0);
    for (int grow = 0; grow < 12; ++grow) {
      BoxEnumerator be(a, lo, hi);
      long count = 0;
      be.run([&](const IVec& m) {
        ++count;
        consider(m);
      });
      if (count > 1) break;  // something nonzero seen
      for (int i = 0; i < rows; ++i) {
        lo(i) *= 2;
        hi(i) *= 2;
      }
    }
  }
  if (!std::isfinite(lambda_min) || lambda_min <= 0)
    throw ParamError("group has no nonzero element in the seed box");

  for (const Rat& radius : schedule) {
    // slab width: elements farther than this from every target cannot beat
    // the current minima
    double worst = 0;
    for (const Best& b : best)
      worst = std::max(worst, b.value / std::pow(lambda_min, delta_d));
    if (!std::isfinite(worst)) worst = Rat(radius).get_d();
    Rat bslab(worst * 1.001 + 1e-9);
    QVec lo(rows), hi(rows);
    for (int i = 0; i < s.d; ++i) {
      lo(i) = -radius;
      hi(i) = radius;
    }
    for (int i = 0; i < s.n; ++i) {
      Rat tmin, tmax;
      for (size_t t = 0; t < targets.size(); ++t) {
        QInterval e = targets[t](i).enclosure(40);
        if (t == 0 || e.lo < tmin) tmin = e.lo;
        if (t == 0 || e.hi > tmax) tmax = e.hi;
      }
      Rat lo_i = tmin - bslab, hi_i = tmax + bslab;
      if (lo_i < -radius) lo_i = -radius;
      if (hi_i > radius) hi_i = radius;
      lo(s.d + i) = lo_i;
      hi(s.d + i) = hi_i;
    }
    BoxEnumerator be(a, lo, hi);
    be.run(consider);

    DiophRecord rec;
    rec.radius = radius;
    for (const Best& b : best) rec.best.push_back(b.wit);
    est.records.push_back(std::move(rec));
  }
  return est;
}

DiophVerdict classify_decay(const DiophantineEstimate& est, int target) {
  // failing iff the floor collapsed by 32x overall and the tail (the last 4
  // schedule points) is still strictly heading down; c(R) is a running
  // minimum, so the tail condition asks for a strict drop inside the window
  const auto& recs = est.records;
  if (recs.size() < 4) return DiophVerdict::EmpiricallyConsistent;
  double first = recs.front().best[target].value;
  double last = recs.back().best[target].value;
  if (!(last < first / 32.0)) return DiophVerdict::EmpiricallyConsistent;
  double tail_start = recs[recs.size() - 4].best[target].value;
  return last < tail_start * (1 - 1e-12) ? DiophVerdict::EmpiricallyFailing
                                         : DiophVerdict::EmpiricallyConsistent;
}

std::string verdict_string(DiophVerdict v) {
  switch (v) {
    case DiophVerdict::Certified:
      return "certified";
    case DiophVerdict::EmpiricallyConsistent:
      return "empirically-consistent";
    case DiophVerdict::EmpiricallyFailing:
      return "empirically-failing";
  }
  return "?";
}

namespace {

DiophGroup factor_group(const Scheme& s, const FactorData& f, const Rat& scale) {
  DiophGroup g;
  QMat basis = QLattice::from_int(f.gamma_i).basis_rational();
  for (int i = 0; i < basis.rows(); ++i)
    for (int j = 0; j < basis.cols(); ++j) basis(i, j) *= scale;
  g.lift = QLattice(s.k, basis);
  FMat bf = to_field(g.lift.basis_rational());
  g.phys = s.proj_phys * bf;
  g.internal = s.proj_int * bf;
  g.delta = f.delta;
  return g;
}

// Ratio of the two 1-D internal generator positions of a rank-2 lattice
// projecting into a line; the quadratic certificate input.
std::optional<Fs> line_generator_ratio(const Scheme& s, const IntLattice& l) {
  if (l.rank() != 2) return std::nullopt;
  FVec u1(s.n), u2(s.n);
  IVec c1(s.k), c2(s.k);
  for (int i = 0; i < s.k; ++i) {
    c1(i) = l.basis(i, 0);
    c2(i) = l.basis(i, 1);
  }
  u1 = s.star(c1);
  u2 = s.star(c2);
  int lead = -1;
  for (int i = 0; i < s.n; ++i)
    if (!u1(i).is_zero()) {
      lead = i;
      break;
    }
  if (lead < 0) return std::nullopt;
  Fs ratio = u2(lead) / u1(lead);
  if (ratio.is_rational()) return std::nullopt;
  return ratio;
}

}  // namespace

CheckDResult check_D(const Scheme& s, const ComplexityReport& rep,
                     const std::vector<Rat>& schedule, int threads) {
  if (!rep.C) throw ParamError("check_D requires property C");
  const Scheme& base = rep.analyzed;
  CheckDResult out;
  std::vector<FVec> zero{FVec::Constant(base.n, Fs(0))};
  for (size_t i = 0; i < rep.decomposition.factors.size(); ++i) {
    const FactorData& f = rep.decomposition.factors[i];
    FactorCheck fc;
    fc.factor = static_cast<int>(i);
    DiophGroup g = factor_group(base, f, Rat(1));
    g.name = "factor" + std::to_string(i);
    fc.estimate = dioph_estimate(base, g, zero, schedule, threads);
    fc.verdict = classify_decay(fc.estimate, 0);
    // certificate path: 2-to-1 factor over a quadratic field
    if (f.n_i == 1 && f.k_i == 2 && base.field->degree() == 2) {
      auto ratio = line_generator_ratio(base, f.gamma_i);
      if (ratio) {
        QuadCertificate cert = is_bad_quadratic(*ratio);
        if (cert.applicable) {
          fc.certificate = cert;
          fc.verdict = DiophVerdict::Certified;
        }
      }
    }
    out.factors.push_back(std::move(fc));
  }
  // supporting evidence: rank-2 stabilisers whose projected generator ratio
  // is a quadratic irrational
  if (base.field->degree() == 2) {
    for (size_t i = 0; i < rep.stabilisers.size(); ++i) {
      const StabiliserInfo& st = rep.stabilisers[i];
      if (st.rank != 2 || st.beta != 1) continue;
      auto ratio = line_generator_ratio(base, st.lattice);
      if (!ratio) continue;
      QuadCertificate cert = is_bad_quadratic(*ratio);
      if (cert.applicable)
        out.stabiliser_evidence.push_back({static_cast<int>(i), cert});
    }
  }
  out.overall = DiophVerdict::Certified;
  for (const FactorCheck& fc : out.factors) {
    if (fc.verdict == DiophVerdict::EmpiricallyFailing) {
      out.overall = DiophVerdict::EmpiricallyFailing;
      break;
    }
    if (fc.verdict == DiophVerdict::EmpiricallyConsistent &&
        out.overall == DiophVerdict::Certified)
      out.overall = DiophVerdict::EmpiricallyConsistent;
  }
  return out;
}

CheckDFResult check_DF(const Scheme& s, const ComplexityReport& rep,
                       const std::vector<Rat>& schedule, long scale_N,
                       int threads) {
  if (!rep.C) throw ParamError("check_DF requires property C");
  if (scale_N < 1) throw ParamError("scale N must be >= 1");
  const Scheme& base = rep.analyzed;
  CheckDFResult out;
  out.scale_N = scale_N;
  for (size_t i = 0; i < rep.decomposition.factors.size(); ++i) {
    const FactorData& f = rep.decomposition.factors[i];
    FactorCheck fc;
    fc.factor = static_cast<int>(i);
    DiophGroup g = factor_group(base, f, make_rat(Int(1), Int(scale_N)));
    g.name = "factor" + std::to_string(i) + "_over" + std::to_string(scale_N);
    const std::vector<FVec>& targets = rep.F_split[i];
    fc.estimate = dioph_estimate(base, g, targets, schedule, threads);
    fc.verdict = DiophVerdict::EmpiricallyConsistent;
    for (size_t t = 0; t < targets.size(); ++t)
      if (classify_decay(fc.estimate, static_cast<int>(t)) ==
          DiophVerdict::EmpiricallyFailing)
        fc.verdict = DiophVerdict::EmpiricallyFailing;
    out.factors.push_back(std::move(fc));
  }
  out.overall = DiophVerdict::EmpiricallyConsistent;
  for (const FactorCheck& fc : out.factors)
    if (fc.verdict == DiophVerdict::EmpiricallyFailing)
      out.overall = DiophVerdict::EmpiricallyFailing;
  return out;
}

FlagConditionResult check_flag_condition(const Scheme& s,
                                         const ComplexityReport& rep,
                                         const std::vector<Rat>& schedule,
                                         int threads) {
  if (!rep.C) throw ParamError("flag condition requires property C");
  const Scheme& base = rep.analyzed;
  FlagConditionResult out;

  // factor splitting data
  const auto& factors = rep.decomposition.factors;
  int l = static_cast<int>(factors.size());
  FMat joint(base.n, base.n);
  {
    int at = 0;
    for (const FactorData& f : factors) {
      joint.middleCols(at, f.n_i) = f.basis;
      at += f.n_i;
    }
  }
  auto project_factor = [&](const FVec& v, int i) {
    if (l == 1) return v;
    FVec coords = solve_square<Fs>(joint, v);
    FVec comp = FVec::Constant(base.n, Fs(0));
    int at = 0;
    for (int t = 0; t < i; ++t) at += factors[t].n_i;
    for (int j = 0; j < factors[i].n_i; ++j)
      for (int q = 0; q < base.n; ++q)
        comp(q) += factors[i].basis(q, j) * coords(at + j);
    return comp;
  };

  // one estimator run per (subspace-flag pair, factor) with the distinct
  // targets collected over concrete flag pairs
  for (int a = 0; a < static_cast<int>(rep.flags0.size()); ++a) {
    for (int b = a; b < static_cast<int>(rep.flags0.size()); ++b) {
      if (!rep.flag_groups[a].finite || !rep.flag_groups[b].finite)
        throw ParamError("flag group of infinite index: C does not hold");
      QLattice pair = flag_group_pair(rep, a, b);
      for (int i = 0; i < l; ++i) {
        // restrict the pair group to the factor subspace
        QMat basis = pair.basis_rational();
        FMat bf = to_field(basis);
        FMat img = base.proj_int * bf;
        // conditions: normal_V . img = 0 for V absent from this factor
        std::vector<int> absent;
        for (int ci = 0; ci < static_cast<int>(rep.subspaces.size()); ++ci)
          if (std::find(factors[i].active.begin(), factors[i].active.end(),
                        ci) == factors[i].active.end())
            absent.push_back(ci);
        QLattice group_i = pair;
        if (!absent.empty()) {
          FMat rows(static_cast<int>(absent.size()), pair.rank());
          for (size_t t = 0; t < absent.size(); ++t)
            for (int j = 0; j < pair.rank(); ++j) {
              Fs acc(0);
              for (int q = 0; q < base.n; ++q)
                acc += rep.subspaces[absent[t]](q) * img(q, j);
              rows(static_cast<int>(t), j) = acc;
            }
          IntLattice coords =
              integer_kernel(rational_restriction(rows, base.field->degree()));
          QMat sub = basis * to_rational(coords.basis);
          group_i = QLattice(base.k, sub);
        }
        DiophGroup g;
        g.lift = group_i;
        FMat gb = to_field(group_i.basis_rational());
        g.phys = base.proj_phys * gb;
        g.internal = base.proj_int * gb;
        g.delta = factors[i].delta;
        g.name = "flags" + std::to_string(a) + "_" + std::to_string(b) +
                 "_factor" + std::to_string(i);

        std::vector<FVec> targets;
        for (const ConcreteFlag& fa : rep.flags) {
          if (fa.subspace_flag != a) continue;
          for (const ConcreteFlag& fb : rep.flags) {
            if (fb.subspace_flag != b) continue;
            FVec t = project_factor(fb.vertex - fa.vertex, i);
            bool dup = false;
            for (const FVec& u : targets)
              if (compare_scalars_lex(u, t) == 0) {
                dup = true;
                break;
              }
            if (!dup) targets.push_back(t);
          }
        }
        if (targets.empty()) continue;
        FlagConditionRun run;
        run.flag0_a = a;
        run.flag0_b = b;
        run.factor = i;
        run.estimate = dioph_estimate(base, g, targets, schedule, threads);
        run.verdict = DiophVerdict::EmpiricallyConsistent;
        for (size_t t = 0; t < targets.size(); ++t)
          if (classify_decay(run.estimate, static_cast<int>(t)) ==
              DiophVerdict::EmpiricallyFailing)
            run.verdict = DiophVerdict::EmpiricallyFailing;
        out.runs.push_back(std::move(run));
      }
    }
  }
  out.overall = DiophVerdict::EmpiricallyConsistent;
  for (const FlagConditionRun& r : out.runs)
    if (r.verdict == DiophVerdict::EmpiricallyFailing)
      out.overall = DiophVerdict::EmpiricallyFailing;
  return out;
}

}  // namespace cps
