#include "polycut/scheme.hpp"

#include <algorithm>

namespace cps {

namespace {

FVec apply(const FMat& m, const IVec& x) {
  FVec out(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    Fs acc(0);
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * Fs(Rat(x(j)));
    out(i) = acc;
  }
  return out;
}

// Rational enclosure bounds of the window bbox, slightly widened; used as
// enumeration bounds (the exact membership test is applied afterwards).
std::pair<QVec, QVec> rational_bbox(const Window& w) {
  auto [lo, hi] = w.bbox();
  QVec qlo(lo.size()), qhi(hi.size());
  Rat pad;
  mpq_div_2exp(pad.get_mpq_t(), Rat(1).get_mpq_t(), 20);
  for (int i = 0; i < lo.size(); ++i) {
    qlo(i) = lo(i).enclosure(40).lo - pad;
    qhi(i) = hi(i).enclosure(40).hi + pad;
  }
  return {qlo, qhi};
}

FMat stacked(const Scheme& s) {
  FMat m(s.k, s.k);
  m.topRows(s.d) = s.proj_phys;
  m.bottomRows(s.n) = s.proj_int;
  return m;
}

}  // namespace

FVec Scheme::star(const IVec& x) const { return apply(proj_int, x); }
FVec Scheme::phys(const IVec& x) const { return apply(proj_phys, x); }

long Scheme::kappa_of(const IVec& x) const {
  if (!cyclic) return 0;
  Int acc = 0;
  for (int i = 0; i < k; ++i) acc += cyclic->kappa(i) * x(i);
  Int m(cyclic->modulus);
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
  return r.get_si();
}

ValidationReport validate_scheme(const Scheme& s, const Rat& singular_scan_bound) {
  ValidationReport rep;
  Rat bound = singular_scan_bound;
  if (bound == 0) bound = Rat(s.k <= 2 ? 32 : s.k <= 4 ? 8 : 2);
  rep.singular_bound = bound;
  if (s.k != s.d + s.n || s.proj_phys.rows() != s.d ||
      s.proj_phys.cols() != s.k || s.proj_int.rows() != s.n ||
      s.proj_int.cols() != s.k || s.d < 1 || s.n < 1) {
    rep.failures.push_back("inconsistent dimensions");
    return rep;
  }
  rep.shapes_ok = true;

  int g = s.field->degree();
  rep.stacked_invertible = exact_rank<Fs>(stacked(s)) == s.k;
  if (!rep.stacked_invertible)
    rep.failures.push_back("stacked projection matrix is singular");

  rep.phys_injective =
      integer_kernel(rational_restriction(s.proj_phys, g)).rank() == 0;
  if (!rep.phys_injective)
    rep.failures.push_back("physical projection not injective on the lattice");

  rep.int_injective =
      integer_kernel(rational_restriction(s.proj_int, g)).rank() == 0;
  if (!rep.int_injective)
    rep.failures.push_back(
        "internal projection not injective on the lattice (periodic)");

  // Density of the projected lattice: fails iff a nonzero integer vector lies
  // in the field row space of proj_int, i.e. annihilates its nullspace.
  {
    FMat ns = nullspace<Fs>(s.proj_int);
    if (ns.cols() == 0) {
      rep.dense = s.n == s.k;  // square injective case: image is all of R^n
    } else {
      FMat nst = ns.transpose();
      IntLattice integral = integer_kernel(rational_restriction(nst, g));
      rep.dense = integral.rank() == 0;
    }
    if (!rep.dense)
      rep.failures.push_back("projected lattice is not dense in internal space");
  }

  // Window validity (and cyclic-slice validity when present).
  try {
    if (s.cyclic) {
      const CyclicData& c = *s.cyclic;
      if (c.modulus < 1) throw InvalidWindow("cyclic modulus must be >= 1");
      Int g0(c.modulus);
      for (int i = 0; i < c.kappa.size(); ++i)
        mpz_gcd(g0.get_mpz_t(), g0.get_mpz_t(), c.kappa(i).get_mpz_t());
      if (g0 != 1 && c.modulus > 1)
        throw InvalidWindow("kappa is not surjective onto Z/m");
      for (const auto& [res, win] : c.windows) {
        win.validate();
        auto it = c.shifts.find(res);
        if (it == c.shifts.end()) {
          if (res != 0)
            throw InvalidWindow("missing shift for residue " +
                                std::to_string(res));
        } else {
          Scheme tmp = s;
          if (tmp.kappa_of(it->second) != ((res % c.modulus) + c.modulus) % c.modulus)
            throw InvalidWindow("shift residue mismatch for residue " +
                                std::to_string(res));
        }
      }
      if (c.windows.empty()) throw InvalidWindow("cyclic data with no windows");
    } else {
      s.plain_window().validate();
    }
    rep.window_valid = true;
  } catch (const std::exception& e) {
    rep.failures.push_back(e.what());
  }

  // Bounded nonsingularity scan: no lattice point of total norm <= bound may
  // project onto a supporting hyperplane of (its) window.
  if (rep.assumptions_pass() && !s.cyclic) {
    SupportData sup = supporting_hyperplanes(s.plain_window());
    for (const IVec& g2 : lattice_ball(s, bound)) {
      FVec p = s.star(g2);
      for (const Hyperplane& h : sup.hyperplanes)
        if (h.eval(p).is_zero()) {
          rep.nonsingular_up_to_bound = false;
          rep.singular_witnesses.push_back(g2);
          break;
        }
      if (rep.singular_witnesses.size() >= 8) break;
    }
  }
  return rep;
}

std::vector<IVec> lattice_ball(const Scheme& s, const Rat& r) {
  FMat a = stacked(s);
  QVec lo = QVec::Constant(s.k, -r), hi = QVec::Constant(s.k, r);
  BoxEnumerator be(a, lo, hi);
  std::vector<IVec> out;
  be.run([&](const IVec& m) { out.push_back(m); });
  return out;
}

Scheme reduce_cyclic(const Scheme& s) {
  if (!s.cyclic) return s;
  const CyclicData& c = *s.cyclic;
  // ker(kappa) via the integer kernel of [kappa | -m] projected back.
  IMat row(1, s.k + 1);
  for (int i = 0; i < s.k; ++i) row(0, i) = c.kappa(i);
  row(0, s.k) = Int(-c.modulus);
  IMat ker = integer_kernel_basis(row);        // (k+1) x k
  IMat basis = hnf_columns(ker.topRows(s.k));  // k x k, index m in Z^k
  if (basis.cols() != s.k)
    throw InvalidWindow("kappa kernel does not have full rank");

  Scheme out;
  out.field = s.field;
  out.k = s.k;
  out.d = s.d;
  out.n = s.n;
  FMat bf(s.k, s.k);
  for (int i = 0; i < s.k; ++i)
    for (int j = 0; j < s.k; ++j) bf(i, j) = Fs(Rat(basis(i, j)));
  out.proj_phys = s.proj_phys * bf;
  out.proj_int = s.proj_int * bf;

  Window w;
  for (const auto& [res, win] : c.windows) {
    FVec shift_int;
    if (auto it = c.shifts.find(res); it != c.shifts.end()) {
      shift_int = s.star(it->second);
    } else if (res == 0) {
      shift_int = FVec::Constant(s.n, Fs(0));
    } else {
      throw InvalidWindow("missing shift for residue " + std::to_string(res));
    }
    FVec neg = -shift_int;
    for (const ConvexPiece& p : win.pieces) w.pieces.push_back(p.translated(neg));
  }
  w.validate();
  out.window = std::move(w);
  return out;
}

namespace {

// Deterministic stream of candidate lattice vectors ordered by coordinate
// sup-norm shells, lexicographic within a shell.
void for_each_candidate(int k, long bound,
                        const std::function<bool(const IVec&)>& take) {
  IVec v = IVec::Constant(k, Int(0));
  std::function<bool(int, long, bool)> rec = [&](int t, long shell,
                                                 bool touched) -> bool {
    if (t == k) return touched ? take(v) : true;
    for (long x = -shell; x <= shell; ++x) {
      v(t) = Int(x);
      bool now = touched || std::labs(x) == shell;
      if (t + 1 == k && !now) continue;
      if (!rec(t + 1, shell, now)) return false;
    }
    return true;
  };
  for (long shell = 0; shell <= bound; ++shell)
    if (!rec(0, shell, shell == 0)) return;
}

}  // namespace

Scheme unlabel(const Scheme& s, long search_bound) {
  if (s.cyclic)
    throw InvalidWindow("unlabel expects a reduced (cyclic-free) scheme");
  const Window& w = s.plain_window();
  if (!w.labelled()) return s;
  if (s.n > 2)
    throw UnsupportedDimension("unlabel needs exact disjointness, n <= 2 only");

  SupportData before = supporting_hyperplanes(w);
  std::vector<ConvexPiece> placed;
  for (size_t i = 0; i < w.pieces.size(); ++i) {
    const ConvexPiece& piece = w.pieces[i];
    bool ok = false;
    if (i == 0) {
      placed.push_back(piece);
      ok = true;
    } else {
      for_each_candidate(s.k, search_bound, [&](const IVec& g) {
        FVec t = s.star(g);
        ConvexPiece cand = piece.translated(t);
        for (const ConvexPiece& q : placed)
          if (!pieces_disjoint(cand, q)) return true;  // keep searching
        placed.push_back(std::move(cand));
        ok = true;
        return false;  // stop
      });
    }
    if (!ok)
      throw InvalidWindow(
          "unlabel: no separating translate within coordinate bound " +
          std::to_string(search_bound));
  }
  Window out;
  out.pieces = placed;
  out = out.without_labels();
  out.validate();

  // Prop-level contract: the supporting subspaces are preserved exactly.
  SupportData after = supporting_hyperplanes(out);
  if (before.subspaces.size() != after.subspaces.size())
    throw InvalidWindow("unlabel changed the supporting subspaces");
  for (size_t i = 0; i < before.subspaces.size(); ++i)
    if (compare_scalars_lex(before.subspaces[i], after.subspaces[i]) != 0)
      throw InvalidWindow("unlabel changed the supporting subspaces");

  Scheme r = s;
  r.window = std::move(out);
  return r;
}

PointPattern generate_pattern(const Scheme& s, const Rat& box_radius) {
  if (box_radius < 0) throw std::invalid_argument("negative box radius");
  const Scheme* sch = &s;
  Scheme reduced;
  if (s.cyclic) {
    reduced = reduce_cyclic(s);
    sch = &reduced;
  }
  const Window& w = sch->plain_window();
  w.validate();

  std::map<std::vector<long>, PatternPoint> found;  // dedup across pieces
  FMat a = stacked(*sch);
  for (const ConvexPiece& piece : w.pieces) {
    Window one;
    one.pieces.push_back(piece);
    auto [wlo, whi] = rational_bbox(one);
    QVec lo(sch->k), hi(sch->k);
    for (int i = 0; i < sch->d; ++i) {
      lo(i) = -box_radius;
      hi(i) = box_radius;
    }
    for (int i = 0; i < sch->n; ++i) {
      lo(sch->d + i) = wlo(i);
      hi(sch->d + i) = whi(i);
    }
    BoxEnumerator be(a, lo, hi);
    be.run([&](const IVec& m) {
      std::vector<long> key(sch->k);
      for (int i = 0; i < sch->k; ++i) key[i] = m(i).get_si();
      if (found.count(key)) return;
      FVec ph = sch->phys(m);
      // exact physical box test
      for (int i = 0; i < sch->d; ++i) {
        int c1 = compare(ph(i), Fs(box_radius));
        int c2 = compare(ph(i), Fs(-box_radius));
        if (c1 > 0 || c2 < 0) return;
      }
      FVec st = sch->star(m);
      std::optional<std::string> label;
      bool inside = false;
      for (const ConvexPiece& p : w.pieces) {
        if (p.contains_interior(st)) {
          inside = true;
          label = p.label;
          break;
        }
        if (p.contains_boundary(st))
          throw SingularityError(
              m, "lattice point projects onto a supporting hyperplane");
      }
      if (!inside) return;
      PatternPoint pt;
      pt.lattice = m;
      pt.physical = std::move(ph);
      pt.label = std::move(label);
      found.emplace(std::move(key), std::move(pt));
    });
  }
  PointPattern out;
  out.box_radius = box_radius;
  for (auto& [k2, pt] : found) out.points.push_back(std::move(pt));
  return out;
}

}  // namespace cps
