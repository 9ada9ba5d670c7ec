#include "polycut/complexity.hpp"

#include <algorithm>

namespace cps {

namespace {

Fs dot(const FVec& a, const FVec& b) {
  Fs acc(0);
  for (int i = 0; i < a.size(); ++i) acc += a(i) * b(i);
  return acc;
}

// Solve proj_int * x = target over Q; the rational lift of an internal point.
std::optional<QVec> rational_lift(const Scheme& s, const FVec& target) {
  int g = s.field->degree();
  QMat a = rational_restriction(s.proj_int, g);
  QVec b(s.n * g);
  for (int i = 0; i < s.n; ++i) {
    std::vector<Rat> c = target(i).coeffs_padded(g);
    for (int t = 0; t < g; ++t) b(i * g + t) = c[t];
  }
  return solve_consistent<Rat>(a, b);
}

// Intersection of the column space of x with the subspaces given by normals:
// basis of {v in span(x) : normal . v = 0 for all normals}.
FMat intersect_with(const FMat& x, const std::vector<FVec>& normals) {
  if (normals.empty()) return x;
  FMat rows(static_cast<int>(normals.size()), x.cols());
  for (size_t i = 0; i < normals.size(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      Fs acc(0);
      for (int t = 0; t < x.rows(); ++t) acc += normals[i](t) * x(t, j);
      rows(static_cast<int>(i), j) = acc;
    }
  FMat coords = nullspace<Fs>(rows);
  return x * coords;
}

}  // namespace

StabiliserInfo stabiliser(const Scheme& s, const std::vector<FVec>& normals) {
  if (normals.empty())
    throw std::invalid_argument("stabiliser of the empty set is Gamma itself");
  int g = s.field->degree();
  FMat rows(static_cast<int>(normals.size()), s.k);
  for (size_t i = 0; i < normals.size(); ++i)
    for (int j = 0; j < s.k; ++j) {
      Fs acc(0);
      for (int t = 0; t < s.n; ++t) acc += normals[i](t) * s.proj_int(t, j);
      rows(static_cast<int>(i), j) = acc;
    }
  StabiliserInfo info;
  info.subspace_normal = normals[0];
  info.lattice = integer_kernel(rational_restriction(rows, g));
  info.rank = info.lattice.rank();
  // beta: dimension of the real span of the projected stabiliser
  FMat proj(s.n, info.rank);
  for (int j = 0; j < info.rank; ++j) {
    IVec col(s.k);
    for (int i = 0; i < s.k; ++i) col(i) = info.lattice.basis(i, j);
    proj.col(j) = s.star(col);
  }
  info.beta = exact_rank<Fs>(proj);
  info.alpha_H = s.d - info.rank + info.beta;
  return info;
}

FlagEnumeration enumerate_flags(const Scheme& s) {
  FlagEnumeration out;
  SupportData sup = supporting_hyperplanes(s.plain_window());
  out.hyperplanes = sup.hyperplanes;
  out.subspaces = sup.subspaces;
  int h0 = static_cast<int>(out.subspaces.size());

  // subsets of script-H_0 of size n whose normals are independent
  std::vector<int> idx(s.n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == s.n) {
      FMat m(s.n, s.n);
      for (int i = 0; i < s.n; ++i) m.row(i) = out.subspaces[idx[i]].transpose();
      if (exact_rank<Fs>(m) == s.n) {
        SubspaceFlag f;
        f.members.assign(idx.begin(), idx.end());
        out.flags0.push_back(std::move(f));
      }
      return;
    }
    for (int i = start; i < h0; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  if (out.flags0.empty())
    throw InvalidWindow(
        "no flag of supporting subspaces: window cannot be compact");

  // concrete flags: n-subsets of script-H whose subspace set is a flag
  auto subspace_index = [&](const Hyperplane& h) {
    for (int i = 0; i < h0; ++i)
      if (compare_scalars_lex(h.normal, out.subspaces[i]) == 0) return i;
    return -1;
  };
  std::vector<int> hsub(out.hyperplanes.size());
  for (size_t i = 0; i < out.hyperplanes.size(); ++i)
    hsub[i] = subspace_index(out.hyperplanes[i]);

  auto flag0_of = [&](std::vector<int> subs) -> int {
    std::sort(subs.begin(), subs.end());
    for (size_t i = 0; i < out.flags0.size(); ++i)
      if (out.flags0[i].members == subs) return static_cast<int>(i);
    return -1;
  };

  std::vector<int> pick(s.n);
  int hn = static_cast<int>(out.hyperplanes.size());
  std::function<void(int, int)> rec2 = [&](int start, int depth) {
    if (depth == s.n) {
      std::vector<int> subs(s.n);
      for (int i = 0; i < s.n; ++i) subs[i] = hsub[pick[i]];
      std::sort(subs.begin(), subs.end());
      if (std::adjacent_find(subs.begin(), subs.end()) != subs.end()) return;
      int f0 = flag0_of(subs);
      if (f0 < 0) return;
      FMat m(s.n, s.n);
      FVec rhs(s.n);
      for (int i = 0; i < s.n; ++i) {
        m.row(i) = out.hyperplanes[pick[i]].normal.transpose();
        rhs(i) = out.hyperplanes[pick[i]].offset;
      }
      ConcreteFlag f;
      f.members.assign(pick.begin(), pick.end());
      f.subspace_flag = f0;
      f.vertex = solve_square<Fs>(m, rhs);
      out.flags.push_back(std::move(f));
      return;
    }
    for (int i = start; i < hn; ++i) {
      pick[depth] = i;
      rec2(i + 1, depth + 1);
    }
  };
  rec2(0, 0);
  return out;
}

FlagGroupInfo flag_group(const Scheme& s, const ComplexityReport& rep, int flag0) {
  const SubspaceFlag& f = rep.flags0[flag0];
  FlagGroupInfo out;
  out.flag0 = flag0;

  // N: rows = flag normals. The generator attached to (member t, basis e_j)
  // is the unique v with nu_t . v = nu_t . star(e_j) and nu_t' . v = 0: i.e.
  // v = (nu_t . star(e_j)) * w_t for w_t the t-th column of N^{-1}.
  FMat nmat(s.n, s.n);
  for (int t = 0; t < s.n; ++t)
    nmat.row(t) = rep.subspaces[f.members[t]].transpose();
  FMat ninv = exact_inverse<Fs>(nmat);

  std::vector<QVec> lifts;
  bool all_rational = true;
  for (int t = 0; t < s.n && all_rational; ++t) {
    FVec w = ninv.col(t);
    for (int j = 0; j < s.k; ++j) {
      IVec e = IVec::Constant(s.k, Int(0));
      e(j) = 1;
      Fs c = dot(rep.subspaces[f.members[t]], s.star(e));
      if (c.is_zero()) continue;
      FVec gen(s.n);
      for (int i = 0; i < s.n; ++i) gen(i) = c * w(i);
      auto lift = rational_lift(s, gen);
      if (!lift) {
        all_rational = false;
        break;
      }
      lifts.push_back(*lift);
    }
  }
  out.finite = all_rational;
  if (!all_rational) {
    out.index_over_gamma.kind = LatticeIndex::Infinite;
    return out;
  }
  QMat gens(s.k, static_cast<int>(lifts.size()) + s.k);
  for (int j = 0; j < s.k; ++j)
    for (int i = 0; i < s.k; ++i) gens(i, j) = Rat(i == j ? 1 : 0);
  for (size_t t = 0; t < lifts.size(); ++t)
    for (int i = 0; i < s.k; ++i) gens(i, s.k + static_cast<int>(t)) = lifts[t](i);
  out.lattice = QLattice(s.k, gens);
  out.index_over_gamma =
      hnf_and_index(QLattice::from_int(IntLattice::full(s.k)), out.lattice);
  FMat basis = to_field(out.lattice.basis_rational());
  out.internal_images = s.proj_int * basis;
  return out;
}

QLattice flag_group_pair(const ComplexityReport& rep, int f0a, int f0b) {
  return lattice_sum(rep.flag_groups[f0a].lattice, rep.flag_groups[f0b].lattice);
}

HomogeneityVerdict check_weak_homogeneity(const Scheme& s,
                                          const std::vector<Hyperplane>& hyperplanes,
                                          const ConcreteFlag& flag, long n_max) {
  HomogeneityVerdict v;
  int m = static_cast<int>(hyperplanes.size());
  int g = s.field->degree();

  // unknowns: one lattice vector per hyperplane, stacked; the common point p
  // is pinned by the flag members' translated planes and eliminated
  FMat nf(s.n, s.n);
  for (int t = 0; t < s.n; ++t)
    nf.row(t) = hyperplanes[flag.members[t]].normal.transpose();
  FMat nf_inv = exact_inverse<Fs>(nf);

  std::vector<FMat> rows_int(m);  // normal_H * proj_int, 1 x k each
  for (int h = 0; h < m; ++h) {
    FMat r(1, s.k);
    for (int j = 0; j < s.k; ++j) {
      Fs acc(0);
      for (int t = 0; t < s.n; ++t)
        acc += hyperplanes[h].normal(t) * s.proj_int(t, j);
      r(0, j) = acc;
    }
    rows_int[h] = r;
  }

  std::vector<int> others;
  for (int h = 0; h < m; ++h)
    if (std::find(flag.members.begin(), flag.members.end(), h) ==
        flag.members.end())
      others.push_back(h);

  if (others.empty()) {
    v.kind = HomogeneityVerdict::Homogeneous;
    v.witness_N = 1;
    return v;
  }

  // equations over the field: for H not in the flag,
  //   -sum_i u_i (r_i . z_i) + r_H . z_H = offset_H - sum_i u_i offset_i,
  // with u = nf^{-T} normal_H and z_* the unknown lattice vectors.
  int cols = m * s.k;
  FMat a = FMat::Constant(static_cast<int>(others.size()), cols, Fs(0));
  FVec b(static_cast<int>(others.size()));
  for (size_t e = 0; e < others.size(); ++e) {
    int h = others[e];
    FVec u = nf_inv.transpose() * hyperplanes[h].normal;
    Fs rhs = hyperplanes[h].offset;
    for (int t = 0; t < s.n; ++t) {
      rhs -= u(t) * hyperplanes[flag.members[t]].offset;
      for (int j = 0; j < s.k; ++j)
        a(static_cast<int>(e), flag.members[t] * s.k + j) +=
            -u(t) * rows_int[flag.members[t]](0, j);
    }
    for (int j = 0; j < s.k; ++j)
      a(static_cast<int>(e), h * s.k + j) += rows_int[h](0, j);
    b(static_cast<int>(e)) = rhs;
  }

  QMat aq = rational_restriction(a, g);
  QVec bq(aq.rows());
  for (size_t e = 0; e < others.size(); ++e) {
    std::vector<Rat> c = b(static_cast<int>(e)).coeffs_padded(g);
    for (int t = 0; t < g; ++t) bq(static_cast<int>(e) * g + t) = c[t];
  }
  // clear denominators per row
  IMat ai(aq.rows(), aq.cols());
  IVec bi(aq.rows());
  for (int i = 0; i < aq.rows(); ++i) {
    Int lcm = bq(i).get_den();
    for (int j = 0; j < aq.cols(); ++j) {
      Int d = aq(i, j).get_den();
      Int gg;
      mpz_lcm(gg.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
      lcm = gg;
    }
    for (int j = 0; j < aq.cols(); ++j) {
      Rat scaled = aq(i, j) * Rat(lcm);
      ai(i, j) = scaled.get_num();
    }
    Rat sb = bq(i) * Rat(lcm);
    bi(i) = sb.get_num();
  }

  // rational solvability first: conclusive negative if none
  {
    QVec bq2(ai.rows());
    for (int i = 0; i < ai.rows(); ++i) bq2(i) = Rat(bi(i));
    if (!solve_consistent<Rat>(to_rational(ai), bq2)) {
      v.kind = HomogeneityVerdict::NotWithinBound;
      v.note =
          "concurrency system has no rational solution; not weakly "
          "homogeneous for any N";
      return v;
    }
  }

  // integer solvability of A z = N b through the column HNF
  IMat h = hnf_columns(ai);
  auto solvable = [&](long N) {
    // forward substitution in the echelon columns
    IVec target = bi * Int(N);
    QVec rem(ai.rows());
    for (int i = 0; i < ai.rows(); ++i) rem(i) = Rat(target(i));
    for (int c = 0; c < h.cols(); ++c) {
      // pivot row of column c
      int pr = -1;
      for (int i = 0; i < h.rows(); ++i)
        if (h(i, c) != 0) {
          pr = i;
          break;
        }
      if (pr < 0) continue;
      Rat coef = rem(pr) / Rat(h(pr, c));
      if (coef.get_den() != 1) return false;
      for (int i = 0; i < h.rows(); ++i) rem(i) -= coef * Rat(h(i, c));
    }
    for (int i = 0; i < ai.rows(); ++i)
      if (rem(i) != 0) return false;
    return true;
  };
  for (long N = 1; N <= n_max; ++N) {
    if (solvable(N)) {
      v.kind = N == 1 ? HomogeneityVerdict::Homogeneous
                      : HomogeneityVerdict::WeaklyHomogeneous;
      v.witness_N = N;
      return v;
    }
  }
  v.kind = HomogeneityVerdict::NotWithinBound;
  v.note = "no admissible N up to the bound " + std::to_string(n_max);
  return v;
}

namespace {

DecompositionData find_decomposition_impl(const Scheme& s,
                                          const std::vector<FVec>& subspaces) {
  DecompositionData out;
  int h0 = static_cast<int>(subspaces.size());

  struct Part {
    std::vector<int> classes;
    FMat basis;  // of X for this part
  };
  std::vector<Part> parts;
  {
    Part whole;
    for (int i = 0; i < h0; ++i) whole.classes.push_back(i);
    whole.basis = FMat::Identity(s.n, s.n);
    parts.push_back(std::move(whole));
  }

  // Recursive binary refinement: split a part's class set A|B so that
  // (X cap all of B) + (X cap all of A) is a direct sum equal to X.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t pi = 0; pi < parts.size() && !changed; ++pi) {
      const Part& part = parts[pi];
      size_t m = part.classes.size();
      if (m < 2) continue;
      for (unsigned long mask = 1; mask < (1ul << (m - 1)); ++mask) {
        std::vector<FVec> na, nb;
        std::vector<int> ca, cb;
        for (size_t i = 0; i < m; ++i) {
          if (mask & (1ul << i)) {
            ca.push_back(part.classes[i]);
            na.push_back(subspaces[part.classes[i]]);
          } else {
            cb.push_back(part.classes[i]);
            nb.push_back(subspaces[part.classes[i]]);
          }
        }
        FMat xa = intersect_with(part.basis, nb);  // active classes: A
        FMat xb = intersect_with(part.basis, na);  // active classes: B
        if (xa.cols() == 0 || xb.cols() == 0) continue;
        if (xa.cols() + xb.cols() != part.basis.cols()) continue;
        FMat joint(s.n, xa.cols() + xb.cols());
        joint.leftCols(xa.cols()) = xa;
        joint.rightCols(xb.cols()) = xb;
        if (exact_rank<Fs>(joint) != part.basis.cols()) continue;
        Part a{ca, xa}, b{cb, xb};
        parts.erase(parts.begin() + static_cast<long>(pi));
        parts.push_back(std::move(a));
        parts.push_back(std::move(b));
        changed = true;
        break;
      }
    }
  }
  out.decomposable = parts.size() > 1;

  // canonical order: by smallest class index
  std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) {
    return a.classes.front() < b.classes.front();
  });

  for (const Part& part : parts) {
    FactorData f;
    f.active = part.classes;
    f.basis = part.basis;
    f.n_i = static_cast<int>(part.basis.cols());
    if (parts.size() == 1) {
      f.gamma_i = IntLattice::full(s.k);
    } else {
      std::vector<FVec> absent;
      for (int i = 0; i < h0; ++i)
        if (std::find(part.classes.begin(), part.classes.end(), i) ==
            part.classes.end())
          absent.push_back(subspaces[i]);
      if (absent.empty()) {
        f.gamma_i = IntLattice::full(s.k);
      } else {
        f.gamma_i = stabiliser(s, absent).lattice;
      }
    }
    f.k_i = f.gamma_i.rank();
    f.d_i = f.k_i - f.n_i;
    f.delta = Rat(f.d_i, f.n_i);
    f.delta.canonicalize();
    out.factors.push_back(std::move(f));
  }
  return out;
}

}  // namespace

ComplexityReport complexity_exponent(const Scheme& s, long homogeneity_nmax,
                                     long unlabel_bound) {
  Scheme base = s.cyclic ? reduce_cyclic(s) : s;
  if (base.plain_window().labelled()) base = unlabel(base, unlabel_bound);

  ComplexityReport rep;
  rep.analyzed = base;
  FlagEnumeration fe = enumerate_flags(base);
  rep.hyperplanes = std::move(fe.hyperplanes);
  rep.subspaces = std::move(fe.subspaces);
  rep.flags0 = std::move(fe.flags0);
  rep.flags = std::move(fe.flags);

  for (const FVec& nu : rep.subspaces)
    rep.stabilisers.push_back(stabiliser(base, {nu}));

  rep.alpha = 0;
  for (SubspaceFlag& f : rep.flags0) {
    f.alpha_f = 0;
    for (int m : f.members) f.alpha_f += rep.stabilisers[m].alpha_H;
    rep.alpha = std::max(rep.alpha, f.alpha_f);
  }
  rep.C = rep.alpha == base.d;

  // Lemma-level consequences of C, evaluated unconditionally and reported.
  {
    bool spanning = true;
    for (const StabiliserInfo& st : rep.stabilisers)
      spanning &= st.beta == base.n - 1;
    rep.consequences.hyperplane_spanning = spanning;

    bool lines_ok = true, sums_ok = true;
    for (const SubspaceFlag& f : rep.flags0) {
      QMat sum_gens(base.k, 0);
      for (size_t drop = 0; drop < f.members.size(); ++drop) {
        std::vector<FVec> rest;
        for (size_t i = 0; i < f.members.size(); ++i)
          if (i != drop) rest.push_back(rep.subspaces[f.members[i]]);
        IntLattice g =
            rest.empty() ? IntLattice::full(base.k) : stabiliser(base, rest).lattice;
        FMat proj(base.n, g.rank());
        for (int j = 0; j < g.rank(); ++j) {
          IVec col(base.k);
          for (int i = 0; i < base.k; ++i) col(i) = g.basis(i, j);
          proj.col(j) = base.star(col);
        }
        if (exact_rank<Fs>(proj) > 1) lines_ok = false;
        QMat widened(base.k, sum_gens.cols() + g.rank());
        widened.leftCols(sum_gens.cols()) = sum_gens;
        widened.rightCols(g.rank()) = to_rational(g.basis);
        sum_gens = widened;
      }
      QLattice sum(base.k, sum_gens);
      LatticeIndex li =
          hnf_and_index(sum, QLattice::from_int(IntLattice::full(base.k)));
      if (!(li.kind == LatticeIndex::Finite)) sums_ok = false;
    }
    rep.consequences.subflag_lines_ok = lines_ok;
    rep.consequences.subflag_sum_finite = sums_ok;
  }

  rep.decomposition = find_decomposition_impl(base, rep.subspaces);
  {
    // finite-index check for the factor sum
    QMat gens(base.k, 0);
    for (const FactorData& f : rep.decomposition.factors) {
      QMat widened(base.k, gens.cols() + f.gamma_i.rank());
      widened.leftCols(gens.cols()) = gens;
      widened.rightCols(f.gamma_i.rank()) = to_rational(f.gamma_i.basis);
      gens = widened;
    }
    QLattice sum(base.k, gens);
    LatticeIndex li =
        hnf_and_index(sum, QLattice::from_int(IntLattice::full(base.k)));
    rep.decomposition.sum_finite_index = li.kind == LatticeIndex::Finite;
    if (li.kind == LatticeIndex::Finite) rep.decomposition.sum_index = li.index;
    // constant-stabiliser-rank structure of each factor (Prop-level check)
    for (FactorData& f : rep.decomposition.factors) {
      if (!rep.C) continue;
      Rat expected = Rat(f.k_i) - f.delta - 1;
      for (int ci = 0; ci < static_cast<int>(rep.subspaces.size()); ++ci) {
        if (std::find(f.active.begin(), f.active.end(), ci) == f.active.end())
          continue;
        // restricted stabiliser: Gamma^V cap Gamma_i
        std::vector<FVec> normals{rep.subspaces[ci]};
        for (int cj = 0; cj < static_cast<int>(rep.subspaces.size()); ++cj)
          if (std::find(f.active.begin(), f.active.end(), cj) == f.active.end())
            normals.push_back(rep.subspaces[cj]);
        int rk = stabiliser(base, normals).rank;
        if (Rat(rk) != expected) f.csr_rank_ok = false;
      }
    }
  }

  // generalized vertices and F
  for (const ConcreteFlag& f : rep.flags) rep.generalized_vertices.push_back(f.vertex);
  std::sort(rep.generalized_vertices.begin(), rep.generalized_vertices.end(),
            [](const FVec& a, const FVec& b) {
              return compare_scalars_lex(a, b) < 0;
            });
  rep.generalized_vertices.erase(
      std::unique(rep.generalized_vertices.begin(), rep.generalized_vertices.end(),
                  [](const FVec& a, const FVec& b) {
                    return compare_scalars_lex(a, b) == 0;
                  }),
      rep.generalized_vertices.end());
  for (const FVec& a : rep.generalized_vertices)
    for (const FVec& b : rep.generalized_vertices) rep.F.push_back(a - b);
  std::sort(rep.F.begin(), rep.F.end(), [](const FVec& a, const FVec& b) {
    return compare_scalars_lex(a, b) < 0;
  });
  rep.F.erase(std::unique(rep.F.begin(), rep.F.end(),
                          [](const FVec& a, const FVec& b) {
                            return compare_scalars_lex(a, b) == 0;
                          }),
              rep.F.end());

  // F split along the decomposition: project each f onto X_i
  if (rep.decomposition.decomposable) {
    int l = static_cast<int>(rep.decomposition.factors.size());
    rep.F_split.assign(l, {});
    int total = 0;
    for (const FactorData& f : rep.decomposition.factors) total += f.n_i;
    FMat joint(base.n, total);
    int at = 0;
    for (const FactorData& f : rep.decomposition.factors) {
      joint.middleCols(at, f.n_i) = f.basis;
      at += f.n_i;
    }
    for (const FVec& f : rep.F) {
      FVec coords = solve_square<Fs>(joint, f);
      at = 0;
      for (int i = 0; i < l; ++i) {
        const FactorData& fd = rep.decomposition.factors[i];
        FVec comp = FVec::Constant(base.n, Fs(0));
        for (int j = 0; j < fd.n_i; ++j)
          for (int t = 0; t < base.n; ++t)
            comp(t) += fd.basis(t, j) * coords(at + j);
        rep.F_split[i].push_back(comp);
        at += fd.n_i;
      }
    }
    for (auto& lst : rep.F_split) {
      std::sort(lst.begin(), lst.end(), [](const FVec& a, const FVec& b) {
        return compare_scalars_lex(a, b) < 0;
      });
      lst.erase(std::unique(lst.begin(), lst.end(),
                            [](const FVec& a, const FVec& b) {
                              return compare_scalars_lex(a, b) == 0;
                            }),
                lst.end());
    }
  } else {
    rep.F_split.push_back(rep.F);
  }

  for (size_t i = 0; i < rep.flags0.size(); ++i)
    rep.flag_groups.push_back(flag_group(base, rep, static_cast<int>(i)));

  rep.homogeneity = check_weak_homogeneity(base, rep.hyperplanes,
                                           rep.flags.front(), homogeneity_nmax);
  return rep;
}

}  // namespace cps
