#include "polycut/lattice.hpp"

namespace cps {

namespace {

Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// g = p*a + q*b, plus the cofactors a/g, b/g.
void gcdext(const Int& a, const Int& b, Int& g, Int& p, Int& q) {
  mpz_gcdext(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
}

// Row-style HNF in place: row echelon, positive pivots, entries above each
// pivot reduced into [0, pivot). Rows of `u`, when given, track the applied
// unimodular transform (u starts as identity with a.rows() rows).
int row_hnf(IMat& a, IMat* u) {
  int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    // eliminate column c below row r with gcd row operations
    for (int i = r + 1; i < rows; ++i) {
      if (a(i, c) == 0) continue;
      if (a(r, c) == 0) {
        a.row(r).swap(a.row(i));
        if (u) u->row(r).swap(u->row(i));
        continue;
      }
      Int g, p, q;
      gcdext(a(r, c), a(i, c), g, p, q);
      Int fr = a(r, c) / g, fi = a(i, c) / g;
      for (int j = 0; j < cols; ++j) {
        Int top = p * a(r, j) + q * a(i, j);
        Int bot = fr * a(i, j) - fi * a(r, j);
        a(r, j) = top;
        a(i, j) = bot;
      }
      if (u)
        for (int j = 0; j < u->cols(); ++j) {
          Int top = p * (*u)(r, j) + q * (*u)(i, j);
          Int bot = fr * (*u)(i, j) - fi * (*u)(r, j);
          (*u)(r, j) = top;
          (*u)(i, j) = bot;
        }
    }
    if (a(r, c) == 0) continue;
    if (a(r, c) < 0) {
      a.row(r) *= Int(-1);
      if (u) u->row(r) *= Int(-1);
    }
    // reduce entries above the pivot
    for (int i = 0; i < r; ++i) {
      Int f = floor_div(a(i, c), a(r, c));
      if (f == 0) continue;
      a.row(i) -= f * a.row(r);
      if (u) u->row(i) -= f * u->row(r);
    }
    ++r;
  }
  return r;
}

}  // namespace

IMat hnf_columns(const IMat& a) {
  IMat t = a.transpose();
  int rank = row_hnf(t, nullptr);
  IMat h = t.topRows(rank).transpose();
  return h;  // ambient x rank, column echelon
}

IMat integer_kernel_basis(const IMat& a) {
  // Row-reduce a^T while tracking the transform; zero rows of the echelon
  // form correspond to transform rows spanning the kernel. The transform is
  // unimodular, so the kernel basis is saturated.
  IMat t = a.transpose();
  IMat u = IMat::Identity(t.rows(), t.rows());
  int rank = row_hnf(t, &u);
  IMat ker = u.bottomRows(t.rows() - rank).transpose();
  return hnf_columns(ker);
}

bool IntLattice::contains(const IVec& v) const {
  // Solve basis * x = v exactly; membership iff solvable with integer x.
  QMat b = to_rational(basis);
  QVec rhs(ambient);
  for (int i = 0; i < ambient; ++i) rhs(i) = Rat(v(i));
  auto x = solve_consistent<Rat>(b, rhs);
  if (!x) return false;
  for (int i = 0; i < x->size(); ++i)
    if ((*x)(i).get_den() != 1) return false;
  return true;
}

IntLattice integer_kernel(const QMat& m) {
  // Clear denominators row by row; the integer kernel is unchanged.
  IMat a(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    Int lcm = 1;
    for (int j = 0; j < m.cols(); ++j) {
      Int g = gcd(lcm, m(i, j).get_den());
      lcm = lcm / g * m(i, j).get_den();
    }
    for (int j = 0; j < m.cols(); ++j) {
      Rat scaled = m(i, j) * Rat(lcm);
      a(i, j) = scaled.get_num();  // denominator is 1 after scaling
    }
  }
  IntLattice l;
  l.ambient = static_cast<int>(m.cols());
  l.basis = integer_kernel_basis(a);
  return l;
}

QLattice::QLattice(int ambient_rank, const QMat& generators) {
  ambient = ambient_rank;
  Int lcm = 1;
  for (int i = 0; i < generators.rows(); ++i)
    for (int j = 0; j < generators.cols(); ++j) {
      Int g = gcd(lcm, generators(i, j).get_den());
      lcm = lcm / g * generators(i, j).get_den();
    }
  IMat scaled(generators.rows(), generators.cols());
  for (int i = 0; i < generators.rows(); ++i)
    for (int j = 0; j < generators.cols(); ++j) {
      Rat v = generators(i, j) * Rat(lcm);
      scaled(i, j) = v.get_num();
    }
  numer = hnf_columns(scaled);
  denom = lcm;
  // shrink the denominator if every entry shares a factor with it
  Int g = denom;
  for (int i = 0; i < numer.rows() && g != 1; ++i)
    for (int j = 0; j < numer.cols() && g != 1; ++j) g = gcd(g, numer(i, j));
  if (g > 1) {
    for (int i = 0; i < numer.rows(); ++i)
      for (int j = 0; j < numer.cols(); ++j) numer(i, j) /= g;
    denom /= g;
  }
}

QMat QLattice::basis_rational() const {
  QMat b(numer.rows(), numer.cols());
  for (int i = 0; i < numer.rows(); ++i)
    for (int j = 0; j < numer.cols(); ++j) b(i, j) = make_rat(numer(i, j), denom);
  return b;
}

LatticeIndex hnf_and_index(const QLattice& sub, const QLattice& super) {
  if (sub.ambient != super.ambient)
    throw std::invalid_argument("ambient rank mismatch");
  LatticeIndex out;
  QMat sb = super.basis_rational();
  QMat xall(super.rank(), sub.rank());
  for (int j = 0; j < sub.rank(); ++j) {
    QVec v(sub.ambient);
    for (int i = 0; i < sub.ambient; ++i)
      v(i) = make_rat(sub.numer(i, j), sub.denom);
    auto x = solve_consistent<Rat>(sb, v);
    if (!x) {
      out.kind = LatticeIndex::NotContained;
      return out;
    }
    for (int i = 0; i < super.rank(); ++i) {
      if ((*x)(i).get_den() != 1) {
        out.kind = LatticeIndex::NotContained;
        return out;
      }
      xall(i, j) = (*x)(i);
    }
  }
  if (sub.rank() < super.rank()) {
    out.kind = LatticeIndex::Infinite;
    return out;
  }
  // equal rank: index = |det| of the integer coordinate matrix
  IMat xi(xall.rows(), xall.cols());
  for (int i = 0; i < xall.rows(); ++i)
    for (int j = 0; j < xall.cols(); ++j) xi(i, j) = xall(i, j).get_num();
  IMat h = xi;
  // determinant by fraction-free row HNF: product of pivots
  int rank = row_hnf(h, nullptr);
  if (rank < h.cols()) {
    out.kind = LatticeIndex::Infinite;  // degenerate coordinates
    return out;
  }
  Int det = 1;
  for (int i = 0; i < rank; ++i) det *= h(i, i);
  out.kind = LatticeIndex::Finite;
  out.index = det < 0 ? Int(-det) : det;
  return out;
}

LatticeIndex hnf_and_index(const IntLattice& sub, const IntLattice& super) {
  return hnf_and_index(QLattice::from_int(sub), QLattice::from_int(super));
}

QLattice lattice_sum(const QLattice& a, const QLattice& b) {
  if (a.ambient != b.ambient)
    throw std::invalid_argument("ambient rank mismatch");
  QMat g(a.ambient, a.rank() + b.rank());
  QMat ab = a.basis_rational(), bb = b.basis_rational();
  g.leftCols(a.rank()) = ab;
  g.rightCols(b.rank()) = bb;
  return QLattice(a.ambient, g);
}

}  // namespace cps
