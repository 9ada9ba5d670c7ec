#pragma once

// Integer and rational lattices: Hermite normal form (the canonical basis
// everywhere), saturated integer kernels, containment and subgroup indices.

#include "polycut/linalg.hpp"

#include <variant>

namespace cps {

// Column-style HNF of the lattice spanned by the columns of a: the result has
// one column per basis vector, is in column echelon form with positive pivots
// and reduced off-pivot entries, and is unique for the lattice.
IMat hnf_columns(const IMat& a);

// Saturated basis of {v in Z^k : a v = 0} (columns, HNF).
IMat integer_kernel_basis(const IMat& a);

// Lattice in Z^k, basis stored in canonical column HNF.
struct IntLattice {
  int ambient = 0;
  IMat basis;  // ambient x rank

  IntLattice() = default;
  IntLattice(int ambient_rank, const IMat& generators)
      : ambient(ambient_rank), basis(hnf_columns(generators)) {}
  static IntLattice zero(int ambient_rank) {
    return IntLattice(ambient_rank, IMat(ambient_rank, 0));
  }
  static IntLattice full(int ambient_rank) {
    return IntLattice(ambient_rank, IMat::Identity(ambient_rank, ambient_rank));
  }
  int rank() const { return static_cast<int>(basis.cols()); }
  bool contains(const IVec& v) const;
};

// {v in Z^k : m v = 0}; automatically saturated.
IntLattice integer_kernel(const QMat& m);

// Lattice with rational coordinates: columns = numer/denom, denom > 0 minimal.
struct QLattice {
  int ambient = 0;
  IMat numer;
  Int denom{1};

  QLattice() = default;
  QLattice(int ambient_rank, const QMat& generators);
  static QLattice from_int(const IntLattice& l) {
    QLattice q;
    q.ambient = l.ambient;
    q.numer = l.basis;
    q.denom = 1;
    return q;
  }
  int rank() const { return static_cast<int>(numer.cols()); }
  QMat basis_rational() const;
};

struct LatticeIndex {
  enum Kind { Finite, Infinite, NotContained } kind = Finite;
  Int index{1};  // meaningful for Finite only

  bool finite() const { return kind == Finite; }
};

// [super : sub] when sub is a finite-index subgroup; NotContained when sub is
// not inside super; Infinite when contained with strictly smaller rank.
LatticeIndex hnf_and_index(const QLattice& sub, const QLattice& super);
LatticeIndex hnf_and_index(const IntLattice& sub, const IntLattice& super);

// Smallest group containing both (generator union).
QLattice lattice_sum(const QLattice& a, const QLattice& b);

}  // namespace cps
