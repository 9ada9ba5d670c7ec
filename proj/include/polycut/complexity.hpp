#pragma once

// Algebraic complexity analysis: stabilisers, flags, the patch-counting
// exponent alpha, property C, decompositions, generalized vertices and their
// displacement set F, lifted flag groups, and weak homogeneity.

#include "polycut/scheme.hpp"

namespace cps {

struct StabiliserInfo {
  FVec subspace_normal;  // canonical normal of V
  IntLattice lattice;    // Gamma^V in Z^k coordinates
  int rank = 0;          // rk(H)
  int beta = 0;          // dim of the real span of the projected stabiliser
  int alpha_H = 0;       // d - rk(H) + beta_H
};

struct SubspaceFlag {
  std::vector<int> members;  // indices into ComplexityReport::subspaces
  int alpha_f = 0;
};

struct ConcreteFlag {
  std::vector<int> members;  // indices into ComplexityReport::hyperplanes
  int subspace_flag = -1;    // index into flags0
  FVec vertex;               // v(f)
};

struct FactorData {
  std::vector<int> active;  // subspace indices whose hyperplanes cut X_i
  FMat basis;               // n x n_i basis of X_i
  int n_i = 0;
  int k_i = 0;
  int d_i = 0;
  Rat delta{0};             // d_i / n_i
  IntLattice gamma_i;       // Gamma^{S_i}
  bool csr_rank_ok = true;  // restricted stabiliser ranks == k_i - delta_i - 1
};

struct DecompositionData {
  bool decomposable = false;
  std::vector<FactorData> factors;      // size 1 when indecomposable
  bool sum_finite_index = false;        // Gamma_1 + ... + Gamma_l in Gamma
  Int sum_index{0};
};

struct FlagGroupInfo {
  int flag0 = -1;               // subspace flag index
  bool finite = false;          // generators lift rationally
  QLattice lattice;             // Gamma[f] in (1/N)Z^k coordinates
  LatticeIndex index_over_gamma;
  FMat internal_images;         // proj_int * basis
};

struct HomogeneityVerdict {
  enum Kind { Homogeneous, WeaklyHomogeneous, NotWithinBound, NotApplicable };
  Kind kind = NotApplicable;
  long witness_N = 0;
  std::string note;
};

struct ConsequencesOfC {
  bool hyperplane_spanning = false;   // beta_H = n-1 for all H
  bool subflag_lines_ok = false;      // each Gamma^{f \ H} projects into a line
  bool subflag_sum_finite = false;    // sum over H in f is finite index
};

struct ComplexityReport {
  std::vector<Hyperplane> hyperplanes;  // script-H after unlabelling
  std::vector<FVec> subspaces;          // script-H_0 (canonical normals)
  std::vector<StabiliserInfo> stabilisers;
  std::vector<SubspaceFlag> flags0;
  std::vector<ConcreteFlag> flags;
  int alpha = 0;
  bool C = false;
  ConsequencesOfC consequences;
  DecompositionData decomposition;
  std::vector<FVec> generalized_vertices;  // v(script-H), deduplicated
  std::vector<FVec> F;                     // displacement set, 0 included
  std::vector<std::vector<FVec>> F_split;  // per factor, when decomposable
  std::vector<FlagGroupInfo> flag_groups;  // one per subspace flag
  HomogeneityVerdict homogeneity;
  Scheme analyzed;  // the unlabelled scheme the analysis ran on
};

// Gamma^S for a nonempty set of subspace normals.
StabiliserInfo stabiliser(const Scheme& s, const std::vector<FVec>& normals);

struct FlagEnumeration {
  std::vector<Hyperplane> hyperplanes;
  std::vector<FVec> subspaces;
  std::vector<SubspaceFlag> flags0;  // alpha_f not yet filled
  std::vector<ConcreteFlag> flags;
};
FlagEnumeration enumerate_flags(const Scheme& s);

// Full analysis; labelled windows are unlabelled first.
ComplexityReport complexity_exponent(const Scheme& s, long homogeneity_nmax = 12,
                                     long unlabel_bound = 12);

// Gamma[f] for a subspace flag (by report index), plus Gamma[f,f'] sums.
FlagGroupInfo flag_group(const Scheme& s, const ComplexityReport& rep, int flag0);
QLattice flag_group_pair(const ComplexityReport& rep, int f0a, int f0b);

// Direct definitional test: is there N <= n_max and translates
// gamma_H in (1/N)Gamma making all supporting hyperplanes concurrent?
// The common point is eliminated through one flag; each N becomes an exact
// integer-solvability question.
HomogeneityVerdict check_weak_homogeneity(const Scheme& s,
                                          const std::vector<Hyperplane>& hyperplanes,
                                          const ConcreteFlag& flag, long n_max);

}  // namespace cps
