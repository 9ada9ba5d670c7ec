#pragma once

// The cut-and-project scheme model: standing-assumption validation, the star
// map, cyclic-component reduction, label removal, and point-pattern
// generation by exact enumeration.

#include "polycut/enumerate.hpp"
#include "polycut/geometry.hpp"
#include "polycut/lattice.hpp"

#include <map>

namespace cps {

struct SingularityError : std::runtime_error {
  IVec gamma;
  explicit SingularityError(IVec g, const std::string& what)
      : std::runtime_error(what), gamma(std::move(g)) {}
};

struct CyclicData {
  long modulus = 1;
  IVec kappa;                      // residue homomorphism Z^k -> Z/m
  std::map<long, Window> windows;  // residue -> window slice
  std::map<long, IVec> shifts;     // residue -> lattice vector with that kappa
};

struct Scheme {
  FieldPtr field;
  int k = 0, d = 0, n = 0;
  FMat proj_phys;  // d x k
  FMat proj_int;   // n x k
  std::optional<Window> window;  // absent only when cyclic data carries it
  std::optional<CyclicData> cyclic;

  const Window& plain_window() const {
    if (!window) throw InvalidWindow("scheme window not reduced yet");
    return *window;
  }
  FVec star(const IVec& x) const;   // proj_int * x
  FVec phys(const IVec& x) const;   // proj_phys * x
  long kappa_of(const IVec& x) const;
};

struct ValidationReport {
  bool shapes_ok = false;
  bool stacked_invertible = false;
  bool phys_injective = false;   // assumption (1)
  bool int_injective = false;    // assumption (2)
  bool dense = false;            // assumption (3)
  bool window_valid = false;
  bool nonsingular_up_to_bound = true;
  Rat singular_bound{0};
  std::vector<IVec> singular_witnesses;
  std::vector<std::string> failures;

  bool assumptions_pass() const {
    return shapes_ok && stacked_invertible && phys_injective && int_injective &&
           dense && window_valid;
  }
};

// singular_scan_bound 0 picks a rank-adapted default (the scan cost grows
// like bound^k).
ValidationReport validate_scheme(const Scheme& s, const Rat& singular_scan_bound = Rat(0));

// Removes the cyclic component: restrict to ker(kappa), rebase to Z^k, shift
// each residue window into the Euclidean fiber. MLD to the original.
Scheme reduce_cyclic(const Scheme& s);

// Translates labelled pieces by projected lattice vectors until pairwise
// strictly disjoint, then drops the labels. The supporting subspaces are
// unchanged (checked). Throws if no separating translates exist within the
// coordinate search bound.
Scheme unlabel(const Scheme& s, long search_bound = 12);

struct PatternPoint {
  IVec lattice;       // gamma in Z^k
  FVec physical;      // proj_phys * gamma
  std::optional<std::string> label;
};

struct PointPattern {
  Rat box_radius{0};
  std::vector<PatternPoint> points;  // sorted lexicographically by lattice
};

// Exactly the gamma with |proj_phys gamma|_inf <= L and star in int(W).
PointPattern generate_pattern(const Scheme& s, const Rat& box_radius);

// Total-space sup-norm box: all gamma with max(|phys|, |int|) <= r.
std::vector<IVec> lattice_ball(const Scheme& s, const Rat& r);

}  // namespace cps
