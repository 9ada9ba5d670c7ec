#pragma once

// Brute-force ground truth: patch censuses p(r), repetitivity proxies rho(r),
// cut-region counts and minimal volumes, and the PW product column. These
// validate the algebraic verdicts on finite samples.

#include "polycut/scheme.hpp"

namespace cps {

struct PatchClass {
  // canonical form: lattice-coordinate offsets (center first, offset 0),
  // sorted lexicographically, with labels
  std::vector<std::pair<std::vector<long>, std::string>> offsets;
  long count = 0;
  std::vector<int> centers;  // indices into the pattern's point list
};

struct PatchCensus {
  Rat r{0};
  Rat box{0};
  std::vector<PatchClass> classes;  // canonical order
  long p_hat() const { return static_cast<long>(classes.size()); }
};

// Exact patch equivalence by translation over interior centers
// (|center|_inf <= L - r). Requires L >= 4r.
PatchCensus patch_census(const Scheme& s, const PointPattern& pattern,
                         const Rat& r, int threads = 1);

struct ComplexityRow {
  Rat r;
  long p_hat = 0;
  double ratio = 0;  // p_hat / r^alpha
};

struct ComplexityTable {
  int alpha = 0;
  std::vector<ComplexityRow> rows;
  bool drift_flag = false;  // ratio drifts monotonically by more than 10x
};

ComplexityTable empirical_complexity(const Scheme& s, const PointPattern& pattern,
                                     const std::vector<Rat>& radii, int alpha,
                                     int threads = 1);

struct RepetitivityRow {
  Rat r;
  double rho_hat = 0;
  bool insufficient_box = false;  // some class occurred once: rho >= box
  double ratio = 0;               // rho_hat / r
};

struct RepetitivityTable {
  std::vector<RepetitivityRow> rows;
};

// Covering-radius proxy of each class's center set (exact in d=1; seeded
// rational probe grid in d=2). A finite-sample lower bound for rho(r).
RepetitivityTable empirical_repetitivity(const Scheme& s,
                                         const PointPattern& pattern,
                                         const std::vector<Rat>& radii,
                                         unsigned long seed, int threads = 1);

struct CutRegionCensus {
  Rat r{0};
  long region_count = 0;
  Fs min_volume;
  long cutter_count = 0;
};

// Window cut by all translates H - gamma_< over gamma in the total-norm
// r-ball; exact, n <= 2.
CutRegionCensus cut_region_census(const Scheme& s, const Rat& r);

struct PWRow {
  Rat r;
  Fs min_volume;
  Fs product;  // min cut-region volume * r^d
};

std::vector<PWRow> pw_estimate(const Scheme& s, const std::vector<Rat>& radii);

}  // namespace cps
