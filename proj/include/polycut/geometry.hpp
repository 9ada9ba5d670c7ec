#pragma once

// Exact window geometry in internal space: convex pieces, supporting
// hyperplanes, and exact arrangement / face counting for n <= 2.

#include "polycut/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cps {

struct InvalidWindow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// {x : normal . x = offset}; canonical form scales the first nonzero normal
// coordinate to 1, so equality is coefficient equality.
struct Hyperplane {
  FVec normal;
  Fs offset;

  Hyperplane() = default;
  Hyperplane(FVec n, Fs off);  // canonicalizes

  int dim() const { return static_cast<int>(normal.size()); }
  Fs eval(const FVec& x) const;  // normal . x - offset
  bool same_subspace(const Hyperplane& o) const;
};

int compare_scalars_lex(const FVec& a, const FVec& b);
bool hyperplane_equal(const Hyperplane& a, const Hyperplane& b);
int hyperplane_compare(const Hyperplane& a, const Hyperplane& b);

enum class Side { LE, GE };

struct HalfSpace {
  Hyperplane plane;
  Side side;
};

// Convex polytopal piece of the window. For n <= 2 the vertex list is the
// canonical hull (n=1: the two endpoints ascending; n=2: CCW from the
// lexicographically smallest vertex). For n >= 3 only halfspaces are kept.
struct ConvexPiece {
  std::optional<std::string> label;
  std::vector<FVec> verts;
  std::vector<HalfSpace> halves;

  static ConvexPiece from_vertices(std::optional<std::string> label,
                                   std::vector<FVec> pts);
  static ConvexPiece from_halfspaces(std::optional<std::string> label,
                                     std::vector<HalfSpace> halves);

  int dim() const;
  Fs volume() const;                       // length (n=1) / area (n=2)
  bool contains_interior(const FVec& x) const;  // strict
  bool contains_boundary(const FVec& x) const;  // on the boundary
  ConvexPiece translated(const FVec& t) const;
  std::pair<FVec, FVec> bbox() const;
};

// Strictly disjoint as compact sets (separating-axis, exact).
bool pieces_disjoint(const ConvexPiece& a, const ConvexPiece& b);
// Interiors disjoint (touching boundaries allowed).
bool interiors_disjoint(const ConvexPiece& a, const ConvexPiece& b);

struct Window {
  std::vector<ConvexPiece> pieces;

  int dim() const;
  bool labelled() const;
  Fs volume() const;
  std::pair<FVec, FVec> bbox() const;
  // Throws InvalidWindow on degenerate pieces or overlapping interiors (n<=2).
  void validate() const;
  Window translated(const FVec& t) const;
  Window without_labels() const;
};

struct SupportData {
  std::vector<Hyperplane> hyperplanes;  // deduplicated, sorted
  std::vector<FVec> subspaces;          // canonical normals, offset dropped
};

SupportData supporting_hyperplanes(const Window& w);

struct ArrangementFace {
  std::vector<FVec> verts;  // CCW (n=2) or ascending pair (n=1)
  Fs volume;
};

struct ArrangementCensus {
  long face_count = 0;
  Fs min_volume;
  std::vector<ArrangementFace> faces;  // canonical order
};

// Faces of int(W) minus the cutter hyperplanes, exact, n <= 2 only.
ArrangementCensus arrangement_census(const Window& w,
                                     const std::vector<Hyperplane>& cutters,
                                     bool keep_faces = false);

}  // namespace cps
