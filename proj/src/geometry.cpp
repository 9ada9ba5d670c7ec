#include "polycut/geometry.hpp"

#include <algorithm>
#include <map>

namespace cps {

namespace {

Fs dot(const FVec& a, const FVec& b) {
  Fs acc(0);
  for (int i = 0; i < a.size(); ++i) acc += a(i) * b(i);
  return acc;
}

// CCW turn test: sign of cross(b-a, c-a).
int orient(const FVec& a, const FVec& b, const FVec& c) {
  Fs cr = (b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0));
  return cr.sgn();
}

}  // namespace

Hyperplane::Hyperplane(FVec n, Fs off) : normal(std::move(n)), offset(std::move(off)) {
  int lead = -1;
  for (int i = 0; i < normal.size(); ++i)
    if (!normal(i).is_zero()) {
      lead = i;
      break;
    }
  if (lead < 0) throw std::invalid_argument("zero normal");
  Fs inv = normal(lead).inverse();
  for (int i = 0; i < normal.size(); ++i) normal(i) = normal(i) * inv;
  offset = offset * inv;
}

Fs Hyperplane::eval(const FVec& x) const { return dot(normal, x) - offset; }

bool Hyperplane::same_subspace(const Hyperplane& o) const {
  if (normal.size() != o.normal.size()) return false;
  for (int i = 0; i < normal.size(); ++i)
    if (normal(i) != o.normal(i)) return false;
  return true;
}

int compare_scalars_lex(const FVec& a, const FVec& b) {
  if (a.size() != b.size())
    return a.size() < b.size() ? -1 : (a.size() == b.size() ? 0 : 1);
  for (int i = 0; i < a.size(); ++i) {
    int c = compare(a(i), b(i));
    if (c != 0) return c;
  }
  return 0;
}

bool hyperplane_equal(const Hyperplane& a, const Hyperplane& b) {
  return a.same_subspace(b) && a.offset == b.offset;
}

int hyperplane_compare(const Hyperplane& a, const Hyperplane& b) {
  int c = compare_scalars_lex(a.normal, b.normal);
  if (c != 0) return c;
  return compare(a.offset, b.offset);
}

ConvexPiece ConvexPiece::from_vertices(std::optional<std::string> label,
                                       std::vector<FVec> pts) {
  if (pts.empty()) throw InvalidWindow("piece with no vertices");
  int n = static_cast<int>(pts[0].size());
  ConvexPiece p;
  p.label = std::move(label);
  if (n == 1) {
    FVec lo = pts[0], hi = pts[0];
    for (const FVec& v : pts) {
      if (compare(v(0), lo(0)) < 0) lo = v;
      if (compare(v(0), hi(0)) > 0) hi = v;
    }
    if (lo(0) == hi(0)) throw InvalidWindow("degenerate interval piece");
    p.verts = {lo, hi};
    FVec one(1);
    one(0) = Fs(1);
    p.halves.push_back({Hyperplane(one, lo(0)), Side::GE});
    p.halves.push_back({Hyperplane(one, hi(0)), Side::LE});
    return p;
  }
  if (n != 2)
    throw UnsupportedDimension("vertex pieces supported for n <= 2 only");
  // Monotone-chain hull with exact predicates.
  std::sort(pts.begin(), pts.end(), [](const FVec& a, const FVec& b) {
    return compare_scalars_lex(a, b) < 0;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const FVec& a, const FVec& b) {
                          return compare_scalars_lex(a, b) == 0;
                        }),
            pts.end());
  if (pts.size() < 3) throw InvalidWindow("degenerate polygon piece");
  std::vector<FVec> hull;
  auto build = [&](auto begin, auto end) {
    size_t base = hull.size();
    for (auto it = begin; it != end; ++it) {
      while (hull.size() >= base + 2 &&
             orient(hull[hull.size() - 2], hull.back(), *it) <= 0)
        hull.pop_back();
      hull.push_back(*it);
    }
  };
  build(pts.begin(), pts.end());
  hull.pop_back();
  build(pts.rbegin(), pts.rend());
  hull.pop_back();
  if (hull.size() < 3) throw InvalidWindow("degenerate polygon piece");
  // hull is CCW starting at the lexicographically smallest point
  p.verts = std::move(hull);
  int m = static_cast<int>(p.verts.size());
  for (int i = 0; i < m; ++i) {
    const FVec& a = p.verts[i];
    const FVec& b = p.verts[(i + 1) % m];
    FVec nrm(2);
    nrm(0) = b(1) - a(1);
    nrm(1) = a(0) - b(0);  // outward for CCW
    Hyperplane h(nrm, dot(nrm, a));
    // interior lies on the side where eval < 0 iff the canonical scaling kept
    // the outward direction; record the interior side explicitly.
    const FVec& c = p.verts[(i + 2) % m];
    p.halves.push_back({h, h.eval(c).sgn() < 0 ? Side::LE : Side::GE});
  }
  return p;
}

ConvexPiece ConvexPiece::from_halfspaces(std::optional<std::string> label,
                                         std::vector<HalfSpace> halves) {
  if (halves.empty()) throw InvalidWindow("piece with no halfspaces");
  int n = halves[0].plane.dim();
  if (n == 1) {
    std::optional<Fs> lo, hi;
    for (const HalfSpace& h : halves) {
      // canonical normal in 1-D is (1)
      Fs bound = h.plane.offset;
      if (h.side == Side::GE) {
        if (!lo || compare(bound, *lo) > 0) lo = bound;
      } else {
        if (!hi || compare(bound, *hi) < 0) hi = bound;
      }
    }
    if (!lo || !hi || compare(*lo, *hi) >= 0)
      throw InvalidWindow("unbounded or empty interval piece");
    FVec a(1), b(1);
    a(0) = *lo;
    b(0) = *hi;
    return from_vertices(std::move(label), {a, b});
  }
  if (n == 2) {
    // boundedness: the recession cone {u : w_i . u >= 0} of the inward
    // normals must be trivial; in the plane its extreme rays are
    // perpendicular to some constraint, so checking those suffices.
    std::vector<FVec> inward;
    for (const HalfSpace& h : halves) {
      FVec wv = h.plane.normal;
      if (h.side == Side::LE)
        for (int i = 0; i < 2; ++i) wv(i) = -wv(i);
      inward.push_back(wv);
    }
    auto feasible_dir = [&](const FVec& u) {
      for (const FVec& wv : inward) {
        Fs d = wv(0) * u(0) + wv(1) * u(1);
        if (d.sgn() < 0) return false;
      }
      return true;
    };
    for (const FVec& wv : inward) {
      FVec perp(2);
      perp(0) = -wv(1);
      perp(1) = wv(0);
      FVec mperp(2);
      mperp(0) = wv(1);
      mperp(1) = -wv(0);
      if (feasible_dir(perp) || feasible_dir(mperp))
        throw InvalidWindow("unbounded halfspace piece");
    }
    // pairwise intersections + feasibility filter
    std::vector<FVec> pts;
    for (size_t i = 0; i < halves.size(); ++i)
      for (size_t j = i + 1; j < halves.size(); ++j) {
        FMat a(2, 2);
        FVec b(2);
        a.row(0) = halves[i].plane.normal.transpose();
        a.row(1) = halves[j].plane.normal.transpose();
        b(0) = halves[i].plane.offset;
        b(1) = halves[j].plane.offset;
        if (exact_rank<Fs>(a) < 2) continue;
        FVec x = solve_square<Fs>(a, b);
        bool feasible = true;
        for (const HalfSpace& h : halves) {
          int s = h.plane.eval(x).sgn();
          if ((h.side == Side::LE && s > 0) || (h.side == Side::GE && s < 0)) {
            feasible = false;
            break;
          }
        }
        if (feasible) pts.push_back(x);
      }
    ConvexPiece p = from_vertices(std::move(label), std::move(pts));
    return p;
  }
  // n >= 3: keep the description, no vertex machinery.
  ConvexPiece p;
  p.label = std::move(label);
  p.halves = std::move(halves);
  return p;
}

int ConvexPiece::dim() const {
  if (!verts.empty()) return static_cast<int>(verts[0].size());
  return halves.empty() ? 0 : halves[0].plane.dim();
}

Fs ConvexPiece::volume() const {
  int n = dim();
  if (n == 1) return verts[1](0) - verts[0](0);
  if (n != 2) throw UnsupportedDimension("volume requires n <= 2");
  Fs twice(0);
  int m = static_cast<int>(verts.size());
  for (int i = 0; i < m; ++i) {
    const FVec& a = verts[i];
    const FVec& b = verts[(i + 1) % m];
    twice += a(0) * b(1) - b(0) * a(1);
  }
  return twice / Fs(2);
}

bool ConvexPiece::contains_interior(const FVec& x) const {
  for (const HalfSpace& h : halves) {
    int s = h.plane.eval(x).sgn();
    if (h.side == Side::LE ? s >= 0 : s <= 0) return false;
  }
  return true;
}

bool ConvexPiece::contains_boundary(const FVec& x) const {
  bool on = false;
  for (const HalfSpace& h : halves) {
    int s = h.plane.eval(x).sgn();
    if (h.side == Side::LE ? s > 0 : s < 0) return false;
    if (s == 0) on = true;
  }
  return on;
}

ConvexPiece ConvexPiece::translated(const FVec& t) const {
  ConvexPiece p;
  p.label = label;
  for (const FVec& v : verts) p.verts.push_back(v + t);
  for (const HalfSpace& h : halves) {
    Hyperplane hp = h.plane;
    hp.offset = hp.offset + dot(hp.normal, t);
    p.halves.push_back({hp, h.side});
  }
  return p;
}

std::pair<FVec, FVec> ConvexPiece::bbox() const {
  if (verts.empty()) throw UnsupportedDimension("bbox requires vertices");
  FVec lo = verts[0], hi = verts[0];
  for (const FVec& v : verts)
    for (int i = 0; i < v.size(); ++i) {
      if (compare(v(i), lo(i)) < 0) lo(i) = v(i);
      if (compare(v(i), hi(i)) > 0) hi(i) = v(i);
    }
  return {lo, hi};
}

namespace {

// Projection range of a piece onto a direction.
std::pair<Fs, Fs> project(const ConvexPiece& p, const FVec& dir) {
  Fs lo = dot(dir, p.verts[0]), hi = lo;
  for (const FVec& v : p.verts) {
    Fs d = dot(dir, v);
    if (compare(d, lo) < 0) lo = d;
    if (compare(d, hi) > 0) hi = d;
  }
  return {lo, hi};
}

bool separated(const ConvexPiece& a, const ConvexPiece& b, bool strict) {
  std::vector<FVec> axes;
  for (const HalfSpace& h : a.halves) axes.push_back(h.plane.normal);
  for (const HalfSpace& h : b.halves) axes.push_back(h.plane.normal);
  for (const FVec& ax : axes) {
    auto [alo, ahi] = project(a, ax);
    auto [blo, bhi] = project(b, ax);
    int c1 = compare(ahi, blo), c2 = compare(bhi, alo);
    if (strict ? (c1 < 0 || c2 < 0) : (c1 <= 0 || c2 <= 0)) return true;
  }
  return false;
}

}  // namespace

bool pieces_disjoint(const ConvexPiece& a, const ConvexPiece& b) {
  return separated(a, b, /*strict=*/true);
}

bool interiors_disjoint(const ConvexPiece& a, const ConvexPiece& b) {
  return separated(a, b, /*strict=*/false);
}

int Window::dim() const {
  if (pieces.empty()) throw InvalidWindow("empty window");
  return pieces[0].dim();
}

bool Window::labelled() const {
  for (const ConvexPiece& p : pieces)
    if (p.label) return true;
  return false;
}

Fs Window::volume() const {
  Fs acc(0);
  for (const ConvexPiece& p : pieces) acc += p.volume();
  return acc;
}

std::pair<FVec, FVec> Window::bbox() const {
  auto [lo, hi] = pieces[0].bbox();
  for (size_t i = 1; i < pieces.size(); ++i) {
    auto [l, h] = pieces[i].bbox();
    for (int j = 0; j < lo.size(); ++j) {
      if (compare(l(j), lo(j)) < 0) lo(j) = l(j);
      if (compare(h(j), hi(j)) > 0) hi(j) = h(j);
    }
  }
  return {lo, hi};
}

void Window::validate() const {
  if (pieces.empty()) throw InvalidWindow("empty window");
  int n = dim();
  for (const ConvexPiece& p : pieces) {
    if (p.dim() != n) throw InvalidWindow("mixed piece dimensions");
    if (n <= 2 && p.volume().sgn() <= 0)
      throw InvalidWindow("piece with empty interior");
  }
  if (n <= 2) {
    for (size_t i = 0; i < pieces.size(); ++i)
      for (size_t j = i + 1; j < pieces.size(); ++j)
        if (!interiors_disjoint(pieces[i], pieces[j]))
          throw InvalidWindow("window pieces overlap");
  }
}

Window Window::translated(const FVec& t) const {
  Window w;
  for (const ConvexPiece& p : pieces) w.pieces.push_back(p.translated(t));
  return w;
}

Window Window::without_labels() const {
  Window w = *this;
  for (ConvexPiece& p : w.pieces) p.label.reset();
  return w;
}

SupportData supporting_hyperplanes(const Window& w) {
  w.validate();
  SupportData out;
  for (const ConvexPiece& p : w.pieces)
    for (const HalfSpace& h : p.halves) out.hyperplanes.push_back(h.plane);
  std::sort(out.hyperplanes.begin(), out.hyperplanes.end(),
            [](const Hyperplane& a, const Hyperplane& b) {
              return hyperplane_compare(a, b) < 0;
            });
  out.hyperplanes.erase(
      std::unique(out.hyperplanes.begin(), out.hyperplanes.end(),
                  hyperplane_equal),
      out.hyperplanes.end());
  for (const Hyperplane& h : out.hyperplanes) out.subspaces.push_back(h.normal);
  std::sort(out.subspaces.begin(), out.subspaces.end(),
            [](const FVec& a, const FVec& b) {
              return compare_scalars_lex(a, b) < 0;
            });
  out.subspaces.erase(std::unique(out.subspaces.begin(), out.subspaces.end(),
                                  [](const FVec& a, const FVec& b) {
                                    return compare_scalars_lex(a, b) == 0;
                                  }),
                      out.subspaces.end());
  return out;
}

namespace {

// Convex face in the incremental arrangement, with cached double bounds for
// cheap rejection. Vertices stay exact.
struct Face {
  std::vector<FVec> v;
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;

  void cache() {
    xlo = ylo = 1e300;
    xhi = yhi = -1e300;
    for (const FVec& p : v) {
      double x = p(0).to_double(), y = p(1).to_double();
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
};

FVec line_intersect(const Hyperplane& a, const Hyperplane& b) {
  FMat m(2, 2);
  FVec rhs(2);
  m.row(0) = a.normal.transpose();
  m.row(1) = b.normal.transpose();
  rhs(0) = a.offset;
  rhs(1) = b.offset;
  return solve_square<Fs>(m, rhs);
}

// Split a convex face by a line; returns true if a strict crossing happened.
bool split_face(const Face& f, const Hyperplane& cut, Face& neg, Face& pos) {
  int m = static_cast<int>(f.v.size());
  std::vector<int> s(m);
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < m; ++i) {
    s[i] = cut.eval(f.v[i]).sgn();
    has_pos |= s[i] > 0;
    has_neg |= s[i] < 0;
  }
  if (!has_pos || !has_neg) return false;
  neg.v.clear();
  pos.v.clear();
  for (int i = 0; i < m; ++i) {
    const FVec& cur = f.v[i];
    const FVec& nxt = f.v[(i + 1) % m];
    if (s[i] <= 0) neg.v.push_back(cur);
    if (s[i] >= 0) pos.v.push_back(cur);
    int sn = s[(i + 1) % m];
    if ((s[i] > 0 && sn < 0) || (s[i] < 0 && sn > 0)) {
      // exact crossing point on the segment via its supporting line
      FVec dirn(2);
      dirn(0) = nxt(1) - cur(1);
      dirn(1) = cur(0) - nxt(0);
      Hyperplane edge(dirn, dirn(0) * cur(0) + dirn(1) * cur(1));
      FVec x = line_intersect(edge, cut);
      neg.v.push_back(x);
      pos.v.push_back(x);
    }
  }
  neg.cache();
  pos.cache();
  return true;
}

Fs face_area(const std::vector<FVec>& v) {
  Fs twice(0);
  int m = static_cast<int>(v.size());
  for (int i = 0; i < m; ++i)
    twice += v[i](0) * v[(i + 1) % m](1) - v[(i + 1) % m](0) * v[i](1);
  Fs a = twice / Fs(2);
  return a.sgn() < 0 ? -a : a;
}

}  // namespace

ArrangementCensus arrangement_census(const Window& w,
                                     const std::vector<Hyperplane>& cutters,
                                     bool keep_faces) {
  w.validate();
  int n = w.dim();
  ArrangementCensus out;
  if (n == 1) {
    std::vector<ArrangementFace> faces;
    for (const ConvexPiece& p : w.pieces) {
      Fs lo = p.verts[0](0), hi = p.verts[1](0);
      std::vector<Fs> cuts{lo, hi};
      for (const Hyperplane& c : cutters) {
        // canonical 1-D plane is x = offset
        if (compare(c.offset, lo) > 0 && compare(c.offset, hi) < 0)
          cuts.push_back(c.offset);
      }
      std::sort(cuts.begin(), cuts.end(),
                [](const Fs& a, const Fs& b) { return compare(a, b) < 0; });
      cuts.erase(std::unique(cuts.begin(), cuts.end(),
                             [](const Fs& a, const Fs& b) { return a == b; }),
                 cuts.end());
      for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        ArrangementFace f;
        FVec a(1), b(1);
        a(0) = cuts[i];
        b(0) = cuts[i + 1];
        f.verts = {a, b};
        f.volume = cuts[i + 1] - cuts[i];
        faces.push_back(std::move(f));
      }
    }
    std::sort(faces.begin(), faces.end(),
              [](const ArrangementFace& a, const ArrangementFace& b) {
                return compare_scalars_lex(a.verts[0], b.verts[0]) < 0;
              });
    out.face_count = static_cast<long>(faces.size());
    out.min_volume = faces[0].volume;
    for (const ArrangementFace& f : faces)
      if (compare(f.volume, out.min_volume) < 0) out.min_volume = f.volume;
    if (keep_faces) out.faces = std::move(faces);
    return out;
  }
  if (n != 2)
    throw UnsupportedDimension("arrangement census requires n <= 2");

  std::vector<Face> faces;
  for (const ConvexPiece& p : w.pieces) {
    Face f;
    f.v = p.verts;
    f.cache();
    faces.push_back(std::move(f));
  }
  for (const Hyperplane& c : cutters) {
    // double prefilter: line a*x + b*y = o misses a face bbox entirely?
    double a = c.normal(0).to_double(), b = c.normal(1).to_double(),
           o = c.offset.to_double();
    std::vector<Face> next;
    next.reserve(faces.size() + 8);
    for (Face& f : faces) {
      double lo = std::min(a * f.xlo, a * f.xhi) + std::min(b * f.ylo, b * f.yhi);
      double hi = std::max(a * f.xlo, a * f.xhi) + std::max(b * f.ylo, b * f.yhi);
      const double slack =
          1e-6 * (1.0 + std::abs(lo) + std::abs(hi) + std::abs(o));
      if (o < lo - slack || o > hi + slack) {
        next.push_back(std::move(f));
        continue;
      }
      Face neg, pos;
      if (split_face(f, c, neg, pos)) {
        next.push_back(std::move(neg));
        next.push_back(std::move(pos));
      } else {
        next.push_back(std::move(f));
      }
    }
    faces = std::move(next);
  }

  std::vector<ArrangementFace> result;
  result.reserve(faces.size());
  for (Face& f : faces) {
    ArrangementFace af;
    af.volume = face_area(f.v);
    af.verts = std::move(f.v);
    result.push_back(std::move(af));
  }
  // canonical order: lexicographic by lowest vertex
  for (ArrangementFace& f : result) {
    size_t best = 0;
    for (size_t i = 1; i < f.verts.size(); ++i)
      if (compare_scalars_lex(f.verts[i], f.verts[best]) < 0) best = i;
    std::rotate(f.verts.begin(), f.verts.begin() + static_cast<long>(best),
                f.verts.end());
  }
  std::sort(result.begin(), result.end(),
            [](const ArrangementFace& a, const ArrangementFace& b) {
              return compare_scalars_lex(a.verts[0], b.verts[0]) < 0;
            });
  out.face_count = static_cast<long>(result.size());
  out.min_volume = result[0].volume;
  for (const ArrangementFace& f : result)
    if (compare(f.volume, out.min_volume) < 0) out.min_volume = f.volume;
  if (keep_faces) out.faces = std::move(result);
  return out;
}

}  // namespace cps
