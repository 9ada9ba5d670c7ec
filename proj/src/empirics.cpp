#include "polycut/empirics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <thread>

namespace cps {

namespace {

struct DoublePoints {
  std::vector<std::array<double, 2>> xy;  // second entry 0 for d=1
  int d;
};

DoublePoints approx_points(const PointPattern& pat, int d) {
  DoublePoints out;
  out.d = d;
  out.xy.reserve(pat.points.size());
  for (const PatternPoint& p : pat.points) {
    std::array<double, 2> a{0.0, 0.0};
    for (int i = 0; i < d; ++i) a[static_cast<size_t>(i)] = p.physical(i).to_double();
    out.xy.push_back(a);
  }
  return out;
}

// Exact |v|_inf <= bound test with a double fast path.
bool within_box(const FVec& v, const std::array<double, 2>& vd, double bound_d,
                const Rat& bound, double margin) {
  int d = static_cast<int>(v.size());
  bool borderline = false;
  for (int i = 0; i < d; ++i) {
    double a = std::abs(vd[static_cast<size_t>(i)]);
    if (a > bound_d + margin) return false;
    if (a > bound_d - margin) borderline = true;
  }
  if (!borderline) return true;
  Fs b{bound};
  for (int i = 0; i < d; ++i) {
    if (compare(abs(v(i)), b) > 0) return false;
  }
  return true;
}

}  // namespace

PatchCensus patch_census(const Scheme& s, const PointPattern& pattern,
                         const Rat& r, int threads) {
  if (pattern.box_radius < 4 * r)
    throw std::invalid_argument("patch census requires L >= 4r");
  const Scheme* schp = &s;
  Scheme reduced;
  if (s.cyclic) {
    reduced = reduce_cyclic(s);
    schp = &reduced;
  }
  const Scheme& sch = *schp;

  PatchCensus out;
  out.r = r;
  out.box = pattern.box_radius;
  int npts = static_cast<int>(pattern.points.size());
  DoublePoints dp = approx_points(pattern, sch.d);
  double rd = Rat(r).get_d();
  double margin = 1e-7 * (1.0 + rd);

  // grid buckets over double coordinates for neighbor gathering
  double cell = std::max(rd, 1e-6);
  std::map<std::pair<long, long>, std::vector<int>> grid;
  auto cell_of = [&](const std::array<double, 2>& a) {
    return std::make_pair(static_cast<long>(std::floor(a[0] / cell)),
                          static_cast<long>(std::floor(a[1] / cell)));
  };
  for (int i = 0; i < npts; ++i) grid[cell_of(dp.xy[static_cast<size_t>(i)])].push_back(i);

  Rat interior_bound = pattern.box_radius - r;
  double interior_d = Rat(interior_bound).get_d();

  using Key = std::vector<std::pair<std::vector<long>, std::string>>;
  struct Acc {
    long count = 0;
    std::vector<int> centers;
  };

  auto scan = [&](int from, int to, std::map<Key, Acc>& local) {
    for (int ci = from; ci < to; ++ci) {
      const PatternPoint& c = pattern.points[static_cast<size_t>(ci)];
      if (!within_box(c.physical, dp.xy[static_cast<size_t>(ci)], interior_d,
                      interior_bound, margin))
        continue;
      Key key;
      auto base = cell_of(dp.xy[static_cast<size_t>(ci)]);
      long span = static_cast<long>(std::ceil(rd / cell)) + 1;
      for (long gx = base.first - span; gx <= base.first + span; ++gx)
        for (long gy = base.second - span; gy <= base.second + span; ++gy) {
          auto it = grid.find({gx, gy});
          if (it == grid.end()) continue;
          for (int oi : it->second) {
            const PatternPoint& o = pattern.points[static_cast<size_t>(oi)];
            FVec diff = o.physical - c.physical;
            std::array<double, 2> dd{
                dp.xy[static_cast<size_t>(oi)][0] - dp.xy[static_cast<size_t>(ci)][0],
                dp.xy[static_cast<size_t>(oi)][1] - dp.xy[static_cast<size_t>(ci)][1]};
            if (!within_box(diff, dd, rd, r, margin)) continue;
            std::vector<long> delta(static_cast<size_t>(sch.k));
            for (int t = 0; t < sch.k; ++t)
              delta[static_cast<size_t>(t)] = Int(o.lattice(t) - c.lattice(t)).get_si();
            key.emplace_back(std::move(delta), o.label.value_or(""));
          }
        }
      std::sort(key.begin(), key.end());
      Acc& a = local[key];
      a.count += 1;
      a.centers.push_back(ci);
    }
  };

  std::map<Key, Acc> merged;
  int nthreads = std::max(1, threads);
  if (nthreads == 1 || npts < 256) {
    scan(0, npts, merged);
  } else {
    std::vector<std::map<Key, Acc>> shards(static_cast<size_t>(nthreads));
    std::vector<std::thread> workers;
    int chunk = (npts + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      int from = t * chunk, to = std::min(npts, (t + 1) * chunk);
      if (from >= to) break;
      workers.emplace_back(scan, from, to, std::ref(shards[static_cast<size_t>(t)]));
    }
    for (auto& w : workers) w.join();
    for (auto& shard : shards)
      for (auto& [k, a] : shard) {
        Acc& m = merged[k];
        m.count += a.count;
        m.centers.insert(m.centers.end(), a.centers.begin(), a.centers.end());
      }
  }

  for (auto& [k, a] : merged) {
    PatchClass cls;
    cls.offsets = k;
    cls.count = a.count;
    std::sort(a.centers.begin(), a.centers.end());
    cls.centers = std::move(a.centers);
    out.classes.push_back(std::move(cls));
  }
  return out;
}

ComplexityTable empirical_complexity(const Scheme& s, const PointPattern& pattern,
                                     const std::vector<Rat>& radii, int alpha,
                                     int threads) {
  ComplexityTable t;
  t.alpha = alpha;
  for (const Rat& r : radii) {
    PatchCensus c = patch_census(s, pattern, r, threads);
    ComplexityRow row;
    row.r = r;
    row.p_hat = c.p_hat();
    row.ratio = static_cast<double>(row.p_hat) /
                std::pow(Rat(r).get_d(), static_cast<double>(alpha));
    t.rows.push_back(row);
  }
  if (t.rows.size() >= 2) {
    bool inc = true, dec = true;
    for (size_t i = 1; i < t.rows.size(); ++i) {
      inc &= t.rows[i].ratio >= t.rows[i - 1].ratio;
      dec &= t.rows[i].ratio <= t.rows[i - 1].ratio;
    }
    double lo = t.rows.front().ratio, hi = t.rows.back().ratio;
    double fold = hi > lo ? hi / lo : lo / hi;
    t.drift_flag = (inc || dec) && fold > 10.0;
  }
  return t;
}

RepetitivityTable empirical_repetitivity(const Scheme& s,
                                         const PointPattern& pattern,
                                         const std::vector<Rat>& radii,
                                         unsigned long seed, int threads) {
  const int d = s.d;
  RepetitivityTable out;
  for (const Rat& r : radii) {
    PatchCensus c = patch_census(s, pattern, r, threads);
    Rat half = pattern.box_radius - r;  // centers live in [-half, half]^d
    RepetitivityRow row;
    row.r = r;
    double rho = 0;
    for (const PatchClass& cls : c.classes) {
      if (cls.count <= 1) {
        row.insufficient_box = true;
        continue;
      }
      if (d == 1) {
        std::vector<double> xs;
        for (int ci : cls.centers)
          xs.push_back(pattern.points[static_cast<size_t>(ci)].physical(0).to_double());
        std::sort(xs.begin(), xs.end());
        double hb = Rat(half).get_d();
        double cover = std::max(xs.front() + hb, hb - xs.back());
        for (size_t i = 1; i < xs.size(); ++i)
          cover = std::max(cover, (xs[i] - xs[i - 1]) / 2.0);
        rho = std::max(rho, cover);
      } else {
        // seeded rational probe grid with jitter; max-min distance proxy
        std::mt19937_64 rng(seed ^ (cls.centers.front() * 2654435761uLL));
        double hb = Rat(half).get_d();
        const int grid_n = 24;
        std::vector<std::array<double, 2>> centers;
        for (int ci : cls.centers) {
          const FVec& p = pattern.points[static_cast<size_t>(ci)].physical;
          centers.push_back({p(0).to_double(), p(1).to_double()});
        }
        double worst = 0;
        std::uniform_real_distribution<double> jit(0.0, 1.0);
        for (int gx = 0; gx < grid_n; ++gx)
          for (int gy = 0; gy < grid_n; ++gy) {
            double px = -hb + (2 * hb) * (gx + jit(rng)) / grid_n;
            double py = -hb + (2 * hb) * (gy + jit(rng)) / grid_n;
            double bestd = 1e300;
            for (const auto& ctr : centers)
              bestd = std::min(bestd, std::max(std::abs(px - ctr[0]),
                                               std::abs(py - ctr[1])));
            worst = std::max(worst, bestd);
          }
        rho = std::max(rho, worst);
      }
    }
    row.rho_hat = rho;
    row.ratio = rho / Rat(r).get_d();
    out.rows.push_back(row);
  }
  return out;
}

namespace {

// Distinct cutter hyperplanes {H - gamma_< : gamma in Gamma(r)} restricted to
// those meeting the window's projection range.
std::vector<Hyperplane> cut_translates(const Scheme& s, const Window& w,
                                       const Rat& r, long* cutter_count) {
  SupportData sup = supporting_hyperplanes(w);
  std::vector<IVec> ball = lattice_ball(s, r);

  // per subspace class: the window's exact projection range onto the normal
  std::vector<Hyperplane> cutters;
  for (const FVec& nu : sup.subspaces) {
    Fs plo(0), phi(0);
    bool first = true;
    for (const ConvexPiece& p : w.pieces)
      for (const FVec& v : p.verts) {
        Fs val(0);
        for (int i = 0; i < nu.size(); ++i) val += nu(i) * v(i);
        if (first || compare(val, plo) < 0) plo = val;
        if (first || compare(val, phi) > 0) phi = val;
        first = false;
      }
    // offsets of this class's concrete hyperplanes
    std::vector<Fs> base_offsets;
    for (const Hyperplane& h : sup.hyperplanes)
      if (compare_scalars_lex(h.normal, nu) == 0)
        base_offsets.push_back(h.offset);

    std::vector<Fs> offsets;
    for (const IVec& g : ball) {
      FVec st = s.star(g);
      Fs shift(0);
      for (int i = 0; i < nu.size(); ++i) shift += nu(i) * st(i);
      for (const Fs& b : base_offsets) {
        Fs off = b - shift;
        if (compare(off, plo) < 0 || compare(off, phi) > 0) continue;
        offsets.push_back(off);
      }
    }
    // dedup: double presort, exact compare on near ties
    std::sort(offsets.begin(), offsets.end(), [](const Fs& a, const Fs& b) {
      double da = a.to_double(), db = b.to_double();
      if (da != db) return da < db;
      return compare(a, b) < 0;
    });
    offsets.erase(std::unique(offsets.begin(), offsets.end(),
                              [](const Fs& a, const Fs& b) { return a == b; }),
                  offsets.end());
    for (const Fs& off : offsets) cutters.push_back(Hyperplane(nu, off));
  }
  if (cutter_count) *cutter_count = static_cast<long>(cutters.size());
  return cutters;
}

}  // namespace

CutRegionCensus cut_region_census(const Scheme& s, const Rat& r) {
  const Scheme* schp = &s;
  Scheme reduced;
  if (s.cyclic) {
    reduced = reduce_cyclic(s);
    schp = &reduced;
  }
  const Window& w = schp->plain_window();
  if (schp->n > 2)
    throw UnsupportedDimension("cut regions need n <= 2");
  CutRegionCensus out;
  out.r = r;
  std::vector<Hyperplane> cutters = cut_translates(*schp, w, r, &out.cutter_count);
  ArrangementCensus a = arrangement_census(w, cutters, /*keep_faces=*/false);
  out.region_count = a.face_count;
  out.min_volume = a.min_volume;
  return out;
}

std::vector<PWRow> pw_estimate(const Scheme& s, const std::vector<Rat>& radii) {
  std::vector<PWRow> rows;
  for (const Rat& r : radii) {
    CutRegionCensus c = cut_region_census(s, r);
    PWRow row;
    row.r = r;
    row.min_volume = c.min_volume;
    Rat scale(1);
    for (int i = 0; i < s.d; ++i) scale *= r;
    row.product = c.min_volume * Fs(scale);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cps
