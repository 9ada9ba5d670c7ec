#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polycut/empirics.hpp"
#include "polycut/io.hpp"

#include <cmath>
#include <set>

using namespace cps;

namespace {

Scheme fixture(const std::string& name) {
  return load_scheme_file(std::string(FIXTURES_DIR) + "/" + name);
}

// Independent oracle: the Fibonacci substitution a -> ab, b -> a, with tile
// lengths |a| = theta, |b| = 1. Counts distinct r-patches of the tiling's
// vertex set by sliding over a long finite word. Positions are tracked as
// exact integer pairs (c, d) meaning c + d*theta.
long fibonacci_word_patch_count(double r, int word_len) {
  std::string w = "a";
  while (static_cast<int>(w.size()) < word_len) {
    std::string next;
    for (char ch : w) next += (ch == 'a') ? "ab" : "a";
    w = next;
  }
  w.resize(static_cast<size_t>(word_len));
  const double theta = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::pair<long, long>> pos;  // (units, thetas)
  long c = 0, d = 0;
  pos.push_back({0, 0});
  for (char ch : w) {
    if (ch == 'a')
      ++d;
    else
      ++c;
    pos.push_back({c, d});
  }
  auto val = [&](const std::pair<long, long>& p) {
    return static_cast<double>(p.first) + theta * static_cast<double>(p.second);
  };
  double total = val(pos.back());
  std::set<std::vector<std::pair<long, long>>> patches;
  for (size_t i = 0; i < pos.size(); ++i) {
    double x = val(pos[i]);
    if (x < r + 1e-9 || x > total - r - 1e-9) continue;  // margin
    std::vector<std::pair<long, long>> patch;
    for (size_t j = 0; j < pos.size(); ++j) {
      double dx = val(pos[j]) - x;
      if (std::abs(dx) <= r + 1e-9) {
        // border |dx| == r exactly only for integer dx: re-check
        long dc = pos[j].first - pos[i].first;
        long dd = pos[j].second - pos[i].second;
        if (dd == 0 && std::abs(static_cast<double>(dc)) > r) continue;
        if (std::abs(dx) > r && dd != 0) continue;
        patch.push_back({dc, dd});
      }
    }
    std::sort(patch.begin(), patch.end());
    patches.insert(patch);
  }
  return static_cast<long>(patches.size());
}

}  // namespace

TEST_CASE("patch census: radius below the minimal gap sees one class") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(30));
  PatchCensus c = patch_census(s, pat, Rat(1, 2));
  CHECK(c.p_hat() == 1);  // unlabelled single-point patch
  // with two labels, the single-point classes split by label
  Scheme sl = fixture("fibonacci_labels.json");
  PointPattern patl = generate_pattern(sl, Rat(30));
  PatchCensus cl = patch_census(sl, patl, Rat(1, 2));
  CHECK(cl.p_hat() == 2);
}

TEST_CASE("patch census requires a big enough box") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(10));
  CHECK_THROWS_AS(patch_census(s, pat, Rat(4)), std::invalid_argument);
}

TEST_CASE("fibonacci p(3) matches the substitution word oracle") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(200));
  PatchCensus c = patch_census(s, pat, Rat(3));
  long oracle = fibonacci_word_patch_count(3.0, 10000);
  CHECK(c.p_hat() == oracle);
}

TEST_CASE("patch counts are monotone in r and stable under box growth") {
  Scheme s = fixture("fibonacci.json");
  PointPattern small = generate_pattern(s, Rat(60));
  PointPattern big = generate_pattern(s, Rat(120));
  long prev = 0;
  for (long r : {1, 2, 4, 8}) {
    PatchCensus cs = patch_census(s, small, Rat(r));
    PatchCensus cb = patch_census(s, big, Rat(r));
    CHECK(cs.p_hat() >= prev);
    prev = cs.p_hat();
    CHECK(cb.p_hat() >= cs.p_hat());   // box growth never loses classes
    if (r <= 4) CHECK(cb.p_hat() == cs.p_hat());  // both saturated
  }
}

TEST_CASE("AB patch census against a larger-box oracle run") {
  Scheme s = fixture("ab.json");
  PointPattern pat = generate_pattern(s, Rat(20));
  PointPattern bigger = generate_pattern(s, Rat(28));
  PatchCensus c1 = patch_census(s, pat, Rat(2));
  PatchCensus c2 = patch_census(s, bigger, Rat(2));
  CHECK(c1.p_hat() == c2.p_hat());
  CHECK(c1.p_hat() > 4);
}

TEST_CASE("patch census is deterministic across thread counts") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(100));
  PatchCensus a = patch_census(s, pat, Rat(4), 1);
  PatchCensus b = patch_census(s, pat, Rat(4), 8);
  REQUIRE(a.p_hat() == b.p_hat());
  for (int i = 0; i < a.p_hat(); ++i) {
    CHECK(a.classes[static_cast<size_t>(i)].offsets ==
          b.classes[static_cast<size_t>(i)].offsets);
    CHECK(a.classes[static_cast<size_t>(i)].count ==
          b.classes[static_cast<size_t>(i)].count);
    CHECK(a.classes[static_cast<size_t>(i)].centers ==
          b.classes[static_cast<size_t>(i)].centers);
  }
}

TEST_CASE("repetitivity: single class means whole-set covering radius") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(30));
  RepetitivityTable t =
      empirical_repetitivity(s, pat, {Rat(1, 2)}, /*seed=*/3);
  REQUIRE(t.rows.size() == 1);
  CHECK(!t.rows[0].insufficient_box);
  CHECK(t.rows[0].rho_hat > 0.4);  // about half the long gap
  CHECK(t.rows[0].rho_hat < 1.7);
}

TEST_CASE("fibonacci repetitivity ratio stays in a small band") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(400));
  RepetitivityTable t = empirical_repetitivity(
      s, pat, {Rat(2), Rat(4), Rat(8), Rat(16)}, /*seed=*/3);
  for (const RepetitivityRow& row : t.rows) {
    CHECK(!row.insufficient_box);
    CHECK(row.ratio <= 6.0);
    CHECK(row.rho_hat >= Rat(row.r).get_d());  // contains every r-patch
  }
}

TEST_CASE("cut region census: r = 0 counts the window pieces") {
  Scheme s = fixture("fibonacci.json");
  CutRegionCensus c = cut_region_census(s, Rat(0));
  CHECK(c.region_count == 1);
  CHECK(c.min_volume == s.plain_window().volume());
}

TEST_CASE("fibonacci cut regions match the 1-D sorting oracle") {
  Scheme s = fixture("fibonacci.json");
  const Rat r(10);
  CutRegionCensus census = cut_region_census(s, r);

  // independent path: direct double loops over (a, b), exact membership via
  // field arithmetic, then sorted distinct cut points inside the window
  FieldPtr f = s.field;
  Fs theta = Fs::theta(f);
  Fs lo = Fs(Rat(4, 3)) - theta, hi = Fs(Rat(4, 3));
  std::vector<Fs> cuts;
  for (long a = -40; a <= 40; ++a)
    for (long b = -40; b <= 40; ++b) {
      Fs ph = Fs(Rat(a)) + (Fs(Rat(b)) * (theta - Fs(1)));
      Fs in = Fs(Rat(a)) - Fs(Rat(b)) * theta;
      if (compare(abs(ph), Fs(r)) > 0 || compare(abs(in), Fs(r)) > 0) continue;
      for (const Fs& endpoint : {lo, hi}) {
        Fs cut = endpoint - in;
        if (compare(cut, lo) > 0 && compare(cut, hi) < 0) cuts.push_back(cut);
      }
    }
  std::sort(cuts.begin(), cuts.end(),
            [](const Fs& x, const Fs& y) { return compare(x, y) < 0; });
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](const Fs& x, const Fs& y) { return x == y; }),
             cuts.end());
  CHECK(census.region_count == static_cast<long>(cuts.size()) + 1);
}

TEST_CASE("cut region monotonicity and volume partition") {
  Scheme s = fixture("fibonacci.json");
  Fs total = s.plain_window().volume();
  long prev = 0;
  for (long r : {1, 3, 6, 10}) {
    CutRegionCensus c = cut_region_census(s, Rat(r));
    CHECK(c.region_count >= prev);
    prev = c.region_count;
    CHECK(c.min_volume.sgn() > 0);
  }
  // exact volume partition at one radius via the arrangement faces
  SupportData sup = supporting_hyperplanes(s.plain_window());
  std::vector<Hyperplane> cutters;
  for (const IVec& g : lattice_ball(s, Rat(6))) {
    FVec st = s.star(g);
    for (const Hyperplane& h : sup.hyperplanes) {
      Fs shift(0);
      for (int i = 0; i < 1; ++i) shift += h.normal(i) * st(i);
      cutters.push_back(Hyperplane(h.normal, h.offset - shift));
    }
  }
  ArrangementCensus a = arrangement_census(s.plain_window(), cutters, true);
  Fs sum(0);
  for (const ArrangementFace& face : a.faces) sum += face.volume;
  CHECK(sum == total);
}

TEST_CASE("refinement inequality p(r) <= #C(r) at moderate scale") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(120));
  for (long r : {2, 4, 8}) {
    PatchCensus pc = patch_census(s, pat, Rat(r));
    CutRegionCensus cc = cut_region_census(s, Rat(r));
    CHECK(pc.p_hat() <= cc.region_count);
  }
}

TEST_CASE("empirical complexity table and drift flag") {
  Scheme s = fixture("fibonacci.json");
  PointPattern pat = generate_pattern(s, Rat(300));
  ComplexityTable t = empirical_complexity(
      s, pat, {Rat(2), Rat(4), Rat(8), Rat(16)}, /*alpha=*/1);
  REQUIRE(t.rows.size() == 4);
  for (size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].p_hat >= t.rows[i - 1].p_hat);
  // linear growth: the normalized column stays within a factor 10 band
  double lo = 1e300, hi = 0;
  for (const ComplexityRow& row : t.rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  CHECK(hi / lo < 10.0);
  CHECK(!t.drift_flag);
}

TEST_CASE("pw estimate bounded below for AB at small radii") {
  Scheme s = fixture("ab.json");
  std::vector<PWRow> rows = pw_estimate(s, {Rat(2), Rat(4)});
  REQUIRE(rows.size() == 2);
  for (const PWRow& row : rows) {
    CHECK(row.min_volume.sgn() > 0);
    CHECK(row.product.to_double() > 1e-4);
  }
}
