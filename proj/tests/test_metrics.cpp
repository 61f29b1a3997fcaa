#include <doctest.h>

#include <cmath>

#include "aide/metrics.hpp"
#include "aide/rng.hpp"
#include "aide/stats.hpp"

using namespace aide;
using namespace aide::metrics;

namespace {

BinaryMask from_rows(const std::vector<std::vector<int>>& rows) {
  BinaryMask m(int(rows.size()), int(rows[0].size()));
  for (int r = 0; r < m.height; ++r)
    for (int c = 0; c < m.width; ++c) m.at(r, c) = rows[size_t(r)][size_t(c)];
  return m;
}

BinaryMask random_mask(int h, int w, double density, RngStream& rng) {
  BinaryMask m(h, w);
  for (auto& v : m.values) v = rng.bernoulli(density) ? 1 : 0;
  return m;
}

// Exhaustive all-pairs surface-distance oracle, independent of the EDT
// route used by the implementation.
struct BruteSurface {
  double assd, mssd;
};

BruteSurface brute_surface(const BinaryMask& pred, const BinaryMask& ref) {
  const auto sp = extract_boundary(pred);
  const auto sr = extract_boundary(ref);
  REQUIRE(!sp.empty());
  REQUIRE(!sr.empty());
  auto directed = [](const std::vector<BoundaryPoint>& from,
                     const std::vector<BoundaryPoint>& to) {
    double sum = 0.0, mx = 0.0;
    for (const auto& a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : to) {
        const double d = std::hypot(double(a.row - b.row),
                                    double(a.col - b.col));
        best = std::min(best, d);
      }
      sum += best;
      mx = std::max(mx, best);
    }
    return std::pair{sum, mx};
  };
  const auto [fs, fm] = directed(sp, sr);
  const auto [bs, bm] = directed(sr, sp);
  return {(fs + bs) / double(sp.size() + sr.size()), std::max(fm, bm)};
}

}  // namespace

TEST_CASE("confusion counts by per-pixel comparison") {
  BinaryMask ones(2, 2);
  for (auto& v : ones.values) v = 1;
  auto c = confusion_counts(ones, ones);
  CHECK(c.tp == 4);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
  CHECK(c.tn == 0);

  // hand-enumerated 2x2 case
  const BinaryMask pred = from_rows({{1, 0}, {0, 0}});
  const BinaryMask ref = from_rows({{1, 0}, {0, 1}});
  c = confusion_counts(pred, ref);
  CHECK(c.tp == 1);
  CHECK(c.fp == 0);
  CHECK(c.fn == 1);
  CHECK(c.tn == 2);

  const BinaryMask z(3, 3);
  c = confusion_counts(z, z);
  CHECK(c.tn == 9);
  CHECK(c.tp + c.fp + c.fn + c.tn == z.pixel_count());

  CHECK_THROWS(confusion_counts(BinaryMask(2, 2), BinaryMask(3, 3)));
}

TEST_CASE("dsc matches the confusion-count formula and conventions") {
  BinaryMask a = from_rows({{1, 1}, {0, 0}});
  CHECK(dsc(a, a) == 1.0);

  const BinaryMask b = from_rows({{0, 0}, {1, 1}});
  CHECK(dsc(a, b) == 0.0);  // disjoint

  // tp=1, fp=0, fn=1 -> 2/3
  const BinaryMask pred = from_rows({{1, 0}, {0, 0}});
  const BinaryMask ref = from_rows({{1, 0}, {0, 1}});
  CHECK(dsc(pred, ref) == doctest::Approx(2.0 / 3.0));

  // conventions: empty-empty = 1, empty-vs-nonempty = 0
  const BinaryMask empty(2, 2);
  CHECK(dsc(empty, empty) == 1.0);
  CHECK(dsc(empty, a) == 0.0);
  CHECK(dsc(a, empty) == 0.0);
}

TEST_CASE("dsc is symmetric on random masks") {
  RngStream rng = seeded_rng(5);
  for (int i = 0; i < 50; ++i) {
    const BinaryMask a = random_mask(9, 7, 0.4, rng);
    const BinaryMask b = random_mask(9, 7, 0.4, rng);
    const double d = dsc(a, b);
    CHECK(d == dsc(b, a));
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("ravd formula, sign, and empty-reference error") {
  BinaryMask ref = from_rows({{1, 1}, {1, 1}});
  CHECK(ravd(ref, ref) == 0.0);

  BinaryMask pred = from_rows({{1, 1}, {1, 1}});
  pred = from_rows({{1, 1}, {1, 1}});
  BinaryMask bigger(3, 3);
  BinaryMask ref3(3, 3);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      ref3.at(r, c) = 1;
      bigger.at(r, c) = 1;
    }
  bigger.at(2, 2) = 1;  // one extra pixel over a 4-pixel reference
  CHECK(ravd(bigger, ref3) == doctest::Approx(0.25));

  // supersets positive, subsets negative
  BinaryMask sub = ref3;
  sub.at(0, 0) = 0;
  CHECK(ravd(sub, ref3) < 0.0);
  CHECK(ravd(bigger, ref3) > 0.0);

  CHECK_THROWS_AS(ravd(ref3, BinaryMask(3, 3)), std::domain_error);
}

TEST_CASE("boundary extraction uses 4-neighbors with border as outside") {
  // single pixel
  BinaryMask single(3, 3);
  single.at(1, 1) = 1;
  auto b = extract_boundary(single);
  REQUIRE(b.size() == 1);
  CHECK(b[0].row == 1);
  CHECK(b[0].col == 1);

  // solid 3x3 block centered in 5x5: perimeter only
  BinaryMask block(5, 5);
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) block.at(r, c) = 1;
  b = extract_boundary(block);
  CHECK(b.size() == 8);
  for (const auto& p : b) CHECK((p.row != 2 || p.col != 2));

  // full-image mask: all 12 border pixels of a 4x4 grid
  BinaryMask full(4, 4);
  for (auto& v : full.values) v = 1;
  b = extract_boundary(full);
  CHECK(b.size() == 12);

  CHECK(extract_boundary(BinaryMask(3, 3)).empty());
}

TEST_CASE("surface distances: identical, singleton, and error cases") {
  BinaryMask a(4, 4);
  a.at(1, 1) = 1;
  CHECK(assd(a, a) == 0.0);
  CHECK(mssd(a, a) == 0.0);

  BinaryMask b(4, 4);
  b.at(1, 1) = 0;
  b.at(1, 1 + 3) = 0;  // placate linters; set below
  BinaryMask p(1, 5), q(1, 5);
  p.at(0, 0) = 1;
  q.at(0, 3) = 1;
  CHECK(assd(p, q) == doctest::Approx(3.0));
  CHECK(mssd(p, q) == doctest::Approx(3.0));

  CHECK_THROWS_AS(assd(a, BinaryMask(4, 4)), std::domain_error);
  CHECK_THROWS_AS(mssd(BinaryMask(4, 4), a), std::domain_error);
}

TEST_CASE("surface distances equal the exhaustive oracle on random masks") {
  RngStream rng = seeded_rng(2024);
  int tested = 0;
  while (tested < 220) {
    const int h = 2 + int(rng.uniform_int(31));
    const int w = 2 + int(rng.uniform_int(31));
    const BinaryMask a = random_mask(h, w, rng.uniform(0.05, 0.6), rng);
    const BinaryMask b = random_mask(h, w, rng.uniform(0.05, 0.6), rng);
    if (a.empty_fg() || b.empty_fg()) continue;
    const BruteSurface want = brute_surface(a, b);
    CHECK(assd(a, b) == doctest::Approx(want.assd).epsilon(1e-9));
    CHECK(mssd(a, b) == doctest::Approx(want.mssd).epsilon(1e-9));
    // symmetry and ordering
    CHECK(assd(a, b) == doctest::Approx(assd(b, a)).epsilon(1e-12));
    CHECK(mssd(a, b) == doctest::Approx(mssd(b, a)).epsilon(1e-12));
    CHECK(mssd(a, b) >= assd(a, b) - 1e-12);
    ++tested;
  }
}

TEST_CASE("anisotropic spacing scales surface distances") {
  BinaryMask p(3, 3), q(3, 3);
  p.at(0, 0) = 1;
  q.at(2, 0) = 1;  // two rows apart
  CHECK(assd(p, q, {2.0, 1.0}) == doctest::Approx(4.0));
  CHECK(assd(p, q, {0.5, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("largest connected component keeps the biggest 8-connected blob") {
  // single component unchanged
  BinaryMask one = from_rows({{1, 1, 0}, {0, 1, 0}, {0, 0, 0}});
  CHECK(largest_connected_component(one) == one);

  // 5-pixel vs 3-pixel component
  BinaryMask two = from_rows({
      {1, 1, 0, 0, 0, 1},
      {1, 1, 0, 0, 0, 1},
      {1, 0, 0, 0, 0, 1},
  });
  const BinaryMask kept = largest_connected_component(two);
  CHECK(kept.area() == 5);
  CHECK(kept.at(0, 0) == 1);
  CHECK(kept.at(0, 5) == 0);

  // diagonal touch is 8-connected
  BinaryMask diag = from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(largest_connected_component(diag).area() == 3);

  CHECK(largest_connected_component(BinaryMask(3, 3)).empty_fg());
}

TEST_CASE("lcc is idempotent and never grows") {
  RngStream rng = seeded_rng(77);
  for (int i = 0; i < 40; ++i) {
    const BinaryMask m = random_mask(12, 12, 0.35, rng);
    const BinaryMask once = largest_connected_component(m);
    CHECK(largest_connected_component(once) == once);
    CHECK(once.area() <= m.area());
  }
}

TEST_CASE("lcc tie-break keeps the earliest component in scan order") {
  const BinaryMask tie = from_rows({
      {1, 1, 0, 0, 1, 1},
      {0, 0, 0, 0, 0, 0},
  });
  const BinaryMask kept = largest_connected_component(tie);
  CHECK(kept.at(0, 0) == 1);
  CHECK(kept.at(0, 4) == 0);
}

TEST_CASE("multi-threshold dsc follows the averaged-thresholds protocol") {
  // identical continuous maps -> 1.0 at every threshold
  ProbMap pred(2, 2);
  std::vector<double> ref(4);
  const double vals[4] = {0.05, 0.3, 0.55, 0.95};
  for (int i = 0; i < 4; ++i) {
    pred.fg()[i] = vals[i];
    pred.bg()[i] = 1 - vals[i];
    ref[size_t(i)] = vals[i];
  }
  CHECK(multi_threshold_dsc(pred, ref, 2, 2, default_thresholds()) ==
        doctest::Approx(1.0));

  // both constant zero -> 1.0 under the empty-empty convention
  ProbMap zero(2, 2);
  for (size_t i = 0; i < 4; ++i) {
    zero.fg()[i] = 0.0;
    zero.bg()[i] = 1.0;
  }
  CHECK(multi_threshold_dsc(zero, std::vector<double>(4, 0.0), 2, 2,
                            default_thresholds()) == doctest::Approx(1.0));

  // 1-pixel oracle: pred fg 0.55, ref 0.35
  // thresholds 0.1..0.3: both fg -> dsc 1; 0.4,0.5: pred fg only? no:
  // pred>=t for t<=0.55 -> fg at 0.4,0.5 while ref is empty -> 0
  // t in {0.6..0.9}: both empty -> 1
  ProbMap px(1, 1);
  px.fg()[0] = 0.55;
  px.bg()[0] = 0.45;
  double expect = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double t = i / 10.0;
    const bool p = 0.55 >= t, r = 0.35 >= t;
    expect += (p == r) ? 1.0 : 0.0;
  }
  expect /= 9.0;
  CHECK(multi_threshold_dsc(px, {0.35}, 1, 1, default_thresholds()) ==
        doctest::Approx(expect));

  CHECK_THROWS(multi_threshold_dsc(px, std::vector<double>(4, 0.0), 2, 2,
                                   default_thresholds()));
}

TEST_CASE("paired t-test matches a reference implementation") {
  using namespace aide::stats;
  // frozen from an independent statistical package
  const auto r = paired_t_test({1, 2, 3, 4}, {1.1, 2.3, 2.8, 4.4});
  CHECK(r.t == doctest::Approx(-1.13389341902768).epsilon(1e-10));
  CHECK(r.p == doctest::Approx(0.339254050856455).epsilon(1e-9));

  const auto r2 = paired_t_test({0.70, 0.65, 0.72, 0.68, 0.74},
                                {0.75, 0.70, 0.71, 0.73, 0.80});
  CHECK(r2.t == doctest::Approx(-3.16227766016838).epsilon(1e-10));
  CHECK(r2.p == doctest::Approx(0.0341094231674097).epsilon(1e-9));

  // zero-variance differences are errors
  CHECK_THROWS_AS(paired_t_test({1, 2, 3}, {1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(paired_t_test({2, 3, 4}, {1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(paired_t_test({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("t distribution tail matches reference values") {
  using namespace aide::stats;
  CHECK(t_two_sided_p(2.5, 3.0) ==
        doctest::Approx(0.08770664700806555).epsilon(1e-10));
  CHECK(t_two_sided_p(1.0, 9.0) ==
        doctest::Approx(0.34343639613791355).epsilon(1e-10));
  CHECK(t_two_sided_p(-2.5, 3.0) ==
        doctest::Approx(t_two_sided_p(2.5, 3.0)).epsilon(1e-12));
}

TEST_CASE("spearman handles ties with midranks") {
  using namespace aide::stats;
  CHECK(spearman({1.0, 2.0, 2.0, 3.0}, {0.5, 0.7, 0.9, 1.0}) ==
        doctest::Approx(0.9486832980505139).epsilon(1e-10));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK_THROWS(spearman({1.0, 1.0}, {2.0, 3.0}));
}
