#include <cmath>
#include <limits>

#include <doctest.h>

#include "oracle_helpers.hpp"
#include "surq/klevel.hpp"
#include "surq/rng.hpp"

using namespace surq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LineFamily family_of(std::initializer_list<double> slopes,
                     std::initializer_list<double> intercepts, int k) {
  LineFamily f;
  f.slopes.resize(static_cast<int>(slopes.size()));
  f.intercepts.resize(static_cast<int>(intercepts.size()));
  int i = 0;
  for (double a : slopes) f.slopes(i++) = a;
  i = 0;
  for (double b : intercepts) f.intercepts(i++) = b;
  f.k = k;
  return f;
}

LineFamily random_family(Rng& rng, int l, bool dups, bool concurrency) {
  LineFamily f;
  f.slopes.resize(l);
  f.intercepts.resize(l);
  for (int i = 0; i < l; ++i) {
    f.slopes(i) = rng.normal();
    f.intercepts(i) = rng.normal();
  }
  if (dups && l >= 4) {
    f.slopes(l / 2) = f.slopes(0);
    f.intercepts(l / 2) = f.intercepts(0);
    f.slopes(l - 1) = f.slopes(1);
    f.intercepts(l - 1) = f.intercepts(1);
  }
  if (concurrency && l >= 6) {
    // a pencil of lines through (0.5, 0.25), all coordinates dyadic so the
    // crossings are exact in floating point
    for (int i = 1; i <= 4; ++i) {
      f.slopes(i) = 0.25 * i;
      f.intercepts(i) = 0.25 - f.slopes(i) * 0.5;
    }
  }
  f.k = 1 + rng.below(l);
  return f;
}

void check_routes_identical(const LineFamily& f, double lo = -kInf,
                            double hi = kInf) {
  KLevelProfile a = compute_klevel(f, lo, hi);
  KLevelProfile b = compute_klevel_direct(f, lo, hi);
  REQUIRE(a.breakpoints.size() == b.breakpoints.size());
  REQUIRE(a.segment_index.size() == b.segment_index.size());
  for (size_t i = 0; i < a.breakpoints.size(); ++i)
    CHECK(a.breakpoints[i] == b.breakpoints[i]);
  for (size_t i = 0; i < a.segment_index.size(); ++i)
    CHECK(a.segment_index[i] == b.segment_index[i]);
}

}  // namespace

TEST_CASE("two crossing lines") {
  LineFamily f = family_of({1.0, -1.0}, {0.0, 1.0}, 1);
  KLevelProfile p = compute_klevel(f);
  REQUIRE(p.breakpoints.size() == 1);
  CHECK(p.breakpoints[0] == 0.5);
  CHECK(p.segment_index[0] == 0);
  CHECK(p.segment_index[1] == 1);

  // segments are right-closed on the left
  CHECK(p.index_at(0.25) == 0);
  CHECK(p.index_at(0.5) == 1);
  CHECK(p.index_at(std::nextafter(0.5, 0.0)) == 0);

  f.k = 2;
  KLevelProfile q = compute_klevel(f);
  REQUIRE(q.breakpoints.size() == 1);
  CHECK(q.segment_index[0] == 1);
  CHECK(q.segment_index[1] == 0);
  check_routes_identical(f);
}

TEST_CASE("a pencil through one point") {
  // slopes 1, 0, -1 all meeting at (0.5, 0.5)
  LineFamily f = family_of({1.0, 0.0, -1.0}, {0.0, 0.5, 1.0}, 1);
  KLevelProfile p = compute_klevel(f);
  REQUIRE(p.breakpoints.size() == 1);
  CHECK(p.breakpoints[0] == 0.5);
  CHECK(p.segment_index[0] == 0);
  CHECK(p.segment_index[1] == 2);

  // the median line never changes: the batch nets out to no emission
  f.k = 2;
  KLevelProfile q = compute_klevel(f);
  CHECK(q.breakpoints.empty());
  REQUIRE(q.segment_index.size() == 1);
  CHECK(q.segment_index[0] == 1);

  f.k = 3;
  KLevelProfile r = compute_klevel(f);
  REQUIRE(r.segment_index.size() == 2);
  CHECK(r.segment_index[0] == 2);
  CHECK(r.segment_index[1] == 0);

  for (int k = 1; k <= 3; ++k) {
    f.k = k;
    check_routes_identical(f);
  }
}

TEST_CASE("exact duplicates collapse to the smallest index") {
  // lines 0 and 2 coincide; the profile must never report index 2
  LineFamily f = family_of({1.0, -1.0, 1.0, 0.5}, {0.0, 1.0, 0.0, 0.3}, 2);
  for (int k = 1; k <= 4; ++k) {
    f.k = k;
    KLevelProfile p = compute_klevel(f);
    for (int idx : p.segment_index) CHECK(idx != 2);
    check_routes_identical(f);
    for (double z : {-1.7, -0.3, 0.1, 0.44, 0.9, 2.2})
      CHECK(p.index_at(z) == orc::brute_klevel_index(f, z));
  }
}

TEST_CASE("parallel lines never cross") {
  LineFamily f = family_of({0.7, 0.7, 0.7}, {1.0, -0.5, 0.0}, 2);
  KLevelProfile p = compute_klevel(f);
  CHECK(p.breakpoints.empty());
  CHECK(p.segment_index[0] == 2);
  check_routes_identical(f);
}

TEST_CASE("random families: both routes identical, brute agreement") {
  Rng rng(derive_stream(404, "klevel"));
  for (int rep = 0; rep < 120; ++rep) {
    int l = 2 + rng.below(50);
    bool dups = rng.uniform() < 0.25;
    bool conc = rng.uniform() < 0.25;
    LineFamily f = random_family(rng, l, dups, conc);
    check_routes_identical(f);
    KLevelProfile p = compute_klevel(f);
    for (int probe = 0; probe < 40; ++probe) {
      double z = 6.0 * (rng.uniform() - 0.5);
      CHECK(p.index_at(z) == orc::brute_klevel_index(f, z));
    }
  }
}

TEST_CASE("windowed construction agrees inside the window") {
  Rng rng(derive_stream(405, "klevel"));
  for (int rep = 0; rep < 40; ++rep) {
    int l = 3 + rng.below(30);
    LineFamily f = random_family(rng, l, false, false);
    KLevelProfile full = compute_klevel(f);
    KLevelProfile win = compute_klevel(f, -1.0, 1.0);
    check_routes_identical(f, -1.0, 1.0);
    for (double bp : win.breakpoints) {
      CHECK(bp > -1.0);
      CHECK(bp <= 1.0);
    }
    for (int probe = 0; probe < 25; ++probe) {
      double z = 2.0 * (rng.uniform() - 0.5) * 0.999;
      CHECK(win.index_at(z) == full.index_at(z));
    }
  }
}

TEST_CASE("line family validation") {
  LineFamily f = family_of({1.0, 2.0}, {0.0, 1.0}, 1);
  CHECK_NOTHROW(f.validate());
  f.k = 0;
  CHECK_THROWS(f.validate());
  f.k = 3;
  CHECK_THROWS(f.validate());
  f.k = 1;
  f.intercepts.resize(1);
  CHECK_THROWS(f.validate());

  LineFamily g = family_of({1.0, std::nan("")}, {0.0, 1.0}, 1);
  CHECK_THROWS(g.validate());
  LineFamily h = family_of({1.0, -1.0}, {0.0, 1.0}, 1);
  CHECK_THROWS(compute_klevel(h, 1.0, 1.0));
  CHECK_THROWS(compute_klevel_direct(h, 2.0, -2.0));
}
