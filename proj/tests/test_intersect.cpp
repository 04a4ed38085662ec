#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "flatspec/intersect.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

TEST_CASE("torus intersection numbers follow the determinant") {
  auto s = testdata::load("square_torus.json");
  const int pq[][4] = {{1, 0, 0, 1}, {1, 0, 1, 1}, {2, 1, 1, 2}, {3, -2, 1, 1}, {1, 1, 1, -1}, {2, 1, 2, 1}, {5, 3, 2, 1}};
  for (auto& v : pq) {
    auto a = torus_curve(s, v[0], v[1]), b = torus_curve(s, v[2], v[3]);
    const int expect = std::abs(v[0] * v[3] - v[1] * v[2]);
    CAPTURE(v[0]);
    CAPTURE(v[1]);
    CAPTURE(v[2]);
    CAPTURE(v[3]);
    CHECK(intersection_number(s, a, b) == expect);
    CHECK(intersection_number(s, b, a) == expect);
    CHECK(intersection_oracle(s, a, b) == expect);
  }
}

// Product of two closed curves based in a common triangle.
static CurveClass product(const FlatSurface& s, CurveClass a, CurveClass b, bool invert_b) {
  a = reduce(s, a);
  b = reduce(s, b);
  if (invert_b) {
    std::vector<Slot> r;
    for (auto it = b.crossings.rbegin(); it != b.crossings.rend(); ++it) r.push_back(s.twin_of(*it));
    b.crossings = r;
  }
  for (size_t i = 0; i < a.crossings.size(); ++i)
    for (size_t j = 0; j < b.crossings.size(); ++j) {
      if (a.crossings[i].t != b.crossings[j].t) continue;
      std::vector<Slot> xs;
      for (size_t k = 0; k < a.crossings.size(); ++k) xs.push_back(a.crossings[(i + k) % a.crossings.size()]);
      for (size_t k = 0; k < b.crossings.size(); ++k) xs.push_back(b.crossings[(j + k) % b.crossings.size()]);
      return CurveClass::closed_curve(xs);
    }
  throw GeometryError("no common triangle");
}

TEST_CASE("octagon intersections agree with the oracle") {
  auto s = testdata::load("octagon.json");
  // side-pairing cores and a few longer loops
  std::vector<CurveClass> cs = {
      straight_closed_curve(s, 0, {Q(1), Q(1, 5)}, {Q(0), Q(4)}),
      straight_closed_curve(s, 0, {Q(12, 5), Q(7, 10)}, {Q(-3), Q(3)}),
      straight_closed_curve(s, 1, {Q(5, 2), Q(11, 5)}, {Q(-4), Q(0)}),
      straight_closed_curve(s, 2, {Q(12, 5), Q(33, 10)}, {Q(-3), Q(-3)}),
  };
  cs.push_back(dehn_twist(s, cs[0], cs[1], 1));
  cs.push_back(dehn_twist(s, cs[2], cs[3], -1));
  cs.push_back(dehn_twist(s, cs[1], cs[4], 2));
  cs.push_back(product(s, cs[0], cs[1], false));
  cs.push_back(product(s, cs[0], cs[2], true));
  cs.push_back(product(s, cs[3], cs[1], false));
  cs.push_back(product(s, cs[4], cs[2], false));
  for (auto& c : cs) {
    auto g = tighten(s, c);
    MESSAGE("len " << g.length << " cyl " << g.cylinder << " segs " << g.chain.segs.size());
  }
  for (size_t i = 0; i < cs.size(); ++i)
    for (size_t j = 0; j < cs.size(); ++j) {
      int a = -1, b = -1;
      try {
        a = intersection_number(s, cs[i], cs[j]);
        b = intersection_oracle(s, cs[i], cs[j]);
      } catch (const std::exception& e) {
        MESSAGE(std::string(e.what()));
      }
      CAPTURE(i);
      CAPTURE(j);
      CHECK(a == b);
      CHECK(a >= 0);
    }
}

TEST_CASE("torus Dehn twist") {
  auto s = testdata::load("square_torus.json");
  auto a = torus_curve(s, 1, 0), b = torus_curve(s, 0, 1);
  CHECK(dehn_twist(s, a, b, 0).crossings == reduce(s, b).crossings);
  auto tb = dehn_twist(s, a, b, 1);
  CHECK(flat_length(s, tb) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(intersection_number(s, tb, torus_curve(s, 1, 1)) == 0);
  auto t3 = dehn_twist(s, a, b, 3);
  CHECK(intersection_number(s, t3, torus_curve(s, 3, 1)) == 0);
  auto tm = dehn_twist(s, a, b, -2);
  CHECK(intersection_number(s, tm, torus_curve(s, -2, 1)) == 0);
  CHECK(intersection_number(s, a, t3) == intersection_number(s, a, b));
  CHECK(flat_length(s, tb) < flat_length(s, b) + flat_length(s, a) * 1 - 1e-9);
}
