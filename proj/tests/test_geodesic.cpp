#include <doctest.h>

#include <cmath>
#include <numeric>

#include "flatspec/geodesic.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

TEST_CASE("torus lengths match the lattice") {
  auto s = testdata::load("square_torus.json");
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {3, -2}, {5, 3}}) {
    auto g = tighten(s, torus_curve(s, p, q));
    CHECK(g.length == doctest::Approx(std::hypot(p, q)).epsilon(1e-14));
    CHECK(g.cylinder);
    CHECK(g.cyl.height * g.cyl.circumference == doctest::Approx(1.0));
  }
}

TEST_CASE("backtracking input gives the same length") {
  auto s = testdata::load("square_torus.json");
  auto c = torus_curve(s, 2, 1);
  auto d = c;
  Slot x = d.crossings[0];
  Slot y = s.twin_of(x);
  // insert a detour out and back at the start
  std::vector<Slot> xs{x, y};
  xs.insert(xs.end(), c.crossings.begin(), c.crossings.end());
  d.crossings = xs;
  CHECK(flat_length(s, d) == doctest::Approx(flat_length(s, c)));
}

TEST_CASE("octagon side curves") {
  auto s = testdata::load("octagon.json");
  // core curve through sides s0 and s4: crossing the fan diagonals
  CurveClass c = CurveClass::closed_curve({{0, 2}, {1, 2}, {2, 2}, {3, 1}});
  auto g = tighten(s, c);
  std::string why;
  bool ok = verify_angle_certificate(s, g, &why);
  INFO(why);
  CHECK(ok);
  MESSAGE("octagon length " << g.length << " cylinder " << g.cylinder << " segs " << g.chain.segs.size());
  CHECK(g.length > 0);
}
