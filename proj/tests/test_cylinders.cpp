#include <doctest.h>

#include <cmath>

#include "flatspec/cylinders.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

TEST_CASE("torus classes are cylinders") {
  auto s = testdata::load("square_torus.json");
  auto r = detect_cylinder(s, torus_curve(s, 1, 0));
  REQUIRE(r.has_value());
  CHECK(r->circumference == doctest::Approx(1.0));
  CHECK(r->height == doctest::Approx(1.0));
  CHECK(r->theta == doctest::Approx(0.0));
  for (auto [p, q] : {std::pair{2, 1}, {3, -2}, {1, 4}}) {
    auto c = detect_cylinder(s, torus_curve(s, p, q));
    REQUIRE(c.has_value());
    CHECK(c->circumference * c->height == doctest::Approx(1.0));
  }
  CHECK_THROWS(detect_cylinder(s, CurveClass::arc({{0, 0}}, 0, 0)));
}

TEST_CASE("twist test on the torus is strict") {
  auto s = testdata::load("square_torus.json");
  auto t = twist_equality_test(s, torus_curve(s, 1, 0), torus_curve(s, 0, 1), 0);
  CHECK(t.lhs == doctest::Approx(std::sqrt(2.0) - 1));
  CHECK(t.rhs == doctest::Approx(1.0));
  CHECK_FALSE(t.equal);
  auto e = twist_escalation(s, torus_curve(s, 1, 0), torus_curve(s, 0, 1), 16);
  CHECK_FALSE(e.reached);
  for (const auto& st : e.steps) CHECK(st.lhs < st.rhs - 1e-9);
  CHECK_THROWS_WITH(twist_equality_test(s, torus_curve(s, 1, 0), torus_curve(s, 2, 0), 0), "disjoint pair");
}

TEST_CASE("cylinders by direction") {
  auto s = testdata::load("square_torus.json");
  auto h = cylinders_in_direction(s, Vec2q{Q(1), Q(0)}, 2);
  REQUIRE(h.size() == 1);
  CHECK(h[0].circumference == doctest::Approx(1.0));
  CHECK(h[0].height == doctest::Approx(1.0));
  CHECK(cylinders_in_direction(s, Vec2q{Q(1), Q(1)}, 1.0).empty());
  CHECK(cylinders_in_direction(s, Vec2q{Q(1), Q(1)}, 1.5).size() == 1);
  CHECK(cylinders_in_direction(s, std::sqrt(2.0) - 0.3, 10).empty());
  // octagon: horizontal direction
  auto o = testdata::load("octagon.json");
  auto oc = cylinders_in_direction(o, Vec2q{Q(1), Q(0)}, 20);
  Q total = 0;
  for (const auto& c : oc) {
    total += c.height_area;
    auto g = tighten(o, c.core);
    CHECK(g.cylinder);
    CHECK(std::abs(g.cyl.circumference - c.circumference) < 1e-12);
    CHECK(std::abs(g.cyl.height - c.height) < 1e-12);
  }
  CHECK(total == surface_area(o));
  // more cylinder directions as the bound grows
  size_t prev = 0;
  for (double b : {3.0, 5.0, 8.0}) {
    size_t n = 0;
    for (auto d : {Vec2q{Q(1), Q(0)}, Vec2q{Q(0), Q(1)}, Vec2q{Q(1), Q(1)}, Vec2q{Q(1), Q(-1)}, Vec2q{Q(2), Q(1)}})
      n += cylinders_in_direction(o, d, b).empty() ? 0 : 1;
    CHECK(n >= prev);
    prev = n;
  }
}
