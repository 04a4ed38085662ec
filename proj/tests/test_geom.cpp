#include <doctest.h>

#include <cmath>
#include <numbers>

#include "flatspec/develop.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

TEST_CASE("square torus parses and validates") {
  auto s = testdata::load("square_torus.json");
  auto r = validate_surface(s);
  CHECK(r.pass);
  CHECK(r.genus == 1);
  CHECK(r.cone_points.empty());
  CHECK(surface_area(s) == 1);
}

TEST_CASE("octagon has one 6pi point and genus 2") {
  auto s = testdata::load("octagon.json");
  auto r = validate_surface(s);
  CHECK(r.pass);
  CHECK(r.genus == 2);
  REQUIRE(r.cone_points.size() == 1);
  CHECK(r.cone_points[0].k == 6);
  CHECK(r.gauss_bonnet_sum == -4);
}

TEST_CASE("edges not summing to zero is a parse error") {
  const std::string txt = R"({"version":1,"triangles":[{"edges":[[1,1,0,1],[0,1,1,1],[-1,1,0,1]]}],"gluings":[]})";
  CHECK_THROWS_AS(parse_surface(txt), ParseError);
}

TEST_CASE("vertex of angle pi fails validation") {
  // A pillowcase-like double triangle has corners of angle below 2pi.
  const std::string txt = R"({"version":1,"triangles":[{"edges":[[1,1,0,1],[0,1,1,1],[-1,1,-1,1]]},{"edges":[[-1,1,0,1],[0,1,-1,1],[1,1,1,1]]}],
    "gluings":[[[0,0],[1,0],-1],[[0,1],[1,1],-1],[[0,2],[1,2],-1]]})";
  auto s = parse_surface(txt);
  auto r = validate_surface(s);
  CHECK_FALSE(r.pass);
}

TEST_CASE("round trip serialization is exact") {
  auto s = testdata::load("octagon.json");
  auto t = parse_surface(serialize_surface(s));
  REQUIRE(t.num_triangles() == s.num_triangles());
  for (int i = 0; i < s.num_triangles(); ++i)
    for (int e = 0; e < 3; ++e) {
      CHECK(t.tri[i].e[e] == s.tri[i].e[e]);
      CHECK(t.twin[i][e] == s.twin[i][e]);
      CHECK(t.sign[i][e] == s.sign[i][e]);
    }
}

TEST_CASE("apply_linear") {
  auto s = testdata::load("square_torus.json");
  auto t = apply_linear(s, PlanarMatrix::diag(2, Q(1, 2)));
  CHECK(surface_area(t) == surface_area(s));
  CHECK_THROWS_AS(apply_linear(s, PlanarMatrix::diag(1, -1)), GeometryError);
}

TEST_CASE("corridor holonomy on the square torus") {
  auto s = testdata::load("square_torus.json");
  auto c = torus_curve(s, 1, 1);
  auto cor = develop_corridor(s, c.crossings, true);
  CHECK(cor.holonomy_sign == 1);
  CHECK(cor.holonomy_translation == Vec2q(1, 1));
  auto h = torus_curve(s, 1, 0);
  auto ch = develop_corridor(s, h.crossings, true);
  CHECK(ch.holonomy_translation == Vec2q(1, 0));
}
