#include <doctest.h>

#include <cmath>

#include "flatspec/foliation.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

TEST_CASE("foliation pairing with torus curves") {
  auto s = testdata::load("square_torus.json");
  auto h = torus_curve(s, 1, 0);
  CHECK(foliation_curve_pairing(DirectionalFoliation(s, kPi / 2), h) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(foliation_curve_pairing(DirectionalFoliation(s, 0), h) == doctest::Approx(0.0));
  auto d = torus_curve(s, 1, 1);
  CHECK(foliation_curve_pairing(DirectionalFoliation(s, kPi / 4), d) < 1e-12);
  // Lipschitz in theta with constant the length
  auto c = torus_curve(s, 3, -2);
  const auto g = tighten(s, c);
  for (int i = 0; i < 50; ++i) {
    const double a = 0.063 * i, b = a + 0.0371 * (i % 7 + 1);
    CHECK(std::abs(foliation_curve_pairing(g, b) - foliation_curve_pairing(g, a)) <= g.length * (b - a) + 1e-12);
  }
}

TEST_CASE("length from foliations") {
  auto s = testdata::load("square_torus.json");
  auto h = torus_curve(s, 1, 0);
  CHECK(length_from_foliations(s, h, {}).value == doctest::Approx(1.0).epsilon(1e-15));
  auto d = torus_curve(s, 1, 1);
  const auto q = length_from_foliations(s, d, EvalMode::quadrature(10000));
  CHECK(std::abs(q.value - std::sqrt(2.0)) < 1e-4);
  CHECK(std::abs(q.value - std::sqrt(2.0)) <= q.error_bound);
  auto o = testdata::load("octagon.json");
  auto core = CurveClass::closed_curve({{0, 2}, {1, 2}, {2, 2}, {3, 1}});
  CHECK(std::abs(length_from_foliations(o, core, {}).value - flat_length(o, core)) < 1e-12);
  CHECK_THROWS(length_from_foliations(s, h, EvalMode::quadrature(1)));
}

TEST_CASE("quadrature error shrinks when the sample count doubles") {
  auto s = testdata::load("square_torus.json");
  const auto g = tighten(s, torus_curve(s, 2, 1));
  double prev = 1e9;
  for (long n : {101L, 202L, 404L, 808L}) {
    const double e = std::abs(length_from_foliations(g, EvalMode::quadrature(n)).value - g.length);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("serial and parallel quadrature agree") {
  auto s = testdata::load("octagon.json");
  const auto g = tighten(s, CurveClass::closed_curve({{0, 2}, {1, 2}, {2, 2}, {3, 1}}));
  const double a = length_from_foliations(g, EvalMode::quadrature(20000), true).value;
  const double b = length_from_foliations(g, EvalMode::quadrature(20000), false).value;
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("foliation against foliation") {
  auto s = testdata::load("square_torus.json");
  DirectionalFoliation f(s, 0), g(s, kPi / 2);
  CHECK(foliation_foliation_pairing(f, g) == doctest::Approx(1.0));
  CHECK(foliation_foliation_pairing(f, f) == doctest::Approx(0.0));
  for (double th : {0.0, 0.3, 1.1, 2.9})
    for (double ph : {0.2, 0.9, 1.7, 2.5}) {
      DirectionalFoliation a(s, th), b(s, ph);
      CHECK(std::abs(foliation_foliation_oracle(a, b, 4000) - foliation_foliation_pairing(a, b)) < 1e-6);
    }
  auto o = testdata::load("octagon.json");
  DirectionalFoliation a(o, 0.4), b(o, 2.0);
  CHECK(std::abs(foliation_foliation_oracle(a, b, 4000) - foliation_foliation_pairing(a, b)) < 1e-5);
  // half the integral over one argument gives the area
  const double half = 0.5 * midpoint([&](double ph) { return foliation_foliation_pairing(a, DirectionalFoliation(o, ph)); },
                                     0.0, kPi, 20000);
  CHECK(half == doctest::Approx(surface_area(o).get_d()).epsilon(1e-7));
  CHECK_THROWS(foliation_foliation_pairing(DirectionalFoliation(s, 0), DirectionalFoliation(o, 1)));
}

TEST_CASE("Liouville pairings") {
  auto s = testdata::load("square_torus.json");
  LiouvillePairing L(s), Lq(s, EvalMode::quadrature(10000));
  auto c = torus_curve(s, 2, 1);
  CHECK(liouville_pairing(L, c).value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(std::abs(liouville_pairing(L, DirectionalFoliation(s, 0.7)).value - 1) < 1e-9);
  CHECK(std::abs(liouville_pairing(Lq, Lq).value - kPi / 2) < 1e-6);
  CHECK(std::abs(liouville_pairing(L, L).value - kPi / 2) < 1e-12);
  // scaling the surface by r scales curve pairings by r
  auto s3 = apply_linear(s, PlanarMatrix::diag(Q(3), Q(3)));
  CHECK(liouville_pairing(LiouvillePairing(s3), c).value == doctest::Approx(3 * std::sqrt(5.0)).epsilon(1e-12));
}
