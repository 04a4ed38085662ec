#include <doctest.h>

#include <cmath>

#include "flatspec/families.hpp"
#include "flatspec/spectra.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

namespace {

void check_against_oracle(const FlatSurface& s, const Vec2& a, const Vec2& b, double L) {
  const auto sp = unmarked_spectrum(s, L);
  const auto oracle = torus_spectrum_oracle(a, b, L);
  CHECK(sp.complete);
  REQUIRE(sp.lengths.size() == oracle.size());
  for (size_t i = 0; i < oracle.size(); ++i) CHECK(sp.lengths[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
}

}  // namespace

TEST_CASE("marked spectrum of the square torus") {
  const auto s = testdata::load("square_torus.json");
  const auto m = marked_spectrum(s, {torus_curve(s, 1, 0), torus_curve(s, 0, 1), torus_curve(s, 1, 1)});
  REQUIRE(m.lengths.size() == 3);
  CHECK(m.lengths[0] == doctest::Approx(1.0));
  CHECK(m.lengths[1] == doctest::Approx(1.0));
  CHECK(m.lengths[2] == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.ids[2] == "(1,1)");
  CHECK(marked_spectrum(s, {}).lengths.empty());
  const auto p = marked_spectrum(s, {torus_curve(s, 1, 1), torus_curve(s, 1, 0)}, false);
  CHECK(p.lengths[0] == m.lengths[2]);
  CHECK(p.lengths[1] == m.lengths[0]);
}

TEST_CASE("unmarked torus spectrum matches the lattice") {
  const auto s = testdata::load("square_torus.json");
  check_against_oracle(s, {1, 0}, {0, 1}, 2.1);
  check_against_oracle(s, {1, 0}, {0, 1}, 3.0);
  CHECK(unmarked_spectrum(s, 0.5).lengths.empty());
  const auto sh = apply_linear(s, {Q(1), Q(1, 3), Q(0), Q(3, 2)});
  check_against_oracle(sh, {1, 0}, {1.0 / 3, 1.5}, 3.5);
}

TEST_CASE("saddle connections come in reversed pairs") {
  const auto s = testdata::load("octagon.json");
  const auto set = saddle_connections(s, 4.0);
  CHECK(set.complete);
  CHECK(!set.saddles.empty());
  for (size_t i = 0; i < set.saddles.size(); ++i) {
    REQUIRE(set.reverse[i] >= 0);
    CHECK(set.reverse[set.reverse[i]] == static_cast<int>(i));
    CHECK(set.saddles[set.reverse[i]].length == doctest::Approx(set.saddles[i].length));
  }
}

TEST_CASE("unmarked spectrum agrees with tightened lengths") {
  const auto s = testdata::load("octagon.json");
  const auto sp = unmarked_spectrum(s, 4.5);
  CHECK(sp.complete);
  CHECK(!sp.entries.empty());
  const auto set = saddle_connections(s, 4.5);
  for (const auto& e : sp.entries) {
    if (e.power != 1) continue;
    const CurveClass c = chain_curve(s, set, e.chain);
    CHECK(flat_length(s, c) == doctest::Approx(e.length).epsilon(1e-9));
  }
}

TEST_CASE("genus 2 assembly short geodesics") {
  const AssembledFamily f = assemble_closed(2, {0, 0});
  const auto sp = unmarked_spectrum(f.surface, 1.2);
  CHECK(sp.complete);
  int ones = 0;
  for (double l : sp.lengths) ones += std::abs(l - 1) < 1e-9;
  MESSAGE("length-1 geodesics: " << ones << " of " << sp.lengths.size());
  CHECK(ones == 4);
  for (const auto& c : circumference_panel(f)) {
    const double l = flat_length(f.surface, c);
    CHECK(std::find_if(sp.lengths.begin(), sp.lengths.end(), [&](double x) { return std::abs(x - l) < 1e-9; }) !=
          sp.lengths.end());
  }
}

TEST_CASE("ray limit on the square torus") {
  const auto s = testdata::load("square_torus.json");
  const auto rows = ray_limit_check(s, {torus_curve(s, 1, 0), torus_curve(s, 0, 1), torus_curve(s, 2, 1)}, {1, 2, 3});
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CHECK(r.normalized >= r.lower - 1e-12);
    CHECK(r.normalized <= r.upper + 1e-12);
  }
  CHECK(rows[2].target == doctest::Approx(1.0));
  CHECK(std::abs(rows[2].normalized - 1) < 1e-15 + 1e-12);
  CHECK(rows[5].target == doctest::Approx(0.0));
  CHECK(rows[5].normalized == doctest::Approx(std::exp(-6.0)).epsilon(1e-9));
  CHECK(rows[8].residual <= std::exp(-6.0) * 1 + 1e-12);
  CHECK_THROWS(ray_limit_check(s, {torus_curve(s, 1, 0)}, {2, 1}));
  const auto csv = ray_csv(rows);
  CHECK(csv.rfind("id,t,normalized,target,residual,lower,upper\n", 0) == 0);
  CHECK(csv.find("\"(1,0)\",1,") != std::string::npos);
}
