#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "flatspec/cylinders.hpp"
#include "flatspec/families.hpp"
#include "flatspec/foliation.hpp"
#include "flatspec/trace.hpp"
#include "helpers.hpp"

using namespace flatspec;

TEST_CASE("block geometry") {
  const BlockData b = build_block({});
  REQUIRE(b.cylinders.size() == 2);
  for (const auto& c : b.cylinders) {
    CHECK(c.circumference == doctest::Approx(1.0));
    CHECK(c.height == doctest::Approx(0.5));
  }
  CHECK(b.area == doctest::Approx(1.0));
  CHECK(b.track.lengths[4] == doctest::Approx(0.5));
  CHECK(b.track.lengths[5] == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_WITH(build_block({BlockKind::Sigma102, 0.5, 0.1, 0.05}), "degenerate block");
  CHECK_THROWS(build_block({BlockKind::Sigma102, -1, 0, 0}));
  const BlockData d = build_block({BlockKind::Sigma102, 0.5, 0.01, 0.02});
  CHECK(d.cylinders[0].circumference == doctest::Approx(1.04));
  CHECK(d.cylinders[1].circumference == doctest::Approx(1.02));
}

TEST_CASE("slit torus block keeps equal length changes") {
  const BlockData a = build_block({BlockKind::Sigma101, 0.5, 0, 0});
  const BlockData b = build_block({BlockKind::Sigma101, 0.5, 0.01, 0.02});
  for (int k = 2; k < 5; ++k) CHECK(b.track.lengths[k] - a.track.lengths[k] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(b.track.lengths[0] == doctest::Approx(a.track.lengths[0]));
}

TEST_CASE("assembled genus 2 and 3 surfaces") {
  for (int g : {2, 3}) {
    const AssembledFamily f = assemble_closed(g, std::vector<double>(2 * (g - 1), 0.0));
    const auto rep = validate_surface(f.surface);
    CHECK(rep.pass);
    CHECK(rep.genus == g);
    CHECK(rep.cone_points.size() == static_cast<size_t>(4 * (g - 1)));
    for (const auto& c : rep.cone_points) CHECK(c.k == 3);
    CHECK(surface_area(f.surface).get_d() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(embedding_length_error(f.surface, f.track) < 1e-12);
    CHECK(check_magnetic(f.surface, f.track).magnetic);
    const auto [dim, slice] = family_dimensions(f);
    CHECK(dim == 2 * (g - 1));
    CHECK(slice == 2 * g - 3);
  }
}

TEST_CASE("carried lengths are constant along the family") {
  const AssembledFamily a = assemble_closed(2, {0, 0});
  const AssembledFamily b = assemble_closed(2, {0.01, -0.02});
  CHECK(validate_surface(b.surface).pass);
  CHECK(surface_area(b.surface).get_d() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_magnetic(b.surface, b.track).magnetic);
  const auto panel = carried_panel(a, 20);
  CHECK(panel.size() >= 10);
  std::vector<CurveClass> curves;
  for (const auto& [c, curve] : panel) {
    CHECK(carrying_weights(a.surface, a.track, curve).has_value());
    curves.push_back(curve);
  }
  for (CurveClass c : circumference_panel(a)) curves.push_back(c);
  const auto rep = verify_isospectral(a, b, curves);
  CHECK(rep.max_carried_delta < 1e-9);
  CHECK_FALSE(rep.isometry_suspect);
  CHECK_FALSE(rep.witnesses.empty());
}

TEST_CASE("deformation errors") {
  const AssembledFamily a = assemble_closed(2, {0, 0});
  CHECK_THROWS_WITH(assemble_closed(2, {0.2, 0.2}), "degenerate block");
  CHECK_THROWS(assemble_closed(2, {0.0}));
  QVec d(a.track.num_branches(), Q(0));
  d[a.track.branch_index("alpha_0")] = Q(1, 100);
  CHECK_THROWS_WITH(deform_lengths(a, d), "admissibility violation");
  const auto basis = admissible_perturbations(a.track, assembled_relations(a));
  QVec ok(a.track.num_branches(), Q(0));
  for (size_t i = 0; i < ok.size(); ++i) ok[i] = basis[0][i] * Q(1, 200);
  const AssembledFamily b = deform_lengths(a, ok);
  for (int k = 0; k < a.track.num_branches(); ++k)
    CHECK(b.track.lengths[k] - a.track.lengths[k] == doctest::Approx(ok[k].get_d()).epsilon(1e-9));
}

TEST_CASE("tangency flipped at a switch is not magnetic") {
  AssembledFamily a = assemble_closed(2, {0, 0});
  TrainTrack tt = a.track;
  std::swap(tt.switches[0].in[1], tt.switches[0].out[0]);
  const auto v = check_magnetic(a.surface, tt);
  CHECK_FALSE(v.magnetic);
  CHECK(v.bad_switch == 0);
}

TEST_CASE("torus from three lengths") {
  const std::complex<double> tau{0.3, 1.7};
  const std::vector<std::pair<long, long>> cls{{1, 0}, {0, 1}, {1, 1}};
  std::vector<double> ls;
  for (auto [p, q] : cls) ls.push_back(torus_length(p, q, tau));
  auto r = torus_from_three_lengths(cls, ls);
  REQUIRE(r.has_value());
  CHECK(std::abs(*r - tau) < 1e-9);
  auto sq = torus_from_three_lengths(cls, {1, 1, std::sqrt(2.0)});
  REQUIRE(sq.has_value());
  CHECK(std::abs(*sq - std::complex<double>{0, 1}) < 1e-9);
  CHECK_FALSE(torus_from_three_lengths(cls, {1, 1, 3}).has_value());
  CHECK_THROWS_WITH(torus_from_three_lengths({{1, 0}, {0, 1}}, {1, 1}), "under-determined");
  CHECK_THROWS_WITH(torus_from_three_lengths({{1, 0}, {2, 0}, {0, 1}}, {1, 2, 1}), "under-determined");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.5, 2.0);
  for (int i = 0; i < 50; ++i) {
    const std::complex<double> z{ux(rng), uy(rng)};
    std::vector<double> l;
    for (auto [p, q] : cls) l.push_back(torus_length(p, q, z));
    auto back = torus_from_three_lengths(cls, l);
    REQUIRE(back.has_value());
    CHECK(std::abs(*back - z) < 1e-8);
  }
}

TEST_CASE("marked torus file") {
  const FlatSurface s = testdata::load("marked_torus.json");
  const FlatSurface m = marked_square_torus();
  CHECK(surface_to_json(s) == surface_to_json(m));
  CHECK(s.marked.size() == 1);
  CHECK(validate_surface(s).pass);
}

TEST_CASE("degeneration of two tori") {
  const MixedStructure eta = two_tori_mixed(Q(1));
  for (int n : {4, 8}) {
    const Degeneration d = degeneration_family(eta, n);
    const auto rep = validate_surface(d.surface);
    CHECK(rep.pass);
    CHECK(rep.genus == 2);
    CHECK(d.surface.marked.empty());
    CHECK(d.raw_area == doctest::Approx(2 + 2.0 / (n * n)));
    REQUIRE(d.cores.size() == 1);
    CHECK(flat_length(d.surface, d.cores[0]) == doctest::Approx(2.0 / (n * n)).epsilon(1e-12));
    for (int i = 0; i < static_cast<int>(eta.classes.size()); ++i) {
      const double l = flat_length(d.surface, realize_class(eta, d, i));
      CHECK(std::abs(l - mixed_pairing(eta, i)) < 10.0 / (n * n));
    }
  }
  CHECK(mixed_pairing(eta, 0) == doctest::Approx(4.0));
  CHECK(mixed_pairing(eta, 6) == 0);
  CHECK_THROWS_WITH(mixed_pairing(eta, 99), "declare decomposition");
  CHECK(std::abs(mixed_self_pairing(eta, 20000) - kPi / 2) < 1e-6);
}

TEST_CASE("mixed structure file matches the built-in one") {
  const MixedStructure a = two_tori_mixed(Q(1));
  const MixedStructure b = mixed_from_json(nlohmann::json::parse(std::ifstream(testdata::path("two_tori_mixed.json"))),
                                           FLATSPEC_DATA_DIR);
  REQUIRE(a.classes.size() == b.classes.size());
  const Degeneration da = degeneration_family(a, 5), db = degeneration_family(b, 5);
  CHECK(da.raw_area == doctest::Approx(db.raw_area));
  for (int i = 0; i < static_cast<int>(a.classes.size()); ++i) {
    CHECK(mixed_pairing(a, i) == doctest::Approx(mixed_pairing(b, i)));
    CHECK(flat_length(da.surface, realize_class(a, da, i)) ==
          doctest::Approx(flat_length(db.surface, realize_class(b, db, i))));
  }
}

TEST_CASE("circumference curves are cylinder cores") {
  for (int genus : {2, 3}) {
    const AssembledFamily f = assemble_closed(genus, std::vector<double>(2 * (genus - 1), 0.0));
    for (const auto& c : circumference_panel(f)) {
      CAPTURE(c.name);
      const auto r = detect_cylinder(f.surface, c);
      REQUIRE(r.has_value());
      CHECK(r->circumference == doctest::Approx(flat_length(f.surface, c)));
    }
  }
}
