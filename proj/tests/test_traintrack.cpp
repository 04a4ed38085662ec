#include <doctest.h>

#include "flatspec/families.hpp"
#include "flatspec/traintrack.hpp"

using namespace flatspec;

namespace {

TrainTrack loop_track() {
  TrainTrack tt;
  tt.branches = {"x"};
  tt.switches = {{"v", {{0, 1}}, {{0, 0}}}};
  tt.lengths = {2.0};
  return tt;
}

}  // namespace

TEST_CASE("block switch matrix") {
  const TrainTrack tt = delta_track();
  const auto M = switch_matrix(tt);
  REQUIRE(M.size() == 4);
  CHECK(M[0] == std::vector<int>{-1, 1, 0, 0, 1, 0, 0, 0, 1, 1});
  CHECK(M[1] == std::vector<int>{1, -1, 0, 0, 1, 1, 1, 0, 0, 0});
  CHECK(M[2] == std::vector<int>{0, 0, 1, -1, 0, 1, 1, 1, 0, 0});
  CHECK(M[3] == std::vector<int>{0, 0, -1, 1, 0, 0, 0, 1, 1, 1});
  CHECK(rank(switch_matrix_q(tt), 10) == 4);
  CHECK(weight_space_basis(tt).size() == 6);
  for (const auto& w : weight_space_basis(tt)) CHECK(satisfies_switch_conditions(tt, w));
}

TEST_CASE("loop track") {
  const TrainTrack tt = loop_track();
  CHECK(switch_matrix(tt)[0] == std::vector<int>{0});
  CHECK(weight_space_basis(tt).size() == 1);
  LinearRelation r{{Q(1)}, 0};
  CHECK(admissible_perturbations(tt, {r}).empty());
  CHECK(carried_length(tt, {Q(3)}) == doctest::Approx(6.0));
  CHECK_THROWS_WITH(carried_length(tt, {Q(-1)}), "negative weight");
}

TEST_CASE("admissible space of the block is orthogonal to every weight") {
  const TrainTrack tt = delta_track();
  const auto basis = admissible_perturbations(tt, delta_relations());
  CHECK(basis.size() == 2);
  for (const auto& d : basis)
    for (const auto& w : weight_space_basis(tt)) CHECK(sgn(dot(d, w)) == 0);
  const QVec d = delta_perturbation(Q(1, 100), Q(1, 50));
  CHECK(in_row_space(tt, d));
  for (const auto& r : delta_relations()) CHECK(sgn(dot(r.coeffs, d)) == 0);
  CHECK(d[4] == Q(3, 100));
  CHECK(d[5] == Q(1, 25));
  CHECK(d[8] == Q(1, 50));
}

TEST_CASE("published table swaps the diagonal columns") {
  const TrainTrack tt = delta_track();
  const auto tab = published_table(1.0 / 64, 1.0 / 32);
  QVec d;
  for (double x : tab) d.push_back(rationalize(x, 20));
  CHECK_FALSE(in_row_space(tt, d));
  std::swap(d[5], d[8]);
  std::swap(d[6], d[9]);
  CHECK(in_row_space(tt, d));
}

TEST_CASE("inconsistent relations") {
  const TrainTrack tt = delta_track();
  auto rel = delta_relations();
  LinearRelation a{QVec(10, Q(0)), 1}, b{QVec(10, Q(0)), 2};
  a.coeffs[4] = 1;
  b.coeffs[4] = 1;
  rel.push_back(a);
  rel.push_back(b);
  CHECK_THROWS_WITH(admissible_space(tt, rel), "inconsistent constraints");
}

TEST_CASE("track json round trip") {
  TrainTrack tt = delta_track();
  tt.lengths.assign(10, 0.5);
  const auto j = track_to_json(tt);
  const TrainTrack back = track_from_json(j);
  CHECK(back.branches == tt.branches);
  CHECK(switch_matrix(back) == switch_matrix(tt));
  CHECK(back.lengths == tt.lengths);
  CHECK(track_to_json(back) == j);
  auto bad = j;
  bad["switches"][0]["in"].push_back("A1:0");
  CHECK_THROWS(track_from_json(bad));
}

TEST_CASE("circuit enumeration on the block") {
  const TrainTrack tt = delta_track();
  const auto cs = enumerate_circuits(tt, 6, 100);
  CHECK(!cs.empty());
  for (const auto& c : cs) {
    const auto w = circuit_weights(tt, c);
    CHECK(satisfies_switch_conditions(tt, w));
    for (const auto& d : admissible_perturbations(tt, delta_relations())) CHECK(sgn(dot(d, w)) == 0);
  }
  for (size_t i = 1; i < cs.size(); ++i) CHECK(cs[i - 1].size() <= cs[i].size());
}
