#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "flatspec/curve.hpp"
#include "flatspec/linalg.hpp"

namespace flatspec {

struct BranchEnd {
  int branch = -1;
  int end = 0;  // 0 at the branch start, 1 at its finish
  bool operator==(const BranchEnd&) const = default;
};

struct Switch {
  std::string id;
  std::vector<BranchEnd> in, out;
};

class TrainTrack {
 public:
  std::vector<std::string> branches;
  std::vector<Switch> switches;
  std::vector<double> lengths;               // empty when unassigned
  std::vector<std::vector<Slot>> embedding;  // per branch, slots from its start to its finish; empty when abstract

  int num_branches() const { return static_cast<int>(branches.size()); }
  int num_switches() const { return static_cast<int>(switches.size()); }
  int branch_index(const std::string& name) const;
  bool embedded() const { return !embedding.empty(); }
  // Switch index and side (+1 in, -1 out) of a branch end.
  std::pair<int, int> locate(BranchEnd e) const;
  // Throws GeometryError when an end is missing or repeated, or a switch lacks a side.
  void validate() const;
};

std::vector<std::vector<int>> switch_matrix(const TrainTrack& tt);
QMatrix switch_matrix_q(const TrainTrack& tt);

using WeightVector = QVec;

QMatrix weight_space_basis(const TrainTrack& tt);
bool satisfies_switch_conditions(const TrainTrack& tt, const WeightVector& w);
double carried_length(const TrainTrack& tt, const WeightVector& w);

// Traversal of a branch: forward runs from end 0 to end 1.
struct TrackStep {
  int branch = -1;
  bool forward = true;
  bool operator==(const TrackStep&) const = default;
  auto operator<=>(const TrackStep&) const = default;
};
using Circuit = std::vector<TrackStep>;

WeightVector circuit_weights(const TrainTrack& tt, const Circuit& c);
// Primitive legal circuits up to rotation and reversal, shortest first; at most max_count.
std::vector<Circuit> enumerate_circuits(const TrainTrack& tt, int max_steps, int max_count);
// Closed curve pushed off the embedded circuit to its left.
CurveClass circuit_curve(const FlatSurface& s, const TrainTrack& tt, const Circuit& c);
std::string circuit_name(const TrainTrack& tt, const Circuit& c);

// Weights of the geodesic of c when it runs along the embedded track through legal turns.
std::optional<WeightVector> carrying_weights(const FlatSurface& s, const TrainTrack& tt, const CurveClass& c);

struct MagneticVerdict {
  bool magnetic = true;
  int bad_switch = -1;
  BranchEnd in_end, out_end;
  double angle_a = 0, angle_b = 0;  // the two sides of the offending pair
  double min_angle = 0;             // smallest side angle over all legal pairs
};
MagneticVerdict check_magnetic(const FlatSurface& s, const TrainTrack& tt, double tol = 1e-9);
// Embedded branch lengths against the length vector.
double embedding_length_error(const FlatSurface& s, const TrainTrack& tt);
std::vector<double> embedded_lengths(const FlatSurface& s, const TrainTrack& tt);

// Affine relation sum coeffs[b] d[b] = rhs on a length perturbation d.
struct LinearRelation {
  QVec coeffs;
  Q rhs = 0;
};
struct AdmissibleSpace {
  QMatrix basis;   // directions in row space of the switch matrix meeting the homogeneous relations
  QVec particular; // one admissible perturbation meeting the affine relations
};
AdmissibleSpace admissible_space(const TrainTrack& tt, const std::vector<LinearRelation>& rel);
QMatrix admissible_perturbations(const TrainTrack& tt, const std::vector<LinearRelation>& rel);
bool in_row_space(const TrainTrack& tt, const QVec& d);

TrainTrack track_from_json(const nlohmann::json& j);
nlohmann::json track_to_json(const TrainTrack& tt);
TrainTrack load_track(const std::string& path);

}  // namespace flatspec
