#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "flatspec/geodesic.hpp"
#include "flatspec/traintrack.hpp"

namespace flatspec {

enum class BlockKind { Sigma102, Sigma101 };

struct BlockSpec {
  BlockKind kind = BlockKind::Sigma102;
  double t = 0.5;
  double eps = 0, delta = 0;
};

// A Euclidean cylinder cut by two saddle connections between its boundaries.
struct CylinderGeom {
  double circumference = 0, height = 0;
  double shear = 0;  // horizontal offset of the top special vertex over the bottom one
};

struct BlockData {
  BlockSpec spec;
  TrainTrack track;                     // lengths assigned, no embedding
  std::vector<CylinderGeom> cylinders;  // Sigma102: C1, C2
  double area = 0;
  // Sigma101: parallelogram sides u, v and slit vector from the lattice point
  Vec2 u, v, slit;
};

// Sigma102 branch order: A1 A2 B1 B2 alpha alpha' alpha'' beta beta' beta''.
BlockData build_block(const BlockSpec& spec);
// The block track with zero lengths.
TrainTrack delta_track();
// The two circumference relations C1: A1+alpha = B1+beta, C2: A2+alpha = B2+beta.
std::vector<LinearRelation> delta_relations();
// Length change listed for (eps, delta) in the published perturbation table.
std::vector<double> published_table(double eps, double delta);
// Length change d = M^T x for switch potentials x = (eps, delta, delta, eps) on (a1, a2, b1, b2).
QVec delta_perturbation(const Q& eps, const Q& delta);
double embedding_bound(double t);

struct AssembledFamily {
  int genus = 2;
  double t = 0;                   // block scale, 4 t^2 (g-1) = 1
  double offset = 0;              // gluing offset of the b-points past the a-points
  std::vector<double> params;     // requested (eps_1, delta_1, ...)
  std::vector<double> effective;  // parameters on the unit-area slice
  double slice_shift = 0;         // common shift added to every parameter
  double raw_area = 0;            // area at the requested parameters
  FlatSurface surface;
  TrainTrack track;  // embedded, lengths from the realized surface
  QVec potentials;   // rational switch potentials used
  int blocks() const { return genus - 1; }
};

struct AssembleOptions {
  bool unit_area = true;
  int bits = 50;  // dyadic precision of realized coordinates
};

AssembledFamily assemble_closed(int genus, const std::vector<double>& params, const AssembleOptions& opt = {});
AssembledFamily deform(const AssembledFamily& fam, const std::vector<double>& params);
// Realizes the track length vector plus d; d must lie in the admissible space.
AssembledFamily deform_lengths(const AssembledFamily& fam, const QVec& d);
// Relations on the assembled track that keep every cylinder's two boundaries of equal length.
std::vector<LinearRelation> assembled_relations(const AssembledFamily& fam);
// dim of admissible perturbations and of the unit-area slice.
std::pair<int, int> family_dimensions(const AssembledFamily& fam);
// Carried circuits realized as closed curves on the family surface.
std::vector<std::pair<Circuit, CurveClass>> carried_panel(const AssembledFamily& fam, int count, int max_steps = 14);
// Cylinder core curves of every block: boundary circuits alpha.A1 and alpha.A2.
std::vector<CurveClass> circumference_panel(const AssembledFamily& fam);

struct PanelDelta {
  std::string name;
  double length_a = 0, length_b = 0, delta = 0;
  bool carried = false;
};
struct IsospectralReport {
  std::vector<PanelDelta> rows;
  double max_carried_delta = 0;
  double max_delta = 0;
  std::vector<std::string> witnesses;  // non-carried curves whose length moved more than the threshold
  bool isometry_suspect = false;        // every delta vanished
};
IsospectralReport verify_isospectral(const AssembledFamily& a, const AssembledFamily& b,
                                     const std::vector<CurveClass>& panel, double threshold = 1e-3,
                                     double tol = 1e-9);

struct GridReport {
  int points = 0;
  double max_carried_delta = 0;
  double max_other_delta = 0;
  bool all_magnetic = true;
  double max_area_error = 0;
  double max_embedding_error = 0;
};
// Genus-g family on an n x n grid of (eps, delta) inside the embedding bound, same parameters in every block.
GridReport family_grid(int genus, int n, const std::vector<CurveClass>& carried, const std::vector<CurveClass>& other,
                       bool parallel = true);

// tau = x + iy with l_i = |p_i + q_i tau| / sqrt(y).
std::optional<std::complex<double>> torus_from_three_lengths(const std::vector<std::pair<long, long>>& classes,
                                                             const std::vector<double>& lengths, double tol = 1e-9);
double torus_length(long p, long q, std::complex<double> tau);

enum class Relation { Contained, Disjoint, Crossing };

struct FlatPiece {
  std::string name;
  FlatSurface surface;
};

struct WeightedCurve {
  std::string name;
  Q weight = 0;  // cylinder height s
  // slit sites: a corner at a marked point of each piece
  int piece_a = 0, piece_b = 1;
  Corner site_a{-1, -1}, site_b{-1, -1};
};

// base + per_slit * (slit length); lets a polyline cross slits of any size at their midpoints.
struct ScaledVec {
  Vec2q base, per_slit;
  Vec2q at(const Q& slit) const { return base + per_slit * slit; }
};

// A straight piece of a test class inside one flat piece, from slit site to slit site or closed.
struct FlatPart {
  int piece = 0;
  Vec2q holonomy;
};

struct TestClassSpec {
  std::string name;
  Relation relation = Relation::Disjoint;
  std::vector<int> lambda_crossings;  // i(alpha_i, c)
  std::vector<FlatPart> flat_parts;
  int core_of = -1;  // the class is the core of this lambda curve
  // Closed polyline on the degenerate surface: start piece, piece triangle, local point, then vectors in the
  // piece frame.
  int start_piece = 0, start_triangle = 0;
  ScaledVec start_point;
  std::vector<ScaledVec> steps;
};

struct MixedStructure {
  std::vector<FlatPiece> pieces;
  std::vector<WeightedCurve> lambda;  // weights are exact
  std::vector<TestClassSpec> classes;
  Vec2q slit_direction{Q(0), Q(1)};
};

MixedStructure mixed_from_json(const nlohmann::json& j, const std::string& base_dir);

struct Degeneration {
  FlatSurface surface;
  int n = 1;
  Q slit;   // 1/n^2
  double raw_area = 0;
  std::vector<int> piece_offset;  // first triangle of each piece
  std::vector<int> split_triangles;
  std::vector<CurveClass> cores;  // core of each lambda cylinder
};

Degeneration degeneration_family(const MixedStructure& eta, int n);
// Registered class realized on the degenerate surface.
CurveClass realize_class(const MixedStructure& eta, const Degeneration& d, int index);
double mixed_pairing(const MixedStructure& eta, int index);
// I(eta, eta) after scaling the flat part to unit area.
double mixed_self_pairing(const MixedStructure& eta, long quad_n = 10000);

// Two unit square tori, each with a marked centre, joined by one cylinder of height s.
MixedStructure two_tori_mixed(const Q& s);
// Unit square torus with its centre marked, four triangles around the centre.
FlatSurface marked_square_torus();

}  // namespace flatspec
