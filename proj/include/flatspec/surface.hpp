#pragma once

#include <array>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatspec/rational.hpp"

namespace flatspec {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Edge j of triangle t runs from corner j to corner j+1 (mod 3), ccw.
struct Slot {
  int t = -1, e = -1;
  bool operator==(const Slot&) const = default;
  auto operator<=>(const Slot&) const = default;
};

struct Corner {
  int t = -1, c = -1;
  bool operator==(const Corner&) const = default;
  auto operator<=>(const Corner&) const = default;
};

struct Triangle {
  std::array<Vec2q, 3> e;
  // Corner position relative to corner 0.
  Vec2q corner(int j) const;
};

struct VertexClass {
  std::vector<Corner> corners;  // ccw order
  double angle = 0;             // total cone angle
  int k = 0;                    // angle = k*pi when integral
  int holonomy = 1;             // rotation sign picked up walking once around
  bool marked = false;
};

struct SurfaceIndex;

class FlatSurface {
 public:
  std::vector<Triangle> tri;
  std::vector<std::array<Slot, 3>> twin;
  std::vector<std::array<int, 3>> sign;
  std::vector<int> marked;
  nlohmann::json labels = nlohmann::json::object();

  // Builds corner walks; throws GeometryError if the gluing is not a perfect matching.
  void build_index();
  bool indexed() const { return idx_ != nullptr; }
  const SurfaceIndex& index() const;

  int num_triangles() const { return static_cast<int>(tri.size()); }
  int num_vertices() const;
  const std::vector<VertexClass>& vertices() const;
  int vertex_of(Corner c) const;
  int vertex_of_slot_start(Slot s) const { return vertex_of({s.t, s.e}); }
  int vertex_of_slot_end(Slot s) const { return vertex_of({s.t, (s.e + 1) % 3}); }
  bool is_marked(int v) const;
  Slot twin_of(Slot s) const { return twin[s.t][s.e]; }
  int sign_of(Slot s) const { return sign[s.t][s.e]; }
  const Vec2q& edge(Slot s) const { return tri[s.t].e[s.e]; }
  // Canonical representative of the edge {s, twin(s)}.
  Slot canonical(Slot s) const { Slot o = twin_of(s); return o < s ? o : s; }
  // Next corner around the vertex, ccw (crosses edge c-1) and cw (crosses edge c).
  Corner ccw_next(Corner c) const;
  Corner cw_next(Corner c) const;
  // Transition z -> sigma z + c from the frame of s.t into the frame of twin(s).t.
  Vec2q transition_offset(Slot s) const;

 private:
  std::shared_ptr<const SurfaceIndex> idx_;
};

struct SurfaceIndex {
  std::vector<std::array<int, 3>> vertex;
  std::vector<VertexClass> classes;
};

FlatSurface parse_surface(const std::string& text);
FlatSurface surface_from_json(const nlohmann::json& j);
nlohmann::json surface_to_json(const FlatSurface& s);
std::string serialize_surface(const FlatSurface& s);
FlatSurface load_surface(const std::string& path);

struct ValidateOptions {
  bool allow_k1_marked = true;
  double tol = 1e-9;
};

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ConePoint {
  int vertex;
  int k;
  bool marked;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Check> checks;
  int genus = -1;
  int marked_count = 0;
  std::vector<ConePoint> cone_points;  // every vertex class with k != 2 or marked
  int gauss_bonnet_sum = 0;            // sum (2 - k_v)
  int gauss_bonnet_target = 0;         // 2 (2 - 2g)
  nlohmann::json to_json() const;
};

ValidationReport validate_surface(const FlatSurface& s, const ValidateOptions& opt = {});
void require_valid(const FlatSurface& s);

Q surface_area(const FlatSurface& s);

struct PlanarMatrix {
  Q a = 1, b = 0, c = 0, d = 1;
  Q det() const { return a * d - b * c; }
  Vec2q apply(const Vec2q& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  static PlanarMatrix diag(Q x, Q y) { return {x, 0, 0, y}; }
  static PlanarMatrix from_doubles(double a, double b, double c, double d);
  static PlanarMatrix rotation(double theta);
  static PlanarMatrix teichmuller(double t);  // diag(e^t, e^-t)
};

FlatSurface apply_linear(const FlatSurface& s, const PlanarMatrix& m);

}  // namespace flatspec
