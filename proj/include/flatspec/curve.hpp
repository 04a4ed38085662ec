#pragma once

#include <array>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "flatspec/surface.hpp"

namespace flatspec {

// Crossings are stored as exit slots: crossing (t,e) leaves triangle t through edge e.
struct CurveClass {
  enum class Kind { Closed, Arc };
  Kind kind = Kind::Closed;
  std::vector<Slot> crossings;
  std::array<int, 2> ends{-1, -1};
  // Arcs only: explicit endpoint corners; when unset, the corners opposite the first exit and last entry edges.
  Corner start{-1, -1}, finish{-1, -1};
  std::string name;

  bool closed() const { return kind == Kind::Closed; }
  static CurveClass closed_curve(std::vector<Slot> xs, std::string name = {});
  static CurveClass arc(std::vector<Slot> xs, int v0, int v1, std::string name = {});
};

// Throws GeometryError on non-adjacent consecutive crossings.
void check_adjacency(const FlatSurface& s, const CurveClass& c);
// Removes immediate backtracks (cyclically for closed curves).
CurveClass reduce(const FlatSurface& s, const CurveClass& c);
std::vector<int> reduced_indices(const FlatSurface& s, const std::vector<Slot>& xs, bool closed);
// Start and end corners of an arc: opposite the first exit edge and the last entry edge.
Corner arc_start_corner(const FlatSurface& s, const CurveClass& c);
Corner arc_end_corner(const FlatSurface& s, const CurveClass& c);

CurveClass curve_from_json(const FlatSurface& s, const nlohmann::json& j);
nlohmann::json curve_to_json(const CurveClass& c);
CurveClass parse_curve(const FlatSurface& s, const std::string& text);
CurveClass load_curve(const FlatSurface& s, const std::string& arg);

}  // namespace flatspec
