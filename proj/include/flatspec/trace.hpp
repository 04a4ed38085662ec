#pragma once

#include <optional>
#include <vector>

#include "flatspec/curve.hpp"
#include "flatspec/surface.hpp"

namespace flatspec {

struct EdgeHit {
  Slot exit;
  Q param;  // position along the exit slot, measured from its start corner
};

struct TraceResult {
  enum class Stop { Done, Vertex };
  Stop stop = Stop::Done;
  std::vector<EdgeHit> hits;
  int end_t = -1;
  Vec2q end_p;           // local coordinates in end_t
  Corner end_corner{};   // when stop == Vertex
  Vec2q end_dir;         // direction of travel in the frame of end_t
  std::optional<Slot> along_edge;  // first leg ran along this edge slot out of the start corner
  Q fraction_used = 1;   // fraction of the input vector consumed
};

// Straight segment from p (inside or on the boundary of triangle t) along vector v.
TraceResult trace_from_point(const FlatSurface& s, int t, const Vec2q& p, const Vec2q& v);
// Ray out of a vertex: the corner is rotated until its half-open sector holds v.
TraceResult trace_from_corner(const FlatSurface& s, Corner c, const Vec2q& v);
// Corner (at the same vertex) whose sector [edge c, -edge c-1) contains v, with v rewritten in its frame.
std::pair<Corner, Vec2q> sector_of(const FlatSurface& s, Corner c, const Vec2q& v);
bool in_sector(const FlatSurface& s, Corner c, const Vec2q& v);

// Lattice basis of a genus-one surface: labels.torus_basis or two independent edge vectors.
std::pair<Vec2q, Vec2q> torus_basis(const FlatSurface& s);
CurveClass torus_curve(const FlatSurface& s, long p, long q);
// Closed straight curve through an interior point of triangle t with translation holonomy v.
CurveClass straight_closed_curve(const FlatSurface& s, int t, const Vec2q& p, const Vec2q& v);

}  // namespace flatspec
