#pragma once

#include <optional>
#include <vector>

#include "flatspec/surface.hpp"

namespace flatspec {

struct DevPt {
  Vec2q q;
  Vec2 d;
  DevPt() = default;
  explicit DevPt(Vec2q v) : q(std::move(v)), d(q.approx()) {}
};

// Sign of cross(b-a, c-a) with a floating filter and exact fallback.
int orient(const DevPt& a, const DevPt& b, const DevPt& c);
int orient_vec(const Vec2q& u, const Vec2q& v);

// A surface triangle placed in the plane by z -> s z + c.
struct DevTri {
  int t = 0;
  int s = 1;
  Vec2q c;
  Vec2q map(const Vec2q& z) const { return signed_vec(s, z) + c; }
  Vec2q map_vec(const Vec2q& v) const { return signed_vec(s, v); }
  Vec2q unmap_vec(const Vec2q& v) const { return signed_vec(s, v); }
};

DevTri next_placement(const FlatSurface& s, const DevTri& cur, Slot exit);

struct Corridor {
  std::vector<Slot> crossings;
  std::vector<DevTri> tris;  // tris[l] precedes crossing l
  bool closed = false;
  int holonomy_sign = 1;
  Vec2q holonomy_translation;
  // Developed corner (start, end) of crossing l's edge.
  Vec2q portal_start(const FlatSurface& s, int l) const;
  Vec2q portal_end(const FlatSurface& s, int l) const;
};

// closed: the sequence is cyclic and must return to its first triangle.
Corridor develop_corridor(const FlatSurface& s, const std::vector<Slot>& crossings, bool closed);

}  // namespace flatspec
