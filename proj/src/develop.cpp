#include "flatspec/develop.hpp"

#include <cmath>
#include <limits>

namespace flatspec {

int orient_vec(const Vec2q& u, const Vec2q& v) { return sgn(cross(u, v)); }

int orient(const DevPt& a, const DevPt& b, const DevPt& c) {
  const double bx = b.d.x - a.d.x, by = b.d.y - a.d.y, cx = c.d.x - a.d.x, cy = c.d.y - a.d.y;
  const double det = bx * cy - by * cx;
  const double mag = (std::abs(bx) + std::abs(by)) * (std::abs(cx) + std::abs(cy)) +
                     (std::abs(a.d.x) + std::abs(a.d.y)) * (std::abs(bx) + std::abs(by) + std::abs(cx) + std::abs(cy));
  if (std::abs(det) > 1e-12 * mag) return det > 0 ? 1 : -1;
  return sgn(cross(b.q - a.q, c.q - a.q));
}

DevTri next_placement(const FlatSurface& s, const DevTri& cur, Slot exit) {
  const int sg = s.sign_of(exit);
  DevTri n;
  n.t = s.twin_of(exit).t;
  n.s = cur.s * sg;
  n.c = cur.c - signed_vec(cur.s * sg, s.transition_offset(exit));
  return n;
}

Vec2q Corridor::portal_start(const FlatSurface& s, int l) const {
  const Slot x = crossings[l];
  return tris[l].map(s.tri[x.t].corner(x.e));
}

Vec2q Corridor::portal_end(const FlatSurface& s, int l) const {
  const Slot x = crossings[l];
  return tris[l].map(s.tri[x.t].corner(x.e + 1));
}

Corridor develop_corridor(const FlatSurface& s, const std::vector<Slot>& crossings, bool closed) {
  if (crossings.empty()) throw GeometryError("empty crossing sequence");
  Corridor c;
  c.crossings = crossings;
  c.closed = closed;
  DevTri cur{crossings[0].t, 1, Vec2q()};
  c.tris.push_back(cur);
  for (size_t l = 0; l < crossings.size(); ++l) {
    const Slot x = crossings[l];
    if (x.t != cur.t) throw GeometryError("crossing " + std::to_string(l) + " does not leave the current triangle");
    cur = next_placement(s, cur, x);
    c.tris.push_back(cur);
  }
  if (closed) {
    if (cur.t != crossings[0].t) throw GeometryError("closed crossing sequence does not return to its start");
    c.holonomy_sign = cur.s;
    c.holonomy_translation = cur.c;
  }
  return c;
}

}  // namespace flatspec
