#include "flatspec/cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "flatspec/intersect.hpp"
#include "flatspec/trace.hpp"

namespace flatspec {

CylinderRecord cylinder_record(const GeodesicRep& g) {
  if (!g.cylinder) throw GeometryError("not a cylinder curve");
  CylinderRecord r;
  r.direction = g.cyl.core;
  const Vec2 d = g.cyl.core.approx();
  r.theta = std::atan2(d.y, d.x);
  if (r.theta < 0) r.theta += kPi;
  if (r.theta >= kPi) r.theta -= kPi;
  r.circumference = g.cyl.circumference;
  r.height = g.cyl.height;
  r.height_area = g.cyl.height_area;
  r.boundary[0] = g.cyl.boundary[0];
  r.boundary[1] = g.cyl.boundary[1];
  r.core = g.curve;
  r.fills_surface = g.cyl.fills_surface;
  return r;
}

std::optional<CylinderRecord> detect_cylinder(const FlatSurface& s, const CurveClass& alpha) {
  if (!alpha.closed()) throw GeometryError("closed curves only");
  const GeodesicRep g = tighten(s, alpha);
  if (!g.cylinder) return std::nullopt;
  return cylinder_record(g);
}

TwistTest twist_equality_test(const FlatSurface& s, const CurveClass& alpha, const CurveClass& beta, int power,
                              double tol) {
  TwistTest t;
  t.power = power;
  const GeodesicRep ga = tighten(s, alpha), gb = tighten(s, beta);
  t.intersection = intersection_number(s, ga, gb);
  if (t.intersection == 0) throw GeometryError("disjoint pair");
  const double l0 = power == 0 ? gb.length : flat_length(s, dehn_twist(s, alpha, beta, power));
  const double l1 = flat_length(s, dehn_twist(s, alpha, beta, power + 1));
  t.lhs = l1 - l0;
  t.rhs = ga.length * t.intersection;
  t.equal = std::abs(t.lhs - t.rhs) <= tol * std::max(1.0, t.rhs);
  return t;
}

TwistEscalation twist_escalation(const FlatSurface& s, const CurveClass& alpha, const CurveClass& beta, int n_max,
                                 double tol) {
  TwistEscalation out;
  for (int n = 0; n <= n_max; n = n == 0 ? 1 : 2 * n) {
    out.steps.push_back(twist_equality_test(s, alpha, beta, n, tol));
    if (out.steps.back().equal) {
      out.reached = true;
      break;
    }
  }
  return out;
}

namespace {

Q max_edge2(const FlatSurface& s) {
  Q m = 0;
  for (const auto& T : s.tri)
    for (int e = 0; e < 3; ++e) m = std::max(m, norm2(T.e[e]));
  return m;
}

Q budget_scale(const Vec2q& w, double length) {
  return rationalize(length / w.norm(), 40) + Q(1, 1 << 20);
}

using Key = std::tuple<int, int, int>;

Key end_key(const FlatSurface& s, Corner c, const Vec2q& v, const Vec2q& dir) {
  auto [cc, ww] = sector_of(s, c, v);
  return {cc.t, cc.c, sgn(dot(ww, dir)) > 0 ? 1 : -1};
}

struct Found {
  SaddleSeg seg;
  bool along = false;
};

std::vector<Found> find_saddles(const FlatSurface& s, const Vec2q& dir, double bound) {
  std::vector<Found> out;
  std::set<std::pair<Key, Key>> seen;
  for (size_t t = 0; t < s.tri.size(); ++t)
    for (int c = 0; c < 3; ++c)
      for (int sign : {1, -1}) {
        const Corner cr{static_cast<int>(t), c};
        const Vec2q w = signed_vec(sign, dir);
        if (!in_sector(s, cr, w)) continue;
        const Vec2q v = w * budget_scale(w, bound);
        TraceResult tr = trace_from_corner(s, cr, v);
        if (tr.stop != TraceResult::Stop::Vertex) continue;
        Found f;
        f.seg.start = cr;
        f.seg.vec = v * tr.fraction_used;
        f.seg.dev = f.seg.vec;
        f.seg.length = f.seg.vec.norm();
        if (f.seg.length > bound * (1 + 1e-12)) continue;
        f.seg.v0 = s.vertex_of(cr);
        f.seg.v1 = s.vertex_of(tr.end_corner);
        f.along = tr.along_edge.has_value();
        Key a{cr.t, cr.c, sign}, b = end_key(s, tr.end_corner, -tr.end_dir, dir);
        if (b < a) std::swap(a, b);
        if (!seen.insert({a, b}).second) continue;
        out.push_back(f);
      }
  return out;
}

// Points just off a saddle connection on either side: (triangle, point).
std::vector<std::pair<int, Vec2q>> side_points(const FlatSurface& s, const Found& f) {
  const Corner c = f.seg.start;
  const Triangle& T = s.tri[c.t];
  const Q eps = Q(1, 1 << 16);
  std::vector<std::pair<int, Vec2q>> pts;
  if (f.along) {
    const Slot e{c.t, c.c};
    const Vec2q& ev = T.e[c.c];
    const Vec2q in{-ev.y, ev.x};
    pts.push_back({c.t, T.corner(c.c) + ev * Q(1, 2) + in * eps});
    const Slot o = s.twin_of(e);
    const Triangle& U = s.tri[o.t];
    const Vec2q& ov = U.e[o.e];
    pts.push_back({o.t, U.corner(o.e) + ov * Q(1, 2) + Vec2q{-ov.y, ov.x} * eps});
    return pts;
  }
  // midpoint of the first chord, through the opposite edge
  const int op = (c.c + 1) % 3;
  const Vec2q P = T.corner(c.c), A = T.corner(op);
  const Vec2q& w = f.seg.vec;
  const Q tt = cross(A - P, T.e[op]) / cross(w, T.e[op]);
  const Vec2q m = P + w * (tt / 2);
  const Vec2q n{-w.y, w.x};
  const Q sc = eps * std::min(Q(1), tt);
  pts.push_back({c.t, m + n * sc});
  pts.push_back({c.t, m - n * sc});
  return pts;
}

std::vector<std::pair<std::string, std::string>> boundary_key(const FlatSurface& s, const CylinderData& cy) {
  std::vector<std::pair<std::string, std::string>> key;
  for (const auto& ch : cy.boundary)
    for (const auto& sg : ch.segs) {
      if (sg.start.t < 0) continue;
      auto [cc, ww] = sector_of(s, sg.start, sg.vec);
      key.push_back({std::to_string(cc.t) + ":" + std::to_string(cc.c), to_string(ww.x) + "," + to_string(ww.y)});
    }
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  return key;
}

}  // namespace

std::vector<SaddleSeg> saddle_connections_in_direction(const FlatSurface& s, const Vec2q& dir, double bound) {
  if (!(bound > 0)) throw GeometryError("length bound must be positive");
  std::vector<SaddleSeg> out;
  for (auto& f : find_saddles(s, dir, bound)) out.push_back(f.seg);
  return out;
}

std::vector<CylinderRecord> cylinders_in_direction(const FlatSurface& s, const Vec2q& dir, double bound) {
  if (!(bound > 0)) throw GeometryError("length bound must be positive");
  if (sgn(dir.x) == 0 && sgn(dir.y) == 0) throw GeometryError("zero direction");
  std::vector<CylinderRecord> out;
  std::set<std::vector<std::pair<std::string, std::string>>> seen;
  const double reach = bound + 2 * std::sqrt(max_edge2(s).get_d());
  for (const auto& f : find_saddles(s, dir, bound)) {
    for (const auto& [t, p] : side_points(s, f)) {
      TraceResult tr = trace_from_point(s, t, p, dir * budget_scale(dir, reach));
      if (tr.hits.empty()) continue;
      int period = -1;
      for (size_t k = 1; k < tr.hits.size(); ++k)
        if (tr.hits[k].exit == tr.hits[0].exit && tr.hits[k].param == tr.hits[0].param) {
          period = static_cast<int>(k);
          break;
        }
      if (period < 0) continue;
      std::vector<Slot> xs;
      for (int k = 0; k < period; ++k) xs.push_back(tr.hits[k].exit);
      GeodesicRep g;
      try {
        g = tighten(s, CurveClass::closed_curve(xs));
      } catch (const GeometryError&) {
        continue;
      }
      if (!g.cylinder || g.cyl.circumference > bound * (1 + 1e-12)) continue;
      if (!seen.insert(boundary_key(s, g.cyl)).second) continue;
      out.push_back(cylinder_record(g));
    }
  }
  return out;
}

std::vector<CylinderRecord> cylinders_in_direction(const FlatSurface& s, double theta, double bound) {
  return cylinders_in_direction(s, rationalize(Vec2{std::cos(theta), std::sin(theta)}, 40), bound);
}

}  // namespace flatspec
