#include "flatspec/trace.hpp"

#include "flatspec/develop.hpp"

namespace flatspec {

bool in_sector(const FlatSurface& s, Corner c, const Vec2q& v) {
  const Vec2q& out = s.tri[c.t].e[c.c];
  const Vec2q in = -s.tri[c.t].e[(c.c + 2) % 3];
  const int a = orient_vec(out, v), b = orient_vec(v, in);
  if (a == 0) return sgn(dot(out, v)) > 0;
  return a > 0 && b > 0;
}

std::pair<Corner, Vec2q> sector_of(const FlatSurface& s, Corner c, const Vec2q& v) {
  Corner cur = c;
  Vec2q w = v;
  const size_t K = s.vertices()[s.vertex_of(c)].corners.size();
  for (size_t i = 0; i <= K; ++i) {
    if (in_sector(s, cur, w)) return {cur, w};
    const Slot x{cur.t, (cur.c + 2) % 3};
    w = signed_vec(s.sign_of(x), w);
    cur = s.ccw_next(cur);
  }
  throw GeometryError("direction lies in no sector at the vertex");
}

TraceResult trace_from_point(const FlatSurface& s, int t, const Vec2q& p0, const Vec2q& v) {
  TraceResult r;
  Vec2q p = p0, rem = v;
  Q used = 0;
  int cur = t;
  const size_t cap = 10'000'000;
  for (size_t step = 0; step < cap; ++step) {
    const Triangle& tr = s.tri[cur];
    int best = -1;
    Q bs = 0;
    for (int j = 0; j < 3; ++j) {
      const Q b = cross(tr.e[j], rem);
      if (sgn(b) >= 0) continue;
      const Q a = cross(tr.e[j], p - tr.corner(j));
      const Q sj = a / (-b);
      if (best < 0 || sj < bs) {
        best = j;
        bs = sj;
      }
    }
    bool done = best < 0 || bs > 1;
    if (!done && bs == 1) {
      const Vec2q x = p + rem;
      const Q lam = dot(x - tr.corner(best), tr.e[best]) / norm2(tr.e[best]);
      done = sgn(lam) != 0 && lam != 1;
    }
    if (done) {
      r.stop = TraceResult::Stop::Done;
      r.end_t = cur;
      r.end_p = p + rem;
      r.end_dir = rem;
      r.fraction_used = 1;
      return r;
    }
    const Vec2q x = p + rem * bs;
    const Vec2q& ej = tr.e[best];
    const Q lam = dot(x - tr.corner(best), ej) / norm2(ej);
    const Q frac_rem = 1 - bs;
    if (sgn(lam) == 0 || lam == 1) {
      const int cc = sgn(lam) == 0 ? best : (best + 1) % 3;
      r.stop = TraceResult::Stop::Vertex;
      r.end_t = cur;
      r.end_p = x;
      r.end_corner = {cur, cc};
      r.end_dir = rem;
      used += (1 - used) * bs;
      r.fraction_used = used;
      return r;
    }
    const Slot ex{cur, best};
    r.hits.push_back({ex, lam});
    const int sg = s.sign_of(ex);
    const Vec2q off = s.transition_offset(ex);
    p = signed_vec(sg, x) + off;
    rem = signed_vec(sg, rem * frac_rem);
    used += (1 - used) * bs;
    cur = s.twin_of(ex).t;
  }
  throw GeometryError("trace step cap exceeded");
}

TraceResult trace_from_corner(const FlatSurface& s, Corner c0, const Vec2q& v) {
  auto [c, w] = sector_of(s, c0, v);
  const Triangle& tr = s.tri[c.t];
  const Vec2q& out = tr.e[c.c];
  if (orient_vec(out, w) == 0) {
    // Along edge c of the corner.
    TraceResult r;
    r.along_edge = Slot{c.t, c.c};
    const Q f = norm2(out) / dot(w, out);
    r.end_t = c.t;
    r.end_dir = w;
    if (f <= 1) {
      r.stop = TraceResult::Stop::Vertex;
      r.end_corner = {c.t, (c.c + 1) % 3};
      r.end_p = tr.corner(c.c + 1);
      r.fraction_used = f;
    } else {
      r.stop = TraceResult::Stop::Done;
      r.end_p = tr.corner(c.c) + w;
      r.fraction_used = 1;
    }
    return r;
  }
  // Interior of the sector: leave through the opposite edge.
  TraceResult r = trace_from_point(s, c.t, tr.corner(c.c), w);
  return r;
}

static Q json_q(const nlohmann::json& v) {
  if (v.is_number_integer()) return Q(v.get<long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number()) return Q(v.get<double>());
  throw ParseError("torus_basis entries must be rationals");
}

std::pair<Vec2q, Vec2q> torus_basis(const FlatSurface& s) {
  if (s.labels.contains("torus_basis")) {
    const auto& b = s.labels["torus_basis"];
    return {{json_q(b[0][0]), json_q(b[0][1])}, {json_q(b[1][0]), json_q(b[1][1])}};
  }
  const Vec2q a = s.tri[0].e[0];
  for (const auto& t : s.tri)
    for (const auto& e : t.e) {
      int o = orient_vec(a, e);
      if (o > 0) return {a, e};
      if (o < 0) return {a, -e};
    }
  throw GeometryError("no lattice basis found");
}

CurveClass straight_closed_curve(const FlatSurface& s, int t, const Vec2q& p, const Vec2q& v) {
  TraceResult r = trace_from_point(s, t, p, v);
  if (r.stop != TraceResult::Stop::Done) throw GeometryError("straight curve runs into a vertex");
  if (r.end_t != t || r.end_p != p) throw GeometryError("straight curve does not close up");
  std::vector<Slot> xs;
  for (const auto& h : r.hits) xs.push_back(h.exit);
  if (xs.empty()) throw GeometryError("straight curve crosses no edge");
  return CurveClass::closed_curve(std::move(xs));
}

CurveClass torus_curve(const FlatSurface& s, long p, long q) {
  if (p == 0 && q == 0) throw GeometryError("trivial class");
  auto [a, b] = torus_basis(s);
  const Vec2q v = a * Q(p) + b * Q(q);
  const Triangle& tr = s.tri[0];
  const Vec2q centroid = (tr.corner(1) + tr.corner(2)) * Q(1, 3);
  for (int k = 1; k < 50; ++k) {
    Vec2q pt = centroid + (tr.e[0] * Q(k, 97)) + (tr.e[1] * Q(-k, 211));
    try {
      CurveClass c = straight_closed_curve(s, 0, pt, v);
      c.name = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
      return c;
    } catch (const GeometryError&) {
    }
  }
  throw GeometryError("could not realize torus class");
}

}  // namespace flatspec
