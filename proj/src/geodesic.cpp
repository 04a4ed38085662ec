#include "flatspec/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flatspec/trace.hpp"

namespace flatspec {

namespace {
}

double Chain::length() const {
  double l = 0;
  for (const auto& s : segs) l += s.length;
  return l;
}

static double exact_angle(const Vec2q& u, const Vec2q& v) {
  const int sc = sgn(cross(u, v));
  const Vec2 a = u.approx(), b = v.approx();
  const double c = std::abs(cross(a, b)), d = dot(a, b);
  if (sc == 0) return sgn(dot(u, v)) > 0 ? 0.0 : kPi;
  const double t = std::atan2(c, d);
  return sc > 0 ? t : 2 * kPi - t;
}

double turn(const Vec2q& a, const Vec2q& b, bool ccw) { return ccw ? exact_angle(a, b) : exact_angle(b, a); }

int TurnAngle::cmp_multiple(int j) const {
  const double target = j * kPi;
  if (std::abs(value - target) > 1e-7) return value > target ? 1 : -1;
  const int sc = sgn(cross(d_in, d_out));
  if (sc == 0) return 0;
  bool above = ((j % 2 == 0) == (sc > 0));
  if (!ccw) above = !above;
  return above ? 1 : -1;
}

TurnAngle fan_turn(const Vec2q& d_in, const std::vector<Vec2q>& rays, const Vec2q& d_out, bool ccw) {
  TurnAngle a;
  a.ccw = ccw;
  a.d_in = d_in;
  a.d_out = d_out;
  const Vec2q* prev = &d_in;
  for (const auto& r : rays) {
    a.value += turn(*prev, r, ccw);
    prev = &r;
  }
  a.value += turn(*prev, d_out, ccw);
  return a;
}

std::vector<Slot> corner_walk(const FlatSurface& s, Corner start, int cw_steps, Corner* end) {
  std::vector<Slot> out;
  Corner cur = start;
  for (int i = 0; i < std::abs(cw_steps); ++i) {
    if (cw_steps > 0) {
      out.push_back({cur.t, cur.c});
      cur = s.cw_next(cur);
    } else {
      out.push_back({cur.t, (cur.c + 2) % 3});
      cur = s.ccw_next(cur);
    }
  }
  if (end) *end = cur;
  return out;
}

Vec2q Sleeve::hol_translation() const { return tris[m].c; }
int Sleeve::hol_sign() const { return tris[m].s; }

Sleeve build_sleeve(const FlatSurface& s, const std::vector<Slot>& seq, bool closed, int periods, Corner arc_start,
                    Corner arc_end) {
  if (seq.empty()) throw TrivialClass("trivial class");
  Sleeve sl;
  sl.m = static_cast<int>(seq.size());
  sl.closed = closed;
  sl.periods = closed ? periods : 1;
  for (int p = 0; p < sl.periods; ++p) sl.x.insert(sl.x.end(), seq.begin(), seq.end());
  const int M = sl.size();
  sl.tris.reserve(M + 1);
  sl.tris.push_back({sl.x[0].t, 1, Vec2q()});
  for (int l = 0; l < M; ++l) {
    if (sl.x[l].t != sl.tris[l].t) throw GeometryError("non-adjacent consecutive crossings");
    sl.tris.push_back(next_placement(s, sl.tris[l], sl.x[l]));
  }
  if (closed && sl.tris[sl.m].t != sl.x[0].t) throw GeometryError("closed crossing sequence does not return to its start");
  sl.Lid.resize(M);
  sl.Rid.resize(M);
  auto add = [&](const Vec2q& p, Corner c, int side, int l) {
    Lift lf;
    lf.pos = DevPt(p);
    lf.vertex = s.vertex_of(c);
    lf.side = side;
    lf.first = lf.last = l;
    lf.corner = c;
    sl.lifts.push_back(std::move(lf));
    return static_cast<int>(sl.lifts.size()) - 1;
  };
  for (int l = 0; l < M; ++l) {
    const int e = sl.x[l].e, t = sl.x[l].t;
    const DevTri& T = sl.tris[l];
    const Triangle& tr = s.tri[t];
    bool shareL = false, shareR = false;
    if (l > 0) {
      const int ein = s.twin_of(sl.x[l - 1]).e;
      if (e == (ein + 1) % 3)
        shareR = true;
      else if (e == (ein + 2) % 3)
        shareL = true;
      else
        throw GeometryError("unreduced crossing sequence (backtrack)");
    }
    sl.Rid[l] = shareR ? sl.Rid[l - 1] : add(T.map(tr.corner(e)), {t, e}, -1, l);
    sl.Lid[l] = shareL ? sl.Lid[l - 1] : add(T.map(tr.corner(e + 1)), {t, (e + 1) % 3}, +1, l);
    sl.lifts[sl.Rid[l]].last = l;
    sl.lifts[sl.Lid[l]].last = l;
  }
  if (!closed) {
    if (arc_start.t != sl.x[0].t || arc_start.c != (sl.x[0].e + 2) % 3)
      throw GeometryError("arc start corner is not opposite its first crossing");
    const Slot in = s.twin_of(sl.x[M - 1]);
    if (arc_end.t != in.t || arc_end.c != (in.e + 2) % 3)
      throw GeometryError("arc end corner is not opposite its last crossing");
    sl.start_lift = add(s.tri[arc_start.t].corner(arc_start.c), arc_start, 0, -1);
    sl.end_lift = add(sl.tris[M].map(s.tri[arc_end.t].corner(arc_end.c)), arc_end, 0, -1);
  }
  return sl;
}

namespace {

struct Funnel {
  std::vector<int> path;
  double length = 0;
};

int orient_ids(const Sleeve& sl, int a, int b, int c) {
  if (a == b || a == c || b == c) return 0;
  return orient(sl.lifts[a].pos, sl.lifts[b].pos, sl.lifts[c].pos);
}

// Shortest path in the strip from lift `start` through portals [a, b) to lift `target`.
Funnel run_funnel(const Sleeve& sl, int start, int a, int b, int target) {
  std::vector<std::pair<int, int>> P;
  std::vector<int> pl;  // sleeve portal index, -1 for the virtual end portals
  P.push_back({start, start});
  pl.push_back(a - 1);
  for (int l = a; l < b; ++l) {
    P.push_back({sl.Lid[l], sl.Rid[l]});
    pl.push_back(l);
  }
  P.push_back({target, target});
  pl.push_back(b);
  std::vector<int> path{start};
  std::vector<int> pidx{0};
  int apex = start, left = start, right = start;
  int ai = 0, li = 0, ri = 0;
  const int n = static_cast<int>(P.size());
  for (int i = 1; i < n; ++i) {
    const auto [l, r] = P[i];
    if (orient_ids(sl, apex, right, r) >= 0) {
      if (apex == right || apex == left || orient_ids(sl, apex, left, r) < 0) {
        right = r;
        ri = i;
      } else {
        apex = left;
        ai = li;
        path.push_back(apex);
        pidx.push_back(ai);
        left = right = apex;
        li = ri = ai;
        i = ai;
        continue;
      }
    }
    if (orient_ids(sl, apex, left, l) <= 0) {
      if (apex == left || apex == right || orient_ids(sl, apex, right, l) > 0) {
        left = l;
        li = i;
      } else {
        apex = right;
        ai = ri;
        path.push_back(apex);
        pidx.push_back(ai);
        left = right = apex;
        li = ri = ai;
        i = ai;
        continue;
      }
    }
  }
  if (path.back() != target) {
    path.push_back(target);
    pidx.push_back(n - 1);
  }
  // Insert boundary lifts lying exactly on a segment.
  Funnel f;
  f.path.push_back(path[0]);
  for (size_t q = 0; q + 1 < path.size(); ++q) {
    const int p0 = path[q], p1 = path[q + 1];
    const Vec2q& A = sl.lifts[p0].pos.q;
    const Vec2q AB = sl.lifts[p1].pos.q - A;
    const Q ab2 = norm2(AB);
    std::vector<std::pair<Q, int>> on;
    for (int i = pidx[q] + 1; i < pidx[q + 1]; ++i) {
      for (int id : {P[i].first, P[i].second}) {
        if (id == p0 || id == p1) continue;
        const Vec2q AX = sl.lifts[id].pos.q - A;
        if (sgn(cross(AB, AX)) != 0) continue;
        const Q t = dot(AX, AB);
        if (sgn(t) > 0 && t < ab2) on.push_back({t, id});
      }
    }
    std::sort(on.begin(), on.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    int lastid = -1;
    for (const auto& [t, id] : on)
      if (id != lastid) {
        f.path.push_back(id);
        lastid = id;
      }
    f.path.push_back(p1);
  }
  for (size_t q = 0; q + 1 < f.path.size(); ++q)
    f.length += (sl.lifts[f.path[q + 1]].pos.q - sl.lifts[f.path[q]].pos.q).norm();
  return f;
}

std::vector<Vec2q> fan_rays(const Sleeve& sl, int id) {
  const Lift& lf = sl.lifts[id];
  std::vector<Vec2q> rays;
  for (int l = lf.first; l <= lf.last; ++l) {
    const Vec2q& other = lf.side > 0 ? sl.R(l).q : sl.L(l).q;
    rays.push_back(other - lf.pos.q);
  }
  return rays;
}

int lift_at(const Sleeve& sl, int portal, int side) { return side > 0 ? sl.Lid[portal] : sl.Rid[portal]; }

struct LoopEval {
  std::vector<int> path;  // includes both endpoints
  std::vector<Touch> touches;  // aligned with path[1..], closed: path[1..r]; arcs: path[1..r-1]
  std::vector<int> touch_lift;
  double length = 0;
  int k0 = 0;
};

LoopEval evaluate(const FlatSurface& s, const Sleeve& sl, const Funnel& f) {
  LoopEval ev;
  ev.path = f.path;
  ev.length = f.length;
  const int r = static_cast<int>(f.path.size()) - 1;
  const int m = sl.m;
  auto pos = [&](int id) -> const Vec2q& { return sl.lifts[id].pos.q; };
  const int last = sl.closed ? r : r - 1;
  for (int i = 1; i <= last; ++i) {
    const int id = f.path[i];
    const Lift& lf = sl.lifts[id];
    Vec2q out;
    if (i < r) {
      out = pos(f.path[i + 1]) - pos(id);
    } else {
      const Lift& a1 = sl.lifts[f.path[1]];
      out = pos(lift_at(sl, a1.first + m, a1.side)) - pos(id);
    }
    const Vec2q in = pos(f.path[i - 1]) - pos(id);
    Touch t;
    t.vertex = lf.vertex;
    t.k = s.vertices()[lf.vertex].k;
    t.marked = s.is_marked(lf.vertex);
    t.side = lf.side;
    t.free = fan_turn(in, fan_rays(sl, id), out, lf.side > 0);
    t.peg = t.k * kPi - t.free.value;
    ev.touches.push_back(t);
    ev.touch_lift.push_back(id);
  }
  return ev;
}

LoopEval shortest_loop(const FlatSurface& s, const Sleeve& sl) {
  const int m = sl.m;
  LoopEval best;
  bool have = false;
  if (!sl.closed) {
    Funnel f = run_funnel(sl, sl.start_lift, 0, sl.size(), sl.end_lift);
    return evaluate(s, sl, f);
  }
  for (int k = m; k < 2 * m; ++k) {
    for (int side : {+1, -1}) {
      const int id = lift_at(sl, k, side);
      if (sl.lifts[id].first != k) continue;
      if (sl.lifts[id].last - sl.lifts[id].first + 1 > m) throw TrivialClass("trivial class (peripheral loop around a vertex)");
      const int target = lift_at(sl, k + m, side);
      Funnel f = run_funnel(sl, id, k + 1, k + m, target);
      if (!have || f.length < best.length - 1e-15 * std::max(1.0, f.length)) {
        best = evaluate(s, sl, f);
        best.k0 = k;
        have = true;
      }
    }
  }
  if (!have) throw GeometryError("no boundary vertex found in the strip");
  return best;
}

// Crossings obtained by passing to the other side of lift `id`.
std::vector<Slot> reroute(const FlatSurface& s, const Sleeve& sl, int id, Corner* walk_start) {
  const Lift& lf = sl.lifts[id];
  const int nf = lf.last - lf.first + 1;
  const int K = static_cast<int>(s.vertices()[lf.vertex].corners.size());
  const int cw = lf.side > 0 ? K - nf : nf - K;
  Corner end;
  std::vector<Slot> walk = corner_walk(s, lf.corner, cw, &end);
  if (walk_start) *walk_start = lf.corner;
  const Slot next = sl.x[lf.last + 1 < sl.size() ? lf.last + 1 : 0];
  if (sl.closed || lf.last + 1 < sl.size())
    if (end.t != next.t) throw GeometryError("corner walk did not close the fan");
  std::vector<Slot> out;
  if (sl.closed) {
    const int m = sl.m;
    if (nf > m) throw TrivialClass("trivial class");
    const int j1 = lf.first % m;
    out = walk;
    for (int q = nf; q < m; ++q) out.push_back(sl.x[(j1 + q) % m]);
  } else {
    out.assign(sl.x.begin(), sl.x.begin() + lf.first);
    out.insert(out.end(), walk.begin(), walk.end());
    out.insert(out.end(), sl.x.begin() + lf.last + 1, sl.x.end());
  }
  return out;
}

// Drops crossings of edges at the arc's endpoints (spinning about a puncture).
bool normalize_arc(const FlatSurface& s, std::vector<Slot>& xs, Corner& st, Corner& en) {
  size_t lo = 0;
  while (lo < xs.size()) {
    const Slot x = xs[lo];
    if (x.t != st.t) throw GeometryError("arc start corner is not in the first triangle");
    const Slot o = s.twin_of(x);
    if (x.e == st.c)
      st = {o.t, (o.e + 1) % 3};
    else if ((x.e + 1) % 3 == st.c)
      st = {o.t, o.e};
    else
      break;
    ++lo;
  }
  xs.erase(xs.begin(), xs.begin() + static_cast<long>(lo));
  while (!xs.empty()) {
    const Slot x = xs.back();
    const Slot o = s.twin_of(x);
    if (o.t != en.t) throw GeometryError("arc end corner is not in the last triangle");
    if (o.e == en.c)
      en = {x.t, (x.e + 1) % 3};
    else if ((o.e + 1) % 3 == en.c)
      en = {x.t, x.e};
    else
      break;
    xs.pop_back();
  }
  return !xs.empty();
}

struct SweepInterval {
  Q lo, hi;
  std::vector<Slot> seq;
  Vec2q base;
  Q base_level;
  int side = 1;
};

struct SweepResult {
  Q range;
  bool capped = false;
  std::vector<Vec2q> boundary;
  std::vector<Corner> bcorner;  // corner of each boundary point, vectors in the frame of bsign
  std::vector<int> bsign, bvertex;
  Vec2q c;
  std::vector<SweepInterval> intervals;
};

SweepResult sweep(const FlatSurface& s, std::vector<Slot> seq, Vec2q base, int side, const Q& cap) {
  SweepResult res;
  Q lev0 = 0;
  for (int iter = 0; iter < 100000; ++iter) {
    Sleeve sl = build_sleeve(s, seq, true, 2);
    const Vec2q c = sl.hol_translation();
    auto G = [&](const Vec2q& p) -> Q { return Q(side) * cross(c, p - base) + lev0; };
    bool have = false, have_lo = false;
    Q M, lo;
    for (const auto& lf : sl.lifts) {
      if (lf.first >= sl.m) continue;
      const Q g = G(lf.pos.q);
      if (lf.side == side) {
        if (!have || g < M) M = g;
        have = true;
      } else if (lf.side == -side) {
        if (!have_lo || g > lo) lo = g;
        have_lo = true;
      }
    }
    if (!have_lo) lo = lev0;
    SweepInterval in{lo, M, seq, base, lev0, side};
    res.c = c;
    if (M >= cap) {
      in.hi = cap;
      res.intervals.push_back(in);
      res.range = cap;
      res.capped = true;
      return res;
    }
    res.intervals.push_back(in);
    int pick = -1;
    bool singular = false;
    std::vector<Vec2q> at;
    for (int id = 0; id < static_cast<int>(sl.lifts.size()); ++id) {
      const Lift& lf = sl.lifts[id];
      if (lf.first >= sl.m || lf.side != side || G(lf.pos.q) != M) continue;
      const auto& vc = s.vertices()[lf.vertex];
      if (vc.k != 2 || vc.marked) singular = true;
      if (pick < 0) pick = id;
      at.push_back(lf.pos.q);
      res.bcorner.push_back(lf.corner);
      res.bsign.push_back(sl.tris[lf.first].s);
      res.bvertex.push_back(lf.vertex);
    }
    if (singular) {
      res.range = M;
      res.boundary = at;
      return res;
    }
    Corner c0;
    std::vector<Slot> next = reroute(s, sl, pick, &c0);
    const std::vector<int> keep = reduced_indices(s, next, true);
    if (keep.empty()) throw TrivialClass("trivial class");
    Corridor cor = develop_corridor(s, next, true);
    const DevTri& F = cor.tris[keep.front()];
    base = signed_vec(F.s, s.tri[c0.t].corner(c0.c) - F.c);
    seq.clear();
    for (int i : keep) seq.push_back(next[i]);
    lev0 = M;
  }
  throw GeometryError("cylinder sweep did not terminate");
}

Chain chain_from_points(const FlatSurface& s, std::vector<Vec2q> pts, const Vec2q& c, const std::vector<int>& vids,
                        const std::vector<Corner>& corners = {}, const std::vector<int>& signs = {}) {
  Chain ch;
  std::vector<size_t> order(pts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return dot(c, pts[a]) < dot(c, pts[b]); });
  // keep one period
  std::vector<size_t> keep;
  const Q c2 = norm2(c);
  for (size_t i : order)
    if (keep.empty() || dot(c, pts[i] - pts[keep.front()]) < c2) {
      if (!keep.empty() && pts[i] == pts[keep.back()]) continue;
      keep.push_back(i);
    }
  for (size_t q = 0; q < keep.size(); ++q) {
    const Vec2q a = pts[keep[q]];
    const Vec2q b = q + 1 < keep.size() ? pts[keep[q + 1]] : pts[keep.front()] + c;
    SaddleSeg sg;
    sg.v0 = vids.empty() ? -1 : vids[keep[q]];
    sg.v1 = vids.empty() ? -1 : vids[q + 1 < keep.size() ? keep[q + 1] : keep.front()];
    sg.dev = b - a;
    sg.vec = sg.dev;
    if (!corners.empty()) {
      sg.vec = signed_vec(signs[keep[q]], sg.dev);
      sg.start = sector_of(s, corners[keep[q]], sg.vec).first;
      sg.vec = sector_of(s, corners[keep[q]], sg.vec).second;
    }
    sg.length = sg.dev.norm();
    ch.segs.push_back(sg);
  }
  return ch;
}

Corner exit_corner(const FlatSurface& s, const Sleeve& sl, int id) {
  const Lift& lf = sl.lifts[id];
  if (lf.side == 0) return lf.corner;
  const Slot o = s.twin_of(sl.x[lf.last]);
  return lf.side > 0 ? Corner{o.t, o.e} : Corner{o.t, (o.e + 1) % 3};
}

int exit_tri_index(const Sleeve& sl, int id) {
  const Lift& lf = sl.lifts[id];
  return lf.side == 0 ? (lf.first < 0 && id == sl.start_lift ? 0 : sl.size()) : lf.last + 1;
}

}  // namespace

GeodesicRep tighten(const FlatSurface& s, const CurveClass& c0, const TightenOptions& opt) {
  if (!s.indexed()) throw GeometryError("surface gluing is incomplete");
  check_adjacency(s, c0);
  CurveClass c = reduce(s, c0);
  GeodesicRep g;
  Corner st{}, en{};
  if (!c.closed()) {
    st = arc_start_corner(s, c0);
    en = arc_end_corner(s, c0);
    if (!normalize_arc(s, c.crossings, st, en)) {
      if (st == en) throw TrivialClass("trivial class");
      throw GeometryError("arcs inside a single triangle are not supported");
    }
  }
  if (c.crossings.empty()) throw TrivialClass("trivial class");
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    auto sl = std::make_shared<Sleeve>(build_sleeve(s, c.crossings, c.closed(), 4, st, en));
    LoopEval ev = shortest_loop(s, *sl);
    // worst offending unmarked vertex
    int worst = -1;
    double excess = 0;
    for (size_t i = 0; i < ev.touches.size(); ++i) {
      const Touch& t = ev.touches[i];
      if (t.marked) continue;
      if (t.free.cmp_multiple(t.k - 1) > 0) {
        const double e = t.free.value - (t.k - 1) * kPi;
        if (worst < 0 || e > excess) {
          worst = static_cast<int>(i);
          excess = e;
        }
      }
    }
    if (worst >= 0) {
      Corner ws;
      std::vector<Slot> next = reroute(s, *sl, ev.touch_lift[worst], &ws);
      c.crossings = std::move(next);
      c = reduce(s, c);
      if (!c.closed()) {
        if (!normalize_arc(s, c.crossings, st, en)) throw TrivialClass("trivial class");
      }
      if (c.crossings.empty()) throw TrivialClass("trivial class");
      ++g.reroutes;
      continue;
    }
    if (ev.length <= opt.tol) throw TrivialClass("trivial class (zero length)");
    g.length = ev.length;
    g.touches = ev.touches;
    g.path = ev.path;
    g.k0 = ev.k0;
    g.sleeve = sl;
    g.curve = c;
    if (!c.closed()) {
      g.curve.start = st;
      g.curve.finish = en;
      g.curve.ends = {s.vertex_of(st), s.vertex_of(en)};
    }
    // chain
    for (size_t q = 0; q + 1 < ev.path.size(); ++q) {
      const int a = ev.path[q], b = ev.path[q + 1];
      SaddleSeg sg;
      sg.v0 = sl->lifts[a].vertex;
      sg.v1 = sl->lifts[b].vertex;
      sg.dev = sl->lifts[b].pos.q - sl->lifts[a].pos.q;
      sg.start = exit_corner(s, *sl, a);
      sg.vec = sl->tris[exit_tri_index(*sl, a)].unmap_vec(sg.dev);
      sg.length = sg.dev.norm();
      g.chain.segs.push_back(sg);
    }
    g.error_bound = 4e-16 * (1 + g.chain.segs.size()) * std::max(1.0, g.length);
    // cylinder recognition
    if (c.closed() && sl->hol_sign() == 1) {
      bool straight = true;
      bool pinL = false, pinR = false;
      for (const auto& t : ev.touches) {
        if (t.free.cmp_multiple(1) != 0) straight = false;
        if (t.k != 2 || t.marked) (t.side > 0 ? pinL : pinR) = true;
      }
      if (straight && !(pinL && pinR)) {
        const Q area = surface_area(s);
        const int v = ev.path[0];
        SweepResult sr[2];
        sr[0] = sweep(s, c.crossings, sl->lifts[v].pos.q, +1, area);
        sr[1] = sweep(s, c.crossings, sl->lifts[v].pos.q, -1, area);
        CylinderData& cy = g.cyl;
        g.cylinder = true;
        cy.core = sl->hol_translation();
        cy.circumference = cy.core.norm();
        cy.height_area = sr[0].range + sr[1].range;
        if (cy.height_area >= area) {
          cy.height_area = area;
          cy.fills_surface = true;
        }
        cy.height = cy.height_area.get_d() / cy.circumference;
        for (int side = 0; side < 2; ++side)
          cy.boundary[side] = chain_from_points(s, sr[side].boundary, sr[side].c, sr[side].bvertex, sr[side].bcorner,
                                                sr[side].bsign);
        // widest interval gives an interior leaf
        const SweepInterval* bestI = nullptr;
        Q bw = -1;
        for (int side = 0; side < 2; ++side)
          for (const auto& in : sr[side].intervals) {
            Q hi = std::min(in.hi, sr[side].range);
            if (hi - in.lo > bw) {
              bw = hi - in.lo;
              bestI = &in;
            }
          }
        if (!bestI || sgn(bw) <= 0) throw GeometryError("cylinder without interior");
        const Q hi = std::min(bestI->hi, bestI->side > 0 ? sr[0].range : sr[1].range);
        const Q lam = (bestI->lo + hi) / 2;
        Sleeve ls = build_sleeve(s, bestI->seq, true, 1);
        const Vec2q cc = ls.hol_translation();
        auto G = [&](const Vec2q& p) -> Q { return Q(bestI->side) * cross(cc, p - bestI->base) + bestI->base_level; };
        cy.leaf = bestI->seq;
        for (int q = 0; q < ls.m; ++q) {
          const Q gr = G(ls.R(q).q), gl = G(ls.L(q).q);
          cy.leaf_param.push_back((lam - gr) / (gl - gr));
        }
      }
    }
    return g;
  }
  throw GeometryError("tightening did not converge");
}

double flat_length(const FlatSurface& s, const CurveClass& c, const TightenOptions& opt) {
  return tighten(s, c, opt).length;
}

bool verify_angle_certificate(const FlatSurface& s, const GeodesicRep& g, std::string* why) {
  const auto& segs = g.chain.segs;
  const size_t n = segs.size();
  if (n == 0) return false;
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  std::vector<TraceResult> tr(n);
  for (size_t i = 0; i < n; ++i) {
    tr[i] = trace_from_corner(s, segs[i].start, segs[i].vec);
    if (tr[i].stop != TraceResult::Stop::Vertex || tr[i].fraction_used != 1)
      return fail("segment " + std::to_string(i) + " is not a saddle connection");
    if (s.vertex_of(tr[i].end_corner) != segs[i].v1) return fail("segment " + std::to_string(i) + " ends at the wrong vertex");
  }
  const bool closed = g.curve.closed();
  for (size_t i = closed ? 0 : 1; i < n; ++i) {
    const size_t p = (i + n - 1) % n;
    const int v = segs[i].v0;
    const auto& vc = s.vertices()[v];
    if (vc.marked) continue;
    // reversed incoming direction at its arrival corner
    const Corner ac = tr[p].end_corner;
    const Vec2q rin = -tr[p].end_dir;
    auto [c1, w1] = sector_of(s, ac, rin);
    auto [c2, w2] = sector_of(s, segs[i].start, segs[i].vec);
    // walk ccw from the outgoing corner to the incoming one, transporting directions
    Corner cur = c2;
    Vec2q out = w2;
    double theta = 0;
    int sg = 1;
    const size_t K = vc.corners.size();
    bool found = false;
    Vec2q rin_frame;
    for (size_t step = 0; step <= K; ++step) {
      const Triangle& t = s.tri[cur.t];
      const Vec2q ccwb = -t.e[(cur.c + 2) % 3];
      const Vec2q start = step == 0 ? out : t.e[cur.c];
      if (cur == c1 && (step > 0 || sgn(cross(out, w1)) > 0 || (sgn(cross(out, w1)) == 0 && sgn(dot(out, w1)) > 0))) {
        theta += turn(start, w1, true);
        rin_frame = signed_vec(sg, w1);
        found = true;
        break;
      }
      theta += turn(start, ccwb, true);
      sg *= s.sign_of({cur.t, (cur.c + 2) % 3});
      cur = s.ccw_next(cur);
    }
    if (!found) return fail("angle walk failed");
    const TurnAngle a{theta, true, w2, rin_frame};
    if (a.cmp_multiple(1) < 0 || a.cmp_multiple(vc.k - 1) > 0)
      return fail("angle below pi at vertex " + std::to_string(v));
  }
  return true;
}

}  // namespace flatspec
