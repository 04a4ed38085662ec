#include "flatspec/intersect.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "flatspec/trace.hpp"

namespace flatspec {

namespace {

int orient3(const Vec2q& a, const Vec2q& b, const Vec2q& c) { return sgn(cross(b - a, c - a)); }

Vec2q edge_point(const Triangle& T, int e, const Q& p) { return T.corner(e) + T.e[e] * p; }

struct Chord {
  int t = 0;
  Vec2q p, q;
  int pe = -1, qe = -1;  // edge holding the endpoint, -1 at a corner
  Q pp, qp;              // endpoint parameters on those edges
  int pc = -1, qc = -1;  // corner at or hugged by the endpoint
  int pv = -1, qv = -1;  // path vertex of pc / qc
  int along = -1;        // edge the chord runs along
  int seg = -1;          // segment of the owning curve, -2 for pieces hugging a vertex
};

// Position of every corner in the ccw order around its vertex.
struct LinkIndex {
  std::vector<std::array<int, 3>> idx;
  explicit LinkIndex(const FlatSurface& s) : idx(s.tri.size()) {
    for (const auto& vc : s.vertices())
      for (size_t i = 0; i < vc.corners.size(); ++i) idx[vc.corners[i].t][vc.corners[i].c] = static_cast<int>(i);
  }
};

struct LinkDir {
  int v = -1, idx = -1;
  Vec2q d;
};

LinkDir link_dir(const FlatSurface& s, const LinkIndex& li, Corner c, const Vec2q& w) {
  auto [cc, ww] = sector_of(s, c, w);
  return {s.vertex_of(cc), li.idx[cc.t][cc.c], ww};
}

bool same_dir(const LinkDir& a, const LinkDir& b) {
  return a.v == b.v && a.idx == b.idx && sgn(cross(a.d, b.d)) == 0 && sgn(dot(a.d, b.d)) > 0;
}

bool before(const LinkDir& a, const LinkDir& b) {
  if (a.idx != b.idx) return a.idx < b.idx;
  return sgn(cross(a.d, b.d)) > 0;
}

// x strictly inside the ccw arc from a to b.
bool between(const LinkDir& a, const LinkDir& x, const LinkDir& b) {
  if (before(a, b)) return before(a, x) && before(x, b);
  return before(a, x) || before(x, b);
}

struct Geo {
  std::vector<Chord> chords;
  bool chain = false;
  int r = 0;
  std::vector<int> v;             // vertex at the start of segment q
  std::vector<LinkDir> out, back;  // leaving direction of segment q, back direction at its end
  std::vector<Q> len2;
};

void trace_segment(const FlatSurface& s, const LinkIndex& li, const SaddleSeg& sg, int q, int r, Geo& g) {
  auto [c, w] = sector_of(s, sg.start, sg.vec);
  g.v.push_back(s.vertex_of(c));
  g.out.push_back({s.vertex_of(c), li.idx[c.t][c.c], w});
  g.len2.push_back(norm2(w));
  const Triangle& T = s.tri[c.t];
  if (orient_vec(T.e[c.c], w) == 0) {
    if (T.e[c.c] != w) throw GeometryError("segment is not a saddle connection");
    Chord ch;
    ch.t = c.t;
    ch.p = T.corner(c.c);
    ch.q = T.corner((c.c + 1) % 3);
    ch.pc = c.c;
    ch.qc = (c.c + 1) % 3;
    ch.pv = q;
    ch.qv = (q + 1) % r;
    ch.along = c.c;
    ch.seg = q;
    g.chords.push_back(ch);
    g.back.push_back(link_dir(s, li, {c.t, (c.c + 1) % 3}, -w));
    return;
  }
  TraceResult tr = trace_from_point(s, c.t, T.corner(c.c), w);
  if (tr.stop != TraceResult::Stop::Vertex || tr.fraction_used != 1)
    throw GeometryError("segment is not a saddle connection");
  Chord cur;
  cur.t = c.t;
  cur.p = T.corner(c.c);
  cur.pc = c.c;
  cur.pv = q;
  cur.seg = q;
  for (const auto& h : tr.hits) {
    const Triangle& H = s.tri[cur.t];
    cur.q = edge_point(H, h.exit.e, h.param);
    cur.qe = h.exit.e;
    cur.qp = h.param;
    g.chords.push_back(cur);
    const Slot tw = s.twin_of(h.exit);
    Chord nx;
    nx.t = tw.t;
    nx.pe = tw.e;
    nx.pp = 1 - h.param;
    nx.p = edge_point(s.tri[tw.t], tw.e, nx.pp);
    nx.seg = q;
    cur = nx;
  }
  cur.q = tr.end_p;
  cur.qc = tr.end_corner.c;
  cur.qv = (q + 1) % r;
  g.chords.push_back(cur);
  g.back.push_back(link_dir(s, li, tr.end_corner, -tr.end_dir));
}

Geo chain_geo(const FlatSurface& s, const LinkIndex& li, const GeodesicRep& g) {
  Geo out;
  out.chain = true;
  out.r = static_cast<int>(g.chain.segs.size());
  for (int q = 0; q < out.r; ++q) trace_segment(s, li, g.chain.segs[q], q, out.r, out);
  return out;
}

struct TaggedCurve {
  NormalCurve nc;
  std::vector<int> lift;    // path vertex hugged by point l, or -1
  std::vector<int> corner;  // its corner in x[l].t
  std::vector<int> seg;     // segment holding an interior point, or -1
};

std::vector<Chord> curve_chords(const FlatSurface& s, const TaggedCurve& tc) {
  const int m = tc.nc.size();
  const bool tags = !tc.lift.empty();
  std::vector<Chord> out;
  out.reserve(m);
  for (int l = 0; l < m; ++l) {
    const int lp = (l + m - 1) % m;
    const Slot y = tc.nc.x[lp], x = tc.nc.x[l];
    const Slot tw = s.twin_of(y);
    if (tw.t != x.t) throw GeometryError("normal curve crossings are not adjacent");
    const Triangle& T = s.tri[x.t];
    Chord ch;
    ch.t = x.t;
    ch.pe = tw.e;
    ch.pp = 1 - tc.nc.p[lp];
    ch.p = edge_point(T, tw.e, ch.pp);
    ch.qe = x.e;
    ch.qp = tc.nc.p[l];
    ch.q = edge_point(T, x.e, ch.qp);
    if (tags) {
      if (tc.lift[lp] >= 0) {
        ch.pv = tc.lift[lp];
        ch.pc = tc.corner[lp] == y.e ? (tw.e + 1) % 3 : tw.e;
      }
      if (tc.lift[l] >= 0) {
        ch.qv = tc.lift[l];
        ch.qc = tc.corner[l];
      }
      if (tc.seg[lp] >= 0)
        ch.seg = tc.seg[lp];
      else if (tc.seg[l] >= 0)
        ch.seg = tc.seg[l];
      else if (ch.pv >= 0 && ch.qv >= 0 && ch.pv != ch.qv)
        ch.seg = ch.pv;
      else
        ch.seg = -2;
    }
    out.push_back(ch);
  }
  return out;
}

TaggedCurve untagged(NormalCurve nc) {
  TaggedCurve tc;
  tc.nc = std::move(nc);
  return tc;
}

TaggedCurve pushed_tagged(const FlatSurface& s, const GeodesicRep& g, const Q& delta, const std::vector<Q>* scale) {
  if (!g.sleeve || !g.curve.closed()) throw GeometryError("pushing needs a closed geodesic");
  const Sleeve& sl = *g.sleeve;
  const int m = sl.m, k0 = g.k0;
  const int r = static_cast<int>(g.path.size()) - 1;
  auto dq = [&](int q) -> Q { return scale ? Q(delta * (*scale)[q % r]) : delta; };
  auto lift = [&](int q) -> const Lift& { return sl.lifts[g.path[q]]; };
  TaggedCurve tc;
  for (int l = k0; l < k0 + m; ++l) {
    const Slot x = sl.x[l];
    std::vector<int> qs;
    for (int q = 0; q < r; ++q)
      if (lift(q).first <= l && l <= lift(q).last) qs.push_back(q);
    Q p;
    int lq = -1, corner = -1, seg = -1;
    if (qs.size() == 1) {
      lq = qs[0];
      const int side = lift(lq).side;
      p = side > 0 ? Q(1 - dq(lq)) : dq(lq);
      corner = side > 0 ? (x.e + 1) % 3 : x.e;
    } else if (qs.size() >= 2) {
      seg = qs[1] == qs[0] + 1 ? qs[0] : qs[1];
      p = Q(1, 2) + dq(seg) / 3;
    } else {
      int q = 0;
      while (q < r && !(lift(q).last < l && l < lift(q + 1).first)) ++q;
      if (q == r) throw GeometryError("portal outside the geodesic period");
      seg = q;
      const Vec2q a = lift(q).pos.q, b = lift(q + 1).pos.q;
      const Vec2q R = sl.R(l).q, L = sl.L(l).q;
      const Vec2q dv = b - a;
      p = cross(dv, a - R) / cross(dv, L - R);
      const Vec2q X = R + (L - R) * p;
      const Q f = dot(X - a, dv) / norm2(dv);
      p += -Q(lift(q).side) * dq(q) * (1 - f) - Q(lift(q + 1).side) * dq(q + 1) * f;
    }
    if (sgn(p) <= 0 || p >= 1) throw GeometryError("push distance too large for the surface");
    tc.nc.x.push_back(x);
    tc.nc.p.push_back(p);
    tc.lift.push_back(lq);
    tc.corner.push_back(corner);
    tc.seg.push_back(seg);
  }
  return tc;
}

struct Crossing {
  int a = 0, b = 0;  // chord indices
  Vec2q X;
};

// Transverse meetings of chords from two families; meetings at corners never count.
template <class Skip>
std::vector<Crossing> chord_crossings(const FlatSurface& s, const std::vector<Chord>& A, const std::vector<Chord>& B,
                                      Skip&& skip) {
  std::vector<std::vector<int>> byT(s.tri.size());
  for (size_t j = 0; j < B.size(); ++j) byT[B[j].t].push_back(static_cast<int>(j));
  std::vector<Crossing> out;
  auto endpoint_on = [](const Chord& c, int e, std::vector<std::pair<Vec2q, Q>>& pts) {
    if (c.pe == e) pts.push_back({c.p, c.pp});
    if (c.qe == e) pts.push_back({c.q, c.qp});
  };
  for (size_t i = 0; i < A.size(); ++i) {
    const Chord& U = A[i];
    for (int j : byT[U.t]) {
      const Chord& W = B[j];
      if (skip(U, W)) continue;
      if (U.along >= 0 && W.along >= 0) continue;
      if (U.along >= 0 || W.along >= 0) {
        const Chord& E = U.along >= 0 ? U : W;
        const Chord& O = U.along >= 0 ? W : U;
        std::vector<std::pair<Vec2q, Q>> pts;
        endpoint_on(O, E.along, pts);
        for (auto& [X, prm] : pts)
          if (sgn(prm) > 0 && prm < 1) out.push_back({static_cast<int>(i), j, X});
        continue;
      }
      const int o1 = orient3(U.p, U.q, W.p), o2 = orient3(U.p, U.q, W.q);
      const int o3 = orient3(W.p, W.q, U.p), o4 = orient3(W.p, W.q, U.q);
      if (o1 * o2 < 0 && o3 * o4 < 0) {
        const Vec2q du = U.q - U.p, dw = W.q - W.p;
        const Q tt = cross(W.p - U.p, dw) / cross(du, dw);
        out.push_back({static_cast<int>(i), j, U.p + du * tt});
        continue;
      }
      // shared endpoint in the interior of an edge, owned by the canonical slot
      const std::pair<int, const Q*> ue[2] = {{U.pe, &U.pp}, {U.qe, &U.qp}};
      const std::pair<int, const Q*> we[2] = {{W.pe, &W.pp}, {W.qe, &W.qp}};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          if (ue[a].first < 0 || ue[a].first != we[b].first || *ue[a].second != *we[b].second) continue;
          const Slot sl{U.t, ue[a].first};
          if (s.canonical(sl) != sl) continue;
          const Vec2q& X = a == 0 ? U.p : U.q;
          const Vec2q& Wo = b == 0 ? W.q : W.p;
          if (orient3(U.p, U.q, Wo) == 0) continue;
          out.push_back({static_cast<int>(i), j, X});
        }
    }
  }
  return out;
}

// Shared saddle connections between two chains: +1 same direction, -1 reversed, 0 distinct.
int shared(const Geo& A, int i, const Geo& B, int j) {
  if (!A.chain || !B.chain || i < 0 || j < 0) return 0;
  if (A.len2[i] != B.len2[j]) return 0;
  if (same_dir(A.out[i], B.out[j])) return 1;
  if (same_dir(A.out[i], B.back[j])) return -1;
  return 0;
}

int mod(int a, int n) { return ((a % n) + n) % n; }

struct RunInfo {
  std::set<std::pair<int, int>> covered;         // vertex pairs inside shared runs
  std::map<std::tuple<int, int, int>, int> id;  // (kind 0 seg / 1 vertex, i, j) -> run id
  int count = 0;                                 // runs whose ends link
};

RunInfo shared_runs(const Geo& A, const Geo& B) {
  RunInfo ri;
  if (!A.chain || !B.chain) return ri;
  const int ra = A.r, rb = B.r;
  std::set<std::tuple<int, int, int>> seen;
  int next_id = 0;
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < rb; ++j) {
      const int o = shared(A, i, B, j);
      if (o == 0 || seen.count({i, j, o})) continue;
      int si = i, sj = j;
      bool cycle = false;
      for (int guard = 0; guard < ra * rb + 1; ++guard) {
        const int pi = mod(si - 1, ra), pj = mod(sj - o, rb);
        if (shared(A, pi, B, pj) != o) break;
        si = pi;
        sj = pj;
        if (si == i && sj == j) {
          cycle = true;
          break;
        }
      }
      const int rid = next_id++;
      int ei = si, ej = sj;
      for (int guard = 0; guard < ra * rb + 1; ++guard) {
        seen.insert({ei, ej, o});
        ri.id[{0, ei, ej}] = rid;
        const int va0 = ei, va1 = mod(ei + 1, ra);
        const int vb0 = o > 0 ? ej : mod(ej + 1, rb), vb1 = o > 0 ? mod(ej + 1, rb) : ej;
        ri.covered.insert({va0, vb0});
        ri.covered.insert({va1, vb1});
        ri.id[{1, va0, vb0}] = rid;
        ri.id[{1, va1, vb1}] = rid;
        const int ni = mod(ei + 1, ra), nj = mod(ej + o, rb);
        if (shared(A, ni, B, nj) != o || (ni == si && nj == sj)) break;
        ei = ni;
        ej = nj;
      }
      if (cycle) continue;
      // linking of the two ends
      const LinkDir& d_start = A.out[si];
      const LinkDir& a_in = A.back[mod(si - 1, ra)];
      const LinkDir& b_in = o > 0 ? B.back[mod(sj - 1, rb)] : B.out[mod(sj + 1, rb)];
      const LinkDir& d_end = A.back[ei];
      const LinkDir& a_out = A.out[mod(ei + 1, ra)];
      const LinkDir& b_out = o > 0 ? B.out[mod(ej + 1, rb)] : B.back[mod(ej - 1, rb)];
      const bool sB = between(d_start, b_in, a_in);
      const bool sF = between(d_end, b_out, a_out);
      if (sB == sF) ++ri.count;
    }
  return ri;
}

Geo geo_of(const FlatSurface& s, const LinkIndex& li, const GeodesicRep& g) {
  if (!g.curve.closed()) throw GeometryError("intersection numbers are computed for closed curves");
  if (g.cylinder) {
    Geo out;
    out.chords = curve_chords(s, untagged(leaf_curve(g)));
    return out;
  }
  return chain_geo(s, li, g);
}

std::vector<Chord> chords_of(const FlatSurface& s, const NormalCurve& c) { return curve_chords(s, untagged(c)); }

}  // namespace

NormalCurve realize(const FlatSurface& s, const std::vector<Slot>& xs, unsigned seed) {
  (void)s;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(1, 9973);
  NormalCurve nc;
  nc.x = xs;
  for (size_t l = 0; l < xs.size(); ++l) nc.p.push_back(Q(1, 5) + Q(3 * d(rng), 5 * 9974));
  return nc;
}

NormalCurve leaf_curve(const GeodesicRep& g) {
  if (!g.cylinder) throw GeometryError("not a cylinder curve");
  return {g.cyl.leaf, g.cyl.leaf_param};
}

NormalCurve pushed_curve(const FlatSurface& s, const GeodesicRep& g, const Q& delta, const std::vector<Q>* scale) {
  return pushed_tagged(s, g, delta, scale).nc;
}

int self_crossings(const FlatSurface& s, const NormalCurve& c) {
  std::set<std::pair<Slot, Q>> pts;
  int n = 0;
  for (int l = 0; l < c.size(); ++l) {
    const Slot cs = s.canonical(c.x[l]);
    const Q p = cs == c.x[l] ? c.p[l] : Q(1 - c.p[l]);
    if (!pts.insert({cs, p}).second) ++n;
  }
  const auto ch = chords_of(s, c);
  for (size_t i = 0; i < ch.size(); ++i)
    for (size_t j = i + 1; j < ch.size(); ++j) {
      if (ch[i].t != ch[j].t) continue;
      const Chord &U = ch[i], &W = ch[j];
      if (orient3(U.p, U.q, W.p) * orient3(U.p, U.q, W.q) < 0 && orient3(W.p, W.q, U.p) * orient3(W.p, W.q, U.q) < 0)
        ++n;
    }
  return n;
}

int intersection_number(const FlatSurface& s, const GeodesicRep& ga, const GeodesicRep& gb) {
  LinkIndex li(s);
  const Geo A = geo_of(s, li, ga), B = geo_of(s, li, gb);
  auto skip = [&](const Chord& u, const Chord& w) { return shared(A, u.seg, B, w.seg) != 0; };
  int total = static_cast<int>(chord_crossings(s, A.chords, B.chords, skip).size());
  if (!A.chain || !B.chain) return total;
  RunInfo ri = shared_runs(A, B);
  total += ri.count;
  for (int i = 0; i < A.r; ++i)
    for (int j = 0; j < B.r; ++j) {
      if (A.v[i] != B.v[j] || ri.covered.count({i, j})) continue;
      const LinkDir& ab = A.back[mod(i - 1, A.r)];
      const LinkDir& af = A.out[i];
      const LinkDir& bb = B.back[mod(j - 1, B.r)];
      const LinkDir& bf = B.out[j];
      if (same_dir(ab, bb) || same_dir(ab, bf) || same_dir(af, bb) || same_dir(af, bf))
        throw GeometryError("overlapping passes outside a shared run");
      if (between(af, bb, ab) != between(af, bf, ab)) ++total;
    }
  return total;
}

int intersection_number(const FlatSurface& s, const CurveClass& a, const CurveClass& b) {
  return intersection_number(s, tighten(s, a), tighten(s, b));
}

namespace {

int oracle_at(const FlatSurface& s, const LinkIndex& li, const GeodesicRep& ga, const GeodesicRep& gb, const Q& delta) {
  const Geo B = geo_of(s, li, gb);
  Geo A;
  std::vector<Chord> AP;
  if (ga.cylinder) {
    AP = chords_of(s, leaf_curve(ga));
  } else {
    A = chain_geo(s, li, ga);
    std::vector<Q> scale;
    for (int q = 0; q < A.r; ++q) scale.push_back(Q(1) + Q(q + 1, 7 * (A.r + 1)));
    AP = curve_chords(s, pushed_tagged(s, ga, delta, &scale));
  }
  Q maxe2 = 0;
  for (const auto& T : s.tri)
    for (int e = 0; e < 3; ++e) maxe2 = std::max(maxe2, norm2(T.e[e]));
  const Q R2 = 16 * delta * maxe2;
  const RunInfo ri = shared_runs(A, B);
  const auto xs = chord_crossings(s, AP, B.chords, [](const Chord&, const Chord&) { return false; });
  // component of each crossing: (kind, i, j); kind 0 segment pair, 1 vertex pair, 2 isolated
  struct Feat {
    bool vertex;
    int i;
  };
  auto feature = [&](const Chord& c, const Vec2q& X) -> Feat {
    const Triangle& T = s.tri[c.t];
    if (c.pv >= 0 && norm2(X - T.corner(c.pc)) < R2) return {true, c.pv};
    if (c.qv >= 0 && norm2(X - T.corner(c.qc)) < R2) return {true, c.qv};
    if (c.seg == -2) return {true, c.pv};
    return {false, c.seg};
  };
  std::map<std::tuple<int, int, int>, int> counts;
  int iso = 0;
  for (const auto& x : xs) {
    const Feat fa = feature(AP[x.a], x.X), fb = feature(B.chords[x.b], x.X);
    std::tuple<int, int, int> key{2, iso++, 0};
    if (fa.vertex && fb.vertex) {
      auto it = ri.id.find({1, fa.i, fb.i});
      key = it != ri.id.end() ? std::tuple<int, int, int>{0, it->second, 0} : std::tuple<int, int, int>{1, fa.i, fb.i};
    } else if (!fa.vertex && !fb.vertex && fa.i >= 0 && fb.i >= 0) {
      auto it = ri.id.find({0, fa.i, fb.i});
      if (it != ri.id.end()) key = {0, it->second, 0};
    }
    ++counts[key];
  }
  int n = 0;
  for (const auto& [k, c] : counts) n += c % 2;
  return n;
}

}  // namespace

int intersection_oracle(const FlatSurface& s, const CurveClass& a, const CurveClass& b, const OracleOptions& opt) {
  const GeodesicRep ga = tighten(s, a), gb = tighten(s, b);
  LinkIndex li(s);
  Q d = opt.delta;
  int prev = oracle_at(s, li, ga, gb, d);
  for (int k = 0; k < opt.refinements; ++k) {
    d /= 2;
    const int cur = oracle_at(s, li, ga, gb, d);
    if (cur == prev) return cur;
    prev = cur;
  }
  throw GeometryError("unstable count");
}

namespace {

NormalCurve simple_rep(const FlatSurface& s, const GeodesicRep& g) {
  if (g.cylinder) return leaf_curve(g);
  const int r = static_cast<int>(g.path.size()) - 1;
  std::vector<Q> scale(r, Q(1));
  std::mt19937 rng(12345);
  for (int attempt = 0; attempt < 400; ++attempt) {
    NormalCurve c = pushed_curve(s, g, Q(1, 1 << 12), &scale);
    if (self_crossings(s, c) == 0) return c;
    std::vector<int> rank(r);
    std::iota(rank.begin(), rank.end(), 1);
    std::shuffle(rank.begin(), rank.end(), rng);
    for (int q = 0; q < r; ++q) scale[q] = Q(rank[q], r);
  }
  throw GeometryError("could not realize the curve without self-crossings");
}

}  // namespace

CurveClass dehn_twist(const FlatSurface& s, const CurveClass& alpha, const CurveClass& c, int power) {
  check_adjacency(s, c);
  CurveClass cr = reduce(s, c);
  if (power == 0 || cr.crossings.empty()) return cr;
  if (!alpha.closed() || !c.closed()) throw GeometryError("Dehn twists are applied to closed curves");
  const GeodesicRep ga = tighten(s, alpha);
  if (intersection_number(s, ga, ga) > 0) throw GeometryError("alpha is not simple");
  const NormalCurve A = simple_rep(s, ga);
  const auto AC = chords_of(s, A);
  const int ma = A.size();
  for (unsigned seed = 1; seed < 64; ++seed) {
    const NormalCurve B = realize(s, cr.crossings, seed);
    // coincident edge points make the surgery ambiguous
    std::set<std::pair<Slot, Q>> apts;
    for (int l = 0; l < ma; ++l) {
      const Slot cs = s.canonical(A.x[l]);
      apts.insert({cs, cs == A.x[l] ? A.p[l] : Q(1 - A.p[l])});
    }
    bool clash = false;
    for (int l = 0; l < B.size() && !clash; ++l) {
      const Slot cs = s.canonical(B.x[l]);
      clash = apts.count({cs, cs == B.x[l] ? B.p[l] : Q(1 - B.p[l])}) > 0;
    }
    if (clash) continue;
    const auto BC = chords_of(s, B);
    const auto xs = chord_crossings(s, AC, BC, [](const Chord&, const Chord&) { return false; });
    std::vector<std::vector<std::pair<Q, int>>> on(BC.size());
    for (size_t n = 0; n < xs.size(); ++n) {
      const Chord& w = BC[xs[n].b];
      const Vec2q dw = w.q - w.p;
      on[xs[n].b].push_back({dot(xs[n].X - w.p, dw) / norm2(dw), static_cast<int>(n)});
    }
    std::vector<Slot> out;
    for (int l = 0; l < B.size(); ++l) {
      std::sort(on[l].begin(), on[l].end());
      for (const auto& [prm, n] : on[l]) {
        const int k = xs[n].a;
        const Chord &u = AC[k], &w = BC[l];
        bool forward = sgn(cross(w.q - w.p, u.q - u.p)) < 0;
        if (power < 0) forward = !forward;
        for (int rep = 0; rep < std::abs(power); ++rep) {
          if (forward)
            for (int i = 0; i < ma; ++i) out.push_back(A.x[(k + i) % ma]);
          else
            for (int i = 1; i <= ma; ++i) out.push_back(s.twin_of(A.x[mod(k - i, ma)]));
        }
      }
      out.push_back(B.x[l]);
    }
    CurveClass res = CurveClass::closed_curve(std::move(out), c.name);
    check_adjacency(s, res);
    return reduce(s, res);
  }
  throw GeometryError("could not place the curves in general position");
}

}  // namespace flatspec
