#include "flatspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "flatspec/foliation.hpp"
#include "flatspec/trace.hpp"

namespace flatspec {

MarkedSpectrum marked_spectrum(const FlatSurface& s, const std::vector<CurveClass>& panel, bool parallel) {
  MarkedSpectrum out;
  const int n = static_cast<int>(panel.size());
  out.lengths.assign(n, 0);
  std::vector<std::string> err(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      out.lengths[i] = flat_length(s, panel[i]);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!err[i].empty()) throw GeometryError(err[i]);
    out.ids.push_back(panel[i].name.empty() ? std::to_string(i) : panel[i].name);
  }
  return out;
}

namespace {

double seg_distance(const Vec2q& a, const Vec2q& b) {
  const Vec2 p = a.approx(), q = b.approx();
  const Vec2 d = q - p;
  const double l2 = d.x * d.x + d.y * d.y;
  double u = l2 > 0 ? -(p.x * d.x + p.y * d.y) / l2 : 0;
  u = std::clamp(u, 0.0, 1.0);
  return Vec2{p.x + u * d.x, p.y + u * d.y}.norm();
}

struct Window {
  Slot x;
  std::array<Vec2q, 3> pos;
  int sigma = 1;
  Vec2q R, L;
  std::vector<Slot> exits;
};

// Angular coordinate of every corner around its vertex.
struct VertexAngles {
  std::vector<std::array<double, 3>> pos;
  std::vector<double> total;
  explicit VertexAngles(const FlatSurface& s) : pos(s.num_triangles()) {
    for (const auto& vc : s.vertices()) {
      double acc = 0;
      for (const Corner& c : vc.corners) {
        pos[c.t][c.c] = acc;
        const Triangle& T = s.tri[c.t];
        acc += ccw_angle(T.e[c.c].approx(), (-T.e[(c.c + 2) % 3]).approx());
      }
      total.push_back(acc);
    }
  }
  double at(const FlatSurface& s, Corner c, const Vec2q& d) const {
    return pos[c.t][c.c] + ccw_angle(s.tri[c.t].e[c.c].approx(), d.approx());
  }
};

template <class T>
std::vector<T> canonical_cycle(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> best;
  for (const auto* v : {&a, &b})
    for (size_t r = 0; r < v->size(); ++r) {
      std::vector<T> c(v->begin() + r, v->end());
      c.insert(c.end(), v->begin(), v->begin() + r);
      if (best.empty() || c < best) best = c;
    }
  return best;
}

template <class T>
bool primitive(const std::vector<T>& a) {
  const size_t n = a.size();
  for (size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool same = true;
    for (size_t i = 0; i + d < n && same; ++i) same = a[i] == a[i + d];
    if (same) return false;
  }
  return true;
}

}  // namespace

SaddleSet saddle_connections(const FlatSurface& s, double bound, long budget) {
  SaddleSet out;
  long work = 0;
  auto record = [&](Corner c0, const Vec2q& v, Corner end, const Vec2q& back, std::vector<Slot> exits) {
    Saddle sd;
    sd.start = c0;
    sd.vec = v;
    const auto [ce, be] = sector_of(s, end, back);
    sd.end = ce;
    sd.back = be;
    sd.length = v.norm();
    sd.v0 = s.vertex_of(c0);
    sd.v1 = s.vertex_of(ce);
    sd.exits = std::move(exits);
    out.saddles.push_back(std::move(sd));
  };
  for (int t0 = 0; t0 < s.num_triangles() && out.complete; ++t0)
    for (int c0 = 0; c0 < 3 && out.complete; ++c0) {
      const Triangle& T = s.tri[t0];
      std::array<Vec2q, 3> P;
      for (int j = 0; j < 3; ++j) P[j] = T.corner(j) - T.corner(c0);
      const int c1 = (c0 + 1) % 3, c2 = (c0 + 2) % 3;
      if (T.e[c0].norm() <= bound) record({t0, c0}, T.e[c0], {t0, c1}, -T.e[c0], {});
      std::vector<Window> stack{{Slot{t0, c1}, P, 1, P[c1], P[c2], {}}};
      while (!stack.empty()) {
        if (++work > budget) {
          out.complete = false;
          break;
        }
        Window w = std::move(stack.back());
        stack.pop_back();
        const int e = w.x.e;
        if (seg_distance(w.pos[e], w.pos[(e + 1) % 3]) > bound) continue;
        const Slot tw = s.twin_of(w.x);
        const int sg = w.sigma * s.sign_of(w.x);
        const Triangle& U = s.tri[tw.t];
        const int e1 = (tw.e + 1) % 3, e2 = (tw.e + 2) % 3;
        const Vec2q o = w.pos[e] - signed_vec(sg, U.corner(e1));
        const Vec2q A = o + signed_vec(sg, U.corner(e2));
        std::array<Vec2q, 3> np;
        np[tw.e] = w.pos[(e + 1) % 3];
        np[e1] = w.pos[e];
        np[e2] = A;
        auto exits = w.exits;
        exits.push_back(w.x);
        if (sgn(cross(w.R, A)) > 0 && sgn(cross(A, w.L)) > 0 && A.norm() <= bound)
          record({t0, c0}, A, {tw.t, e2}, signed_vec(sg, -A), exits);
        for (const int ed : {e2, e1}) {
          const Vec2q& a = np[ed];
          const Vec2q& b = np[(ed + 1) % 3];
          const int cr = sgn(cross(a, b));
          if (cr == 0) continue;
          const Vec2q& X = cr > 0 ? a : b;
          const Vec2q& Y = cr > 0 ? b : a;
          const Vec2q& R = sgn(cross(w.R, X)) > 0 ? X : w.R;
          const Vec2q& L = sgn(cross(Y, w.L)) > 0 ? Y : w.L;
          if (sgn(cross(R, L)) <= 0) continue;
          stack.push_back({Slot{tw.t, ed}, np, sg, R, L, exits});
        }
      }
    }
  std::map<std::pair<Corner, std::pair<std::string, std::string>>, int> key;
  auto k = [](Corner c, const Vec2q& v) { return std::pair{c, std::pair{to_string(v.x), to_string(v.y)}}; };
  for (size_t i = 0; i < out.saddles.size(); ++i) key[k(out.saddles[i].start, out.saddles[i].vec)] = static_cast<int>(i);
  out.reverse.assign(out.saddles.size(), -1);
  for (size_t i = 0; i < out.saddles.size(); ++i) {
    auto it = key.find(k(out.saddles[i].end, out.saddles[i].back));
    if (it != key.end()) out.reverse[i] = it->second;
  }
  return out;
}

CurveClass chain_curve(const FlatSurface& s, const SaddleSet& set, const std::vector<int>& chain) {
  std::vector<Slot> xs;
  const int n = static_cast<int>(chain.size());
  for (int i = 0; i < n; ++i) {
    const Saddle& a = set.saddles[chain[i]];
    const Saddle& b = set.saddles[chain[(i + 1) % n]];
    xs.insert(xs.end(), a.exits.begin(), a.exits.end());
    Corner K = a.end;
    const Vec2q& ek = s.tri[K.t].e[K.c];
    if (sgn(cross(ek, a.back)) == 0 && sgn(dot(ek, a.back)) > 0) K = s.cw_next(K);
    const int limit = static_cast<int>(s.vertices()[a.v1].corners.size()) + 1;
    for (int st = 0; !(K == b.start); ++st) {
      if (st > limit) throw GeometryError("saddle chain junction did not close");
      xs.push_back({K.t, K.c});
      K = s.cw_next(K);
    }
  }
  if (xs.empty()) throw TrivialClass("trivial chain");
  return reduce(s, CurveClass::closed_curve(std::move(xs)));
}

UnmarkedSpectrum unmarked_spectrum(const FlatSurface& s, double cutoff, long budget) {
  if (!(cutoff > 0)) throw GeometryError("cutoff must be positive");
  UnmarkedSpectrum out;
  out.cutoff = cutoff;
  const SaddleSet set = saddle_connections(s, cutoff, budget);
  out.complete = set.complete;
  const VertexAngles ang(s);
  const int n = static_cast<int>(set.saddles.size());
  std::vector<char> usable(n);
  std::vector<double> out_angle(n), back_angle(n);
  for (int i = 0; i < n; ++i) {
    const Saddle& sd = set.saddles[i];
    usable[i] = !s.is_marked(sd.v0) && !s.is_marked(sd.v1);
    out_angle[i] = ang.at(s, sd.start, sd.vec);
    back_angle[i] = ang.at(s, sd.end, sd.back);
  }
  const double tol = 1e-9;
  // legal successors with the angle on the left of each junction
  std::vector<std::vector<std::pair<int, double>>> next(n);
  std::vector<std::vector<int>> from(s.num_vertices());
  for (int j = 0; j < n; ++j)
    if (usable[j]) from[set.saddles[j].v0].push_back(j);
  for (int i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    const int v = set.saddles[i].v1;
    const double A = ang.total[v];
    for (int j : from[v]) {
      double left = std::fmod(back_angle[i] - out_angle[j], A);
      if (left < 0) left += A;
      if (left >= kPi - tol && A - left >= kPi - tol) next[i].push_back({j, left});
    }
  }
  std::set<std::vector<int>> chains;
  long work = 0;
  std::vector<int> path;
  double len = 0;
  // cycles whose smallest id is the first entry
  std::function<void(int)> dfs = [&](int s0) {
    if (++work > budget) {
      out.complete = false;
      return;
    }
    const int last = path.back();
    for (auto [j, left] : next[last]) {
      (void)left;
      if (j < s0) continue;
      if (j == s0) {
        std::vector<int> rev;
        for (auto it = path.rbegin(); it != path.rend(); ++it) rev.push_back(set.reverse[*it]);
        if (primitive(path) && std::find(rev.begin(), rev.end(), -1) == rev.end())
          chains.insert(canonical_cycle(path, rev));
        else if (primitive(path))
          chains.insert(canonical_cycle(path, path));
      }
      if (len + set.saddles[j].length > cutoff + 1e-12) continue;
      path.push_back(j);
      len += set.saddles[j].length;
      dfs(s0);
      len -= set.saddles[j].length;
      path.pop_back();
      if (!out.complete) return;
    }
  };
  for (int s0 = 0; s0 < n && out.complete; ++s0) {
    if (!usable[s0] || set.saddles[s0].length > cutoff + 1e-12) continue;
    path = {s0};
    len = set.saddles[s0].length;
    dfs(s0);
  }
  std::set<std::vector<Slot>> cylinders;
  for (const auto& c : chains) {
    const int m = static_cast<int>(c.size());
    bool all_left = true, all_right = true;
    double total = 0;
    for (int i = 0; i < m; ++i) {
      const int a = c[i], b = c[(i + 1) % m];
      total += set.saddles[a].length;
      double left = -1;
      for (auto [j, l] : next[a])
        if (j == b) left = l;
      const double A = ang.total[set.saddles[a].v1];
      all_left = all_left && std::abs(left - kPi) < tol;
      all_right = all_right && std::abs(A - left - kPi) < tol;
    }
    SpectrumEntry e;
    e.chain = c;
    e.length = total;
    if (all_left || all_right) {
      std::vector<int> ch = c;
      if (!all_left) {
        std::vector<int> rev;
        for (auto it = c.rbegin(); it != c.rend(); ++it) rev.push_back(set.reverse[*it]);
        ch = rev;
      }
      const CurveClass leaf = chain_curve(s, set, ch);
      std::vector<Slot> rev;
      for (auto it = leaf.crossings.rbegin(); it != leaf.crossings.rend(); ++it) rev.push_back(s.twin_of(*it));
      if (!cylinders.insert(canonical_cycle(leaf.crossings, rev)).second) continue;
      e.cylinder = true;
    }
    for (int k = 1; k * total <= cutoff + 1e-12; ++k) {
      SpectrumEntry ek = e;
      ek.power = k;
      ek.length = k * total;
      out.entries.push_back(ek);
    }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.length < b.length; });
  for (const auto& e : out.entries) out.lengths.push_back(e.length);
  return out;
}

std::vector<double> torus_spectrum_oracle(const Vec2& a, const Vec2& b, double cutoff) {
  const double area = std::abs(a.x * b.y - a.y * b.x);
  const long qmax = static_cast<long>(std::ceil(cutoff * a.norm() / area)) + 1;
  const long pmax = static_cast<long>(std::ceil(cutoff * b.norm() / area)) + 1;
  std::vector<double> out;
  for (long q = 0; q <= qmax; ++q)
    for (long p = -pmax; p <= pmax; ++p) {
      if (q == 0 && p <= 0) continue;
      const double l = Vec2{p * a.x + q * b.x, p * a.y + q * b.y}.norm();
      if (l <= cutoff + 1e-12) out.push_back(l);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RayRow> ray_limit_check(const FlatSurface& s, const std::vector<CurveClass>& panel,
                                    const std::vector<double>& times, bool parallel) {
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw GeometryError("times must increase");
  const int np = static_cast<int>(panel.size()), nt = static_cast<int>(times.size());
  std::vector<double> nu0(np), mu0(np);
  std::vector<std::string> err(np * nt + np);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < np; ++i) {
    try {
      const GeodesicRep g = tighten(s, panel[i]);
      nu0[i] = foliation_curve_pairing(g, kPi / 2);
      mu0[i] = foliation_curve_pairing(g, 0);
    } catch (const std::exception& e) {
      err[np * nt + i] = e.what();
    }
  }
  std::vector<FlatSurface> stretched;
  for (double t : times) stretched.push_back(apply_linear(s, PlanarMatrix::teichmuller(t)));
  std::vector<RayRow> rows(np * nt);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < np * nt; ++k) {
    const int i = k / nt, ti = k % nt;
    const double t = times[ti];
    const PlanarMatrix m = PlanarMatrix::teichmuller(t);
    const double up = m.a.get_d(), down = m.d.get_d();
    RayRow& r = rows[k];
    r.id = panel[i].name.empty() ? std::to_string(i) : panel[i].name;
    r.t = t;
    try {
      r.normalized = flat_length(stretched[ti], panel[i]) / up;
    } catch (const std::exception& e) {
      err[k] = e.what();
    }
    r.target = nu0[i];
    r.residual = r.normalized - r.target;
    r.lower = std::min(up * nu0[i], down * mu0[i]) / up;
    r.upper = nu0[i] + down / up * mu0[i];
  }
  for (const auto& e : err)
    if (!e.empty()) throw GeometryError(e);
  return rows;
}

std::string ray_csv(const std::vector<RayRow>& rows) {
  std::ostringstream os;
  os << "id,t,normalized,target,residual,lower,upper\n";
  for (const auto& r : rows) {
    const bool quote = r.id.find_first_of(",\"") != std::string::npos;
    std::string id = r.id;
    if (quote) {
      id.clear();
      for (char ch : r.id) id += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      id = '"' + id + '"';
    }
    os << id << ',' << fmt17(r.t) << ',' << fmt17(r.normalized) << ',' << fmt17(r.target) << ','
       << fmt17(r.residual) << ',' << fmt17(r.lower) << ',' << fmt17(r.upper) << '\n';
  }
  return os.str();
}

}  // namespace flatspec
