#include "flatspec/traintrack.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "flatspec/geodesic.hpp"
#include "flatspec/trace.hpp"

namespace flatspec {

int TrainTrack::branch_index(const std::string& name) const {
  for (int i = 0; i < num_branches(); ++i)
    if (branches[i] == name) return i;
  throw GeometryError("unknown branch " + name);
}

std::pair<int, int> TrainTrack::locate(BranchEnd e) const {
  for (int k = 0; k < num_switches(); ++k) {
    for (const auto& x : switches[k].in)
      if (x == e) return {k, 1};
    for (const auto& x : switches[k].out)
      if (x == e) return {k, -1};
  }
  throw GeometryError("branch end " + branches.at(e.branch) + ":" + std::to_string(e.end) + " is not at a switch");
}

void TrainTrack::validate() const {
  std::vector<std::array<int, 2>> seen(branches.size(), {0, 0});
  for (const auto& sw : switches) {
    if (sw.in.empty() || sw.out.empty()) throw GeometryError("switch " + sw.id + " needs both sides");
    for (const auto* side : {&sw.in, &sw.out})
      for (const auto& e : *side) {
        if (e.branch < 0 || e.branch >= num_branches() || e.end < 0 || e.end > 1)
          throw GeometryError("switch " + sw.id + " names a missing branch end");
        ++seen[e.branch][e.end];
      }
  }
  for (int b = 0; b < num_branches(); ++b)
    for (int e = 0; e < 2; ++e)
      if (seen[b][e] != 1) throw GeometryError("branch end " + branches[b] + ":" + std::to_string(e) + " must sit at exactly one switch");
  if (!lengths.empty()) {
    if (lengths.size() != branches.size()) throw GeometryError("length vector size mismatch");
    for (double l : lengths)
      if (!(l >= 0)) throw GeometryError("negative branch length");
  }
  if (!embedding.empty()) {
    if (embedding.size() != branches.size()) throw GeometryError("embedding size mismatch");
    for (size_t b = 0; b < embedding.size(); ++b)
      if (embedding[b].empty()) throw GeometryError("branch " + branches[b] + " has an empty embedding");
  }
}

std::vector<std::vector<int>> switch_matrix(const TrainTrack& tt) {
  std::vector<std::vector<int>> m(tt.switches.size(), std::vector<int>(tt.branches.size(), 0));
  for (size_t k = 0; k < tt.switches.size(); ++k) {
    for (const auto& e : tt.switches[k].in) m[k][e.branch] += 1;
    for (const auto& e : tt.switches[k].out) m[k][e.branch] -= 1;
  }
  return m;
}

QMatrix switch_matrix_q(const TrainTrack& tt) {
  QMatrix out;
  for (const auto& row : switch_matrix(tt)) {
    QVec r;
    for (int x : row) r.push_back(Q(x));
    out.push_back(r);
  }
  return out;
}

QMatrix weight_space_basis(const TrainTrack& tt) { return null_space(switch_matrix_q(tt), tt.num_branches()); }

bool satisfies_switch_conditions(const TrainTrack& tt, const WeightVector& w) {
  for (const auto& row : switch_matrix_q(tt))
    if (sgn(dot(row, w)) != 0) return false;
  return true;
}

double carried_length(const TrainTrack& tt, const WeightVector& w) {
  if (tt.lengths.empty()) throw GeometryError("track has no length vector");
  if (w.size() != tt.lengths.size()) throw GeometryError("weight vector size mismatch");
  double s = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (sgn(w[i]) < 0) throw GeometryError("negative weight");
    s += w[i].get_d() * tt.lengths[i];
  }
  return s;
}

WeightVector circuit_weights(const TrainTrack& tt, const Circuit& c) {
  WeightVector w(tt.branches.size(), Q(0));
  for (const auto& st : c) w[st.branch] += 1;
  return w;
}

namespace {

BranchEnd departure(const TrackStep& s) { return {s.branch, s.forward ? 0 : 1}; }
BranchEnd arrival(const TrackStep& s) { return {s.branch, s.forward ? 1 : 0}; }

bool legal(const TrainTrack& tt, const TrackStep& a, const TrackStep& b) {
  auto [ka, sa] = tt.locate(arrival(a));
  auto [kb, sb] = tt.locate(departure(b));
  return ka == kb && sa == -sb;
}

Circuit reversed(const Circuit& c) {
  Circuit r(c.rbegin(), c.rend());
  for (auto& s : r) s.forward = !s.forward;
  return r;
}

Circuit canonical(const Circuit& c) {
  Circuit best = c;
  for (const Circuit& base : {c, reversed(c)})
    for (size_t k = 0; k < base.size(); ++k) {
      Circuit r(base.begin() + k, base.end());
      r.insert(r.end(), base.begin(), base.begin() + k);
      if (r < best) best = r;
    }
  return best;
}

bool primitive(const Circuit& c) {
  const size_t n = c.size();
  for (size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool rep = true;
    for (size_t i = p; i < n && rep; ++i) rep = c[i] == c[i - p];
    if (rep) return false;
  }
  return true;
}

std::vector<Slot> directed_slots(const FlatSurface& s, const TrainTrack& tt, const TrackStep& st) {
  const auto& e = tt.embedding.at(st.branch);
  if (st.forward) return e;
  std::vector<Slot> out;
  for (auto it = e.rbegin(); it != e.rend(); ++it) out.push_back(s.twin_of(*it));
  return out;
}

using SegKey = std::tuple<int, int, std::string, std::string>;

SegKey seg_key(const FlatSurface& s, Corner c, const Vec2q& v) {
  auto [cc, w] = sector_of(s, c, v);
  return {cc.t, cc.c, to_string(w.x), to_string(w.y)};
}

std::vector<double> corner_angles(const FlatSurface& s, const VertexClass& vc) {
  std::vector<double> cum;
  double a = 0;
  for (const auto& c : vc.corners) {
    cum.push_back(a);
    const Triangle& T = s.tri[c.t];
    a += ccw_angle(T.e[c.c].approx(), (-T.e[(c.c + 2) % 3]).approx());
  }
  cum.push_back(a);
  return cum;
}

// Angular position of the ray leaving along slot sl, and the total angle at its vertex.
std::pair<double, double> ray_position(const FlatSurface& s, Slot sl) {
  const int v = s.vertex_of({sl.t, sl.e});
  const auto& vc = s.vertices()[v];
  const auto cum = corner_angles(s, vc);
  for (size_t i = 0; i < vc.corners.size(); ++i)
    if (vc.corners[i] == Corner{sl.t, sl.e}) return {cum[i], cum.back()};
  throw GeometryError("corner missing from its vertex walk");
}

void check_branch_geodesic(const FlatSurface& s, const TrainTrack& tt, int b, double tol) {
  const auto& e = tt.embedding[b];
  for (size_t i = 0; i < e.size(); ++i) {
    if (s.edge(e[i]).is_zero()) throw GeometryError("zero-length branch " + tt.branches[b]);
    if (i + 1 == e.size()) break;
    if (s.vertex_of_slot_end(e[i]) != s.vertex_of_slot_start(e[i + 1]))
      throw GeometryError("branch " + tt.branches[b] + " embedding is not connected");
    auto [p, total] = ray_position(s, s.twin_of(e[i]));
    auto [q, _] = ray_position(s, e[i + 1]);
    double d = std::fmod(q - p + 2 * total, total);
    if (d < kPi - tol || total - d < kPi - tol) throw GeometryError("non-geodesic branch embedding: " + tt.branches[b]);
  }
}

Slot end_slot(const FlatSurface& s, const TrainTrack& tt, BranchEnd e) {
  const auto& em = tt.embedding.at(e.branch);
  return e.end == 0 ? em.front() : s.twin_of(em.back());
}

}  // namespace

std::string circuit_name(const TrainTrack& tt, const Circuit& c) {
  std::string out;
  for (const auto& st : c) {
    if (!out.empty()) out += ".";
    out += tt.branches[st.branch];
    if (!st.forward) out += "'";
  }
  return out;
}

std::vector<Circuit> enumerate_circuits(const TrainTrack& tt, int max_steps, int max_count) {
  tt.validate();
  std::vector<Circuit> out;
  std::set<Circuit> seen;
  std::vector<TrackStep> steps;
  for (int b = 0; b < tt.num_branches(); ++b)
    for (bool f : {true, false}) steps.push_back({b, f});
  // successors of each step
  std::map<TrackStep, std::vector<TrackStep>> next;
  for (const auto& a : steps)
    for (const auto& b : steps)
      if (legal(tt, a, b)) next[a].push_back(b);
  for (int n = 1; n <= max_steps && static_cast<int>(out.size()) < max_count; ++n) {
    std::vector<Circuit> level;
    for (const auto& first : steps) {
      Circuit cur{first};
      std::function<void()> dfs = [&]() {
        if (static_cast<int>(cur.size()) == n) {
          if (!legal(tt, cur.back(), cur.front()) || !primitive(cur)) return;
          Circuit k = canonical(cur);
          if (k == cur && seen.insert(k).second) level.push_back(k);
          return;
        }
        for (const auto& nx : next[cur.back()]) {
          if (nx < first) continue;
          cur.push_back(nx);
          dfs();
          cur.pop_back();
        }
      };
      dfs();
    }
    std::sort(level.begin(), level.end());
    for (auto& c : level) {
      if (static_cast<int>(out.size()) >= max_count) break;
      out.push_back(std::move(c));
    }
  }
  return out;
}

CurveClass circuit_curve(const FlatSurface& s, const TrainTrack& tt, const Circuit& c) {
  if (!tt.embedded()) throw GeometryError("track has no embedding");
  if (c.empty()) throw TrivialClass("trivial class");
  std::vector<Slot> path;
  for (const auto& st : c)
    for (const auto& sl : directed_slots(s, tt, st)) path.push_back(sl);
  std::vector<Slot> xs;
  const size_t n = path.size();
  for (size_t i = 0; i < n; ++i) {
    const Slot a = path[i], b = path[(i + 1) % n];
    if (s.vertex_of_slot_end(a) != s.vertex_of_slot_start(b)) throw GeometryError("circuit is not connected");
    Corner cur{a.t, (a.e + 1) % 3};
    const Corner target{b.t, b.e};
    const size_t limit = s.vertices()[s.vertex_of(cur)].corners.size();
    size_t k = 0;
    while (cur != target) {
      if (++k > limit) throw GeometryError("corner walk did not reach the next branch");
      xs.push_back({cur.t, cur.c});
      cur = s.cw_next(cur);
    }
  }
  if (xs.empty()) throw TrivialClass("trivial class");
  auto cc = reduce(s, CurveClass::closed_curve(xs, circuit_name(tt, c)));
  if (cc.crossings.empty()) throw TrivialClass("trivial class");
  return cc;
}

std::optional<WeightVector> carrying_weights(const FlatSurface& s, const TrainTrack& tt, const CurveClass& c) {
  if (!tt.embedded()) throw GeometryError("track has no embedding");
  std::map<SegKey, TrackStep> keys;
  for (int b = 0; b < tt.num_branches(); ++b) {
    if (tt.embedding[b].size() != 1) throw GeometryError("carrying_weights needs single-edge branches");
    const Slot f = tt.embedding[b][0], r = s.twin_of(f);
    keys[seg_key(s, {f.t, f.e}, s.edge(f))] = {b, true};
    keys[seg_key(s, {r.t, r.e}, s.edge(r))] = {b, false};
  }
  const GeodesicRep g = tighten(s, c);
  std::vector<const Chain*> candidates;
  if (g.cylinder) {
    candidates = {&g.cyl.boundary[0], &g.cyl.boundary[1]};
  } else {
    candidates = {&g.chain};
  }
  for (const Chain* ch : candidates) {
    Circuit cir;
    bool ok = !ch->segs.empty();
    for (const auto& sg : ch->segs) {
      if (!ok) break;
      if (sg.start.t < 0) {
        ok = false;
        break;
      }
      auto it = keys.find(seg_key(s, sg.start, sg.vec));
      if (it == keys.end()) ok = false;
      else cir.push_back(it->second);
    }
    if (!ok) continue;
    for (size_t i = 0; i < cir.size() && ok; ++i) ok = legal(tt, cir[i], cir[(i + 1) % cir.size()]);
    if (ok) return circuit_weights(tt, cir);
  }
  return std::nullopt;
}

std::vector<double> embedded_lengths(const FlatSurface& s, const TrainTrack& tt) {
  std::vector<double> out;
  for (const auto& e : tt.embedding) {
    double l = 0;
    for (const auto& sl : e) l += s.edge(sl).norm();
    out.push_back(l);
  }
  return out;
}

double embedding_length_error(const FlatSurface& s, const TrainTrack& tt) {
  if (tt.lengths.empty()) throw GeometryError("track has no length vector");
  const auto el = embedded_lengths(s, tt);
  double m = 0;
  for (size_t b = 0; b < el.size(); ++b) m = std::max(m, std::abs(el[b] - tt.lengths[b]));
  return m;
}

MagneticVerdict check_magnetic(const FlatSurface& s, const TrainTrack& tt, double tol) {
  if (!tt.embedded()) throw GeometryError("track has no embedding");
  tt.validate();
  for (int b = 0; b < tt.num_branches(); ++b) check_branch_geodesic(s, tt, b, tol);
  MagneticVerdict v;
  v.min_angle = 1e300;
  for (int k = 0; k < tt.num_switches(); ++k) {
    const auto& sw = tt.switches[k];
    const int vert = s.vertex_of_slot_start(end_slot(s, tt, sw.in[0]));
    for (const auto* side : {&sw.in, &sw.out})
      for (const auto& e : *side)
        if (s.vertex_of_slot_start(end_slot(s, tt, e)) != vert)
          throw GeometryError("switch " + sw.id + " has ends at different vertices");
    for (const auto& i : sw.in)
      for (const auto& o : sw.out) {
        auto [p, total] = ray_position(s, end_slot(s, tt, i));
        auto [q, _] = ray_position(s, end_slot(s, tt, o));
        const double a = std::fmod(q - p + 2 * total, total), b = total - a;
        v.min_angle = std::min({v.min_angle, a, b});
        if (v.magnetic && (a < kPi - tol || b < kPi - tol)) {
          v.magnetic = false;
          v.bad_switch = k;
          v.in_end = i;
          v.out_end = o;
          v.angle_a = a;
          v.angle_b = b;
        }
      }
  }
  return v;
}

bool in_row_space(const TrainTrack& tt, const QVec& d) {
  const int nb = tt.num_branches();
  const QMatrix R = row_space(switch_matrix_q(tt), nb);
  if (R.empty()) {
    for (const auto& x : d)
      if (sgn(x) != 0) return false;
    return true;
  }
  QMatrix Rt(nb, QVec(R.size()));
  for (int b = 0; b < nb; ++b)
    for (size_t r = 0; r < R.size(); ++r) Rt[b][r] = R[r][b];
  return solve(Rt, d, static_cast<int>(R.size())).has_value();
}

AdmissibleSpace admissible_space(const TrainTrack& tt, const std::vector<LinearRelation>& rel) {
  const int nb = tt.num_branches();
  for (const auto& r : rel)
    if (static_cast<int>(r.coeffs.size()) != nb) throw GeometryError("relation size mismatch");
  const QMatrix R = row_space(switch_matrix_q(tt), nb);
  const int nr = static_cast<int>(R.size());
  AdmissibleSpace out;
  out.particular.assign(nb, Q(0));
  if (nr == 0) {
    for (const auto& r : rel)
      if (sgn(r.rhs) != 0) throw GeometryError("inconsistent constraints");
    return out;
  }
  auto lift = [&](const QVec& y) {
    QVec d(nb, Q(0));
    for (int r = 0; r < nr; ++r)
      for (int b = 0; b < nb; ++b) d[b] += y[r] * R[r][b];
    return d;
  };
  if (rel.empty()) {
    out.basis = R;
    return out;
  }
  QMatrix A;
  QVec rhs;
  for (const auto& r : rel) {
    QVec row(nr, Q(0));
    for (int k = 0; k < nr; ++k) row[k] = dot(r.coeffs, R[k]);
    A.push_back(row);
    rhs.push_back(r.rhs);
  }
  auto y0 = solve(A, rhs, nr);
  if (!y0) throw GeometryError("inconsistent constraints");
  out.particular = lift(*y0);
  for (const auto& y : null_space(A, nr)) out.basis.push_back(lift(y));
  return out;
}

QMatrix admissible_perturbations(const TrainTrack& tt, const std::vector<LinearRelation>& rel) {
  return admissible_space(tt, rel).basis;
}

namespace {

BranchEnd parse_end(const TrainTrack& tt, const nlohmann::json& j) {
  if (!j.is_string()) throw ParseError("branch end must be \"name:0\" or \"name:1\"");
  const std::string s = j.get<std::string>();
  const auto c = s.rfind(':');
  if (c == std::string::npos) throw ParseError("branch end must be \"name:0\" or \"name:1\"");
  const std::string e = s.substr(c + 1);
  if (e != "0" && e != "1") throw ParseError("branch end index must be 0 or 1");
  try {
    return {tt.branch_index(s.substr(0, c)), e == "1"};
  } catch (const GeometryError& ex) {
    throw ParseError(ex.what());
  }
}

}  // namespace

TrainTrack track_from_json(const nlohmann::json& j) {
  TrainTrack tt;
  try {
    for (const auto& b : j.at("branches")) tt.branches.push_back(b.get<std::string>());
    for (const auto& sj : j.at("switches")) {
      Switch sw;
      sw.id = sj.value("id", "s" + std::to_string(tt.switches.size()));
      for (const auto& e : sj.at("in")) sw.in.push_back(parse_end(tt, e));
      for (const auto& e : sj.at("out")) sw.out.push_back(parse_end(tt, e));
      tt.switches.push_back(sw);
    }
    if (j.contains("lengths"))
      for (const auto& l : j.at("lengths")) tt.lengths.push_back(l.is_string() ? parse_rational(l.get<std::string>()).get_d() : l.get<double>());
    if (j.contains("embedding"))
      for (const auto& chain : j.at("embedding")) {
        std::vector<Slot> e;
        for (const auto& sl : chain) e.push_back({sl.at(0).get<int>(), sl.at(1).get<int>()});
        tt.embedding.push_back(e);
      }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("track: ") + e.what());
  }
  try {
    tt.validate();
  } catch (const GeometryError& e) {
    throw ParseError(e.what());
  }
  return tt;
}

nlohmann::json track_to_json(const TrainTrack& tt) {
  nlohmann::json j;
  j["branches"] = tt.branches;
  auto endname = [&](const BranchEnd& e) { return tt.branches[e.branch] + ":" + std::to_string(e.end); };
  j["switches"] = nlohmann::json::array();
  for (const auto& sw : tt.switches) {
    nlohmann::json s;
    s["id"] = sw.id;
    s["in"] = nlohmann::json::array();
    s["out"] = nlohmann::json::array();
    for (const auto& e : sw.in) s["in"].push_back(endname(e));
    for (const auto& e : sw.out) s["out"].push_back(endname(e));
    j["switches"].push_back(s);
  }
  if (!tt.lengths.empty()) j["lengths"] = tt.lengths;
  if (tt.embedded()) {
    j["embedding"] = nlohmann::json::array();
    for (const auto& e : tt.embedding) {
      nlohmann::json c = nlohmann::json::array();
      for (const auto& sl : e) c.push_back({sl.t, sl.e});
      j["embedding"].push_back(c);
    }
  }
  return j;
}

TrainTrack load_track(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return track_from_json(j);
}

}  // namespace flatspec
