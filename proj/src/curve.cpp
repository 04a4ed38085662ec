#include "flatspec/curve.hpp"

#include <fstream>
#include <sstream>

#include "flatspec/trace.hpp"

namespace flatspec {

using nlohmann::json;

CurveClass CurveClass::closed_curve(std::vector<Slot> xs, std::string name) {
  CurveClass c;
  c.crossings = std::move(xs);
  c.name = std::move(name);
  return c;
}

CurveClass CurveClass::arc(std::vector<Slot> xs, int v0, int v1, std::string name) {
  CurveClass c;
  c.kind = Kind::Arc;
  c.crossings = std::move(xs);
  c.ends = {v0, v1};
  c.name = std::move(name);
  return c;
}

void check_adjacency(const FlatSurface& s, const CurveClass& c) {
  const auto& x = c.crossings;
  const size_t n = x.size();
  for (size_t i = 0; i + 1 < n + (c.closed() ? 1 : 0); ++i) {
    Slot a = x[i], b = x[(i + 1) % n];
    if (s.twin_of(a).t != b.t)
      throw GeometryError("crossings " + std::to_string(i) + " and " + std::to_string((i + 1) % n) +
                          " do not share a triangle");
  }
}

std::vector<int> reduced_indices(const FlatSurface& s, const std::vector<Slot>& xs, bool closed) {
  std::vector<int> st;
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    if (!st.empty() && s.twin_of(xs[st.back()]) == xs[i])
      st.pop_back();
    else
      st.push_back(i);
  }
  if (closed) {
    size_t lo = 0;
    while (st.size() - lo >= 2 && s.twin_of(xs[st.back()]) == xs[st[lo]]) {
      st.pop_back();
      ++lo;
    }
    st.erase(st.begin(), st.begin() + static_cast<long>(lo));
  }
  return st;
}

CurveClass reduce(const FlatSurface& s, const CurveClass& c) {
  CurveClass r = c;
  r.crossings.clear();
  for (int i : reduced_indices(s, c.crossings, c.closed())) r.crossings.push_back(c.crossings[i]);
  return r;
}

Corner arc_start_corner(const FlatSurface&, const CurveClass& c) {
  if (c.start.t >= 0) return c.start;
  Slot f = c.crossings.front();
  return {f.t, (f.e + 2) % 3};
}

Corner arc_end_corner(const FlatSurface& s, const CurveClass& c) {
  if (c.finish.t >= 0) return c.finish;
  Slot in = s.twin_of(c.crossings.back());
  return {in.t, (in.e + 2) % 3};
}

CurveClass curve_from_json(const FlatSurface& s, const json& j) {
  if (!j.is_object()) throw ParseError("curve: top level must be an object");
  CurveClass c;
  const std::string kind = j.value("kind", "closed");
  if (kind == "arc")
    c.kind = CurveClass::Kind::Arc;
  else if (kind != "closed")
    throw ParseError("curve: kind must be 'closed' or 'arc'");
  if (!j.contains("crossings") || !j["crossings"].is_array()) throw ParseError("curve: missing 'crossings'");
  size_t i = 0;
  for (const auto& x : j["crossings"]) {
    if (!x.is_array() || x.size() < 2) throw ParseError("curve: crossings[" + std::to_string(i) + "] must be [tri,edge,orientation]");
    Slot sl{x[0].get<int>(), x[1].get<int>()};
    if (sl.t < 0 || sl.t >= s.num_triangles() || sl.e < 0 || sl.e > 2)
      throw ParseError("curve: crossings[" + std::to_string(i) + "] out of range");
    int o = x.size() > 2 ? x[2].get<int>() : 1;
    c.crossings.push_back(o >= 0 ? sl : s.twin_of(sl));
    ++i;
  }
  if (j.contains("ends")) c.ends = {j["ends"].at(0).get<int>(), j["ends"].at(1).get<int>()};
  c.name = j.value("name", "");
  if (!c.closed()) {
    if (c.crossings.empty()) throw ParseError("curve: arcs need at least one crossing");
    int v0 = s.vertex_of(arc_start_corner(s, c)), v1 = s.vertex_of(arc_end_corner(s, c));
    if (c.ends[0] < 0) c.ends = {v0, v1};
    if (c.ends[0] != v0 || c.ends[1] != v1) throw ParseError("curve: declared ends do not match the crossing sequence");
  }
  check_adjacency(s, c);
  return c;
}

json curve_to_json(const CurveClass& c) {
  json j;
  j["kind"] = c.closed() ? "closed" : "arc";
  json xs = json::array();
  for (Slot x : c.crossings) xs.push_back({x.t, x.e, 1});
  j["crossings"] = xs;
  if (!c.closed()) j["ends"] = c.ends;
  if (!c.name.empty()) j["name"] = c.name;
  return j;
}

CurveClass parse_curve(const FlatSurface& s, const std::string& text) {
  try {
    return curve_from_json(s, json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("curve: ") + e.what());
  }
}

CurveClass load_curve(const FlatSurface& s, const std::string& arg) {
  if (!arg.empty() && arg.front() == '(') {
    long p = 0, q = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream is(arg);
    if (!(is >> c1 >> p >> c2 >> q >> c3) || c2 != ',' || c3 != ')') throw ParseError("bad torus shorthand " + arg);
    return torus_curve(s, p, q);
  }
  if (!arg.empty() && arg.front() == '{') return parse_curve(s, arg);
  std::ifstream in(arg);
  if (!in) throw ParseError("cannot open curve file " + arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_curve(s, ss.str());
}

}  // namespace flatspec
