#include "flatspec/surface.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace flatspec {

using nlohmann::json;

Vec2q Triangle::corner(int j) const {
  switch (j % 3) {
    case 0: return {};
    case 1: return e[0];
    default: return e[0] + e[1];
  }
}

const SurfaceIndex& FlatSurface::index() const {
  if (!idx_) throw GeometryError("surface gluing is not indexed");
  return *idx_;
}

int FlatSurface::num_vertices() const { return static_cast<int>(index().classes.size()); }
const std::vector<VertexClass>& FlatSurface::vertices() const { return index().classes; }
int FlatSurface::vertex_of(Corner c) const { return index().vertex[c.t][c.c]; }
bool FlatSurface::is_marked(int v) const { return index().classes[v].marked; }

Corner FlatSurface::ccw_next(Corner c) const {
  Slot s = twin[c.t][(c.c + 2) % 3];
  return {s.t, s.e};
}

Corner FlatSurface::cw_next(Corner c) const {
  Slot s = twin[c.t][c.c];
  return {s.t, (s.e + 1) % 3};
}

Vec2q FlatSurface::transition_offset(Slot s) const {
  Slot o = twin_of(s);
  const Vec2q a = tri[o.t].corner(o.e);
  const Vec2q b = tri[s.t].corner(s.e + 1);
  return a - signed_vec(sign_of(s), b);
}

static double corner_angle(const Triangle& t, int j) {
  Vec2 out = t.e[j].approx();
  Vec2 in = (-t.e[(j + 2) % 3]).approx();
  return ccw_angle(out, in);
}

void FlatSurface::build_index() {
  const int n = num_triangles();
  if (static_cast<int>(twin.size()) != n || static_cast<int>(sign.size()) != n)
    throw GeometryError("gluing table size mismatch");
  for (int t = 0; t < n; ++t)
    for (int e = 0; e < 3; ++e) {
      Slot o = twin[t][e];
      if (o.t < 0 || o.t >= n || o.e < 0 || o.e > 2)
        throw GeometryError("edge slot (" + std::to_string(t) + "," + std::to_string(e) + ") is not glued");
      if (twin[o.t][o.e] != Slot{t, e} || sign[o.t][o.e] != sign[t][e])
        throw GeometryError("gluing is not a symmetric matching at (" + std::to_string(t) + "," +
                            std::to_string(e) + ")");
      if (o == Slot{t, e}) throw GeometryError("edge slot glued to itself");
      if (sign[t][e] != 1 && sign[t][e] != -1) throw GeometryError("gluing sign must be +1 or -1");
    }
  auto idx = std::make_shared<SurfaceIndex>();
  idx->vertex.assign(n, {-1, -1, -1});
  for (int t = 0; t < n; ++t)
    for (int c = 0; c < 3; ++c) {
      if (idx->vertex[t][c] >= 0) continue;
      VertexClass vc;
      const int id = static_cast<int>(idx->classes.size());
      Corner cur{t, c};
      int hol = 1;
      do {
        idx->vertex[cur.t][cur.c] = id;
        vc.corners.push_back(cur);
        vc.angle += corner_angle(tri[cur.t], cur.c);
        hol *= sign[cur.t][(cur.c + 2) % 3];
        Slot s = twin[cur.t][(cur.c + 2) % 3];
        cur = {s.t, s.e};
      } while (cur != Corner{t, c});
      vc.holonomy = hol;
      vc.k = static_cast<int>(std::lround(vc.angle / std::numbers::pi));
      idx->classes.push_back(std::move(vc));
    }
  for (int m : marked)
    if (m >= 0 && m < static_cast<int>(idx->classes.size())) idx->classes[m].marked = true;
  idx_ = std::move(idx);
}

static mpz_class json_int(const json& v, const char* what) {
  if (v.is_number_integer()) return mpz_class(std::to_string(v.get<long long>()));
  if (v.is_string()) {
    mpz_class z;
    if (z.set_str(v.get<std::string>(), 10) == 0) return z;
  }
  throw ParseError(std::string("expected integer for ") + what);
}

static json int_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

FlatSurface surface_from_json(const json& j) {
  FlatSurface s;
  if (!j.is_object()) throw ParseError("surface: top level must be an object");
  if (!j.contains("version") || j["version"] != 1) throw ParseError("surface: field 'version' must be 1");
  if (!j.contains("triangles") || !j["triangles"].is_array()) throw ParseError("surface: missing 'triangles'");
  const auto& tris = j["triangles"];
  for (size_t t = 0; t < tris.size(); ++t) {
    const std::string where = "triangles[" + std::to_string(t) + "]";
    const auto& te = tris[t].contains("edges") ? tris[t]["edges"] : json();
    if (!te.is_array() || te.size() != 3) throw ParseError(where + ".edges must hold 3 vectors");
    Triangle tr;
    for (int e = 0; e < 3; ++e) {
      const auto& v = te[e];
      if (!v.is_array() || v.size() != 4) throw ParseError(where + ".edges[" + std::to_string(e) + "] must be [xn,xd,yn,yd]");
      mpz_class xn = json_int(v[0], "xn"), xd = json_int(v[1], "xd"), yn = json_int(v[2], "yn"), yd = json_int(v[3], "yd");
      if (xd == 0 || yd == 0) throw ParseError(where + ": zero denominator");
      Q x(xn, xd), y(yn, yd);
      x.canonicalize();
      y.canonicalize();
      tr.e[e] = {x, y};
    }
    if (!(tr.e[0] + tr.e[1] + tr.e[2]).is_zero()) throw ParseError(where + ": edge vectors do not sum to zero");
    s.tri.push_back(tr);
  }
  const int n = s.num_triangles();
  s.twin.assign(n, {Slot{}, Slot{}, Slot{}});
  s.sign.assign(n, {0, 0, 0});
  if (!j.contains("gluings") || !j["gluings"].is_array()) throw ParseError("surface: missing 'gluings'");
  size_t gi = 0;
  for (const auto& g : j["gluings"]) {
    const std::string where = "gluings[" + std::to_string(gi++) + "]";
    if (!g.is_array() || g.size() != 3 || !g[0].is_array() || !g[1].is_array() || !g[2].is_number_integer())
      throw ParseError(where + " must be [[t,e],[t',e'],sign]");
    Slot a{g[0].at(0).get<int>(), g[0].at(1).get<int>()}, b{g[1].at(0).get<int>(), g[1].at(1).get<int>()};
    int sg = g[2].get<int>();
    for (Slot x : {a, b})
      if (x.t < 0 || x.t >= n || x.e < 0 || x.e > 2) throw ParseError(where + ": slot out of range");
    if (s.sign[a.t][a.e] != 0 || s.sign[b.t][b.e] != 0) throw ParseError(where + ": slot glued twice");
    s.twin[a.t][a.e] = b;
    s.twin[b.t][b.e] = a;
    s.sign[a.t][a.e] = sg;
    s.sign[b.t][b.e] = sg;
  }
  if (j.contains("marked")) {
    if (!j["marked"].is_array()) throw ParseError("surface: 'marked' must be an array");
    for (const auto& m : j["marked"]) s.marked.push_back(m.get<int>());
  }
  if (j.contains("labels")) s.labels = j["labels"];
  bool complete = true;
  for (int t = 0; t < n; ++t)
    for (int e = 0; e < 3; ++e) complete = complete && s.sign[t][e] != 0;
  if (complete) {
    try {
      s.build_index();
    } catch (const GeometryError&) {
    }
  }
  return s;
}

FlatSurface parse_surface(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("surface: ") + e.what());
  }
  try {
    return surface_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("surface: ") + e.what());
  }
}

json surface_to_json(const FlatSurface& s) {
  json j;
  j["version"] = 1;
  json tris = json::array();
  for (const auto& t : s.tri) {
    json edges = json::array();
    for (const auto& v : t.e)
      edges.push_back({int_to_json(v.x.get_num()), int_to_json(v.x.get_den()), int_to_json(v.y.get_num()),
                       int_to_json(v.y.get_den())});
    tris.push_back({{"edges", edges}});
  }
  j["triangles"] = tris;
  json gl = json::array();
  for (int t = 0; t < s.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) {
      Slot o = s.twin[t][e];
      if (Slot{t, e} < o) gl.push_back({{t, e}, {o.t, o.e}, s.sign[t][e]});
    }
  j["gluings"] = gl;
  j["marked"] = s.marked;
  j["labels"] = s.labels;
  return j;
}

std::string serialize_surface(const FlatSurface& s) { return surface_to_json(s).dump(1); }

FlatSurface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_surface(ss.str());
}

json ValidationReport::to_json() const {
  json j;
  j["pass"] = pass;
  json cs = json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = cs;
  j["genus"] = genus;
  j["marked_count"] = marked_count;
  json cp = json::array();
  for (const auto& c : cone_points) cp.push_back({{"vertex", c.vertex}, {"k", c.k}, {"marked", c.marked}});
  j["cone_points"] = cp;
  j["gauss_bonnet"] = {{"sum_2_minus_k", gauss_bonnet_sum}, {"target", gauss_bonnet_target}};
  return j;
}

ValidationReport validate_surface(const FlatSurface& s, const ValidateOptions& opt) {
  ValidationReport r;
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    r.checks.push_back({std::move(name), ok, std::move(detail)});
    r.pass = r.pass && ok;
  };
  add("nonempty", s.num_triangles() > 0);
  bool sums = true;
  for (const auto& t : s.tri) sums = sums && (t.e[0] + t.e[1] + t.e[2]).is_zero();
  add("edge_sums_zero", sums);
  FlatSurface tmp = s;
  std::string err;
  try {
    tmp.build_index();
  } catch (const GeometryError& e) {
    err = e.what();
  }
  add("perfect_matching", err.empty(), err);
  if (!err.empty()) return r;

  std::string bad;
  for (int t = 0; t < s.num_triangles() && bad.empty(); ++t)
    for (int e = 0; e < 3; ++e) {
      Slot o = s.twin[t][e];
      if (s.tri[o.t].e[o.e] != signed_vec(-s.sign[t][e], s.tri[t].e[e])) {
        bad = "(" + std::to_string(t) + "," + std::to_string(e) + ")";
        break;
      }
    }
  add("glued_vectors_match", bad.empty(), bad);

  bool pos = true;
  for (const auto& t : s.tri) pos = pos && sgn(cross(t.e[0], t.e[1])) > 0;
  add("triangles_positive", pos);

  const auto& vs = tmp.vertices();
  bool marked_ok = true;
  for (int m : s.marked) marked_ok = marked_ok && m >= 0 && m < static_cast<int>(vs.size());
  add("marked_ids_in_range", marked_ok);

  std::string angle_issue;
  int gb = 0;
  for (int v = 0; v < static_cast<int>(vs.size()); ++v) {
    const auto& vc = vs[v];
    const std::string id = "vertex " + std::to_string(v);
    if (std::abs(vc.angle - vc.k * std::numbers::pi) > opt.tol * std::max(1.0, vc.angle))
      angle_issue += id + " angle not a multiple of pi; ";
    else if (((vc.k % 2) == 0 ? 1 : -1) != vc.holonomy)
      angle_issue += id + " holonomy parity disagrees with k; ";
    int kmin = vc.marked ? (opt.allow_k1_marked ? 1 : 2) : 2;
    if (vc.k < kmin) angle_issue += id + " cone angle " + std::to_string(vc.k) + "pi below minimum (not locally CAT(0)); ";
    gb += 2 - vc.k;
    if (vc.k != 2 || vc.marked) r.cone_points.push_back({v, vc.k, vc.marked});
  }
  add("cone_angles", angle_issue.empty(), angle_issue);

  const int F = s.num_triangles(), E = 3 * F / 2, V = static_cast<int>(vs.size());
  const int chi = V - E + F;
  r.genus = (2 - chi) / 2;
  r.marked_count = static_cast<int>(s.marked.size());
  r.gauss_bonnet_sum = gb;
  r.gauss_bonnet_target = 2 * chi;
  add("gauss_bonnet", gb == 2 * chi && chi % 2 == 0,
      "sum(2-k)=" + std::to_string(gb) + " target=" + std::to_string(2 * chi));
  add("area_positive", sgn(surface_area(s)) > 0);
  return r;
}

void require_valid(const FlatSurface& s) {
  if (!s.indexed()) throw GeometryError("surface gluing is incomplete");
  auto r = validate_surface(s);
  if (!r.pass) {
    std::string msg = "invalid surface:";
    for (const auto& c : r.checks)
      if (!c.pass) msg += " " + c.name + (c.detail.empty() ? "" : " [" + c.detail + "]");
    throw GeometryError(msg);
  }
}

Q surface_area(const FlatSurface& s) {
  Q a = 0;
  for (const auto& t : s.tri) a += cross(t.e[0], t.e[1]);
  return a / 2;
}

PlanarMatrix PlanarMatrix::from_doubles(double a, double b, double c, double d) {
  return {Q(a), Q(b), Q(c), Q(d)};
}

PlanarMatrix PlanarMatrix::rotation(double theta) {
  return from_doubles(std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta));
}

PlanarMatrix PlanarMatrix::teichmuller(double t) { return diag(Q(std::exp(t)), Q(std::exp(-t))); }

FlatSurface apply_linear(const FlatSurface& s, const PlanarMatrix& m) {
  if (sgn(m.det()) <= 0) throw GeometryError("orientation-reversing or singular matrix");
  FlatSurface r = s;
  for (auto& t : r.tri)
    for (auto& v : t.e) v = m.apply(v);
  r.build_index();
  return r;
}

}  // namespace flatspec
