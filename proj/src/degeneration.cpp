#include <algorithm>
#include <filesystem>
#include <set>

#include "flatspec/families.hpp"
#include "flatspec/foliation.hpp"
#include "flatspec/trace.hpp"

namespace flatspec {

namespace {

Q json_q(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Q(j.get<long>());
  return rationalize(j.get<double>(), 52);
}

Vec2q json_vec(const nlohmann::json& j) { return {json_q(j.at(0)), json_q(j.at(1))}; }

ScaledVec json_scaled(const nlohmann::json& j) {
  if (j.is_array()) return {json_vec(j), {}};
  ScaledVec v{json_vec(j.at("base")), {}};
  if (j.contains("per_slit")) v.per_slit = json_vec(j["per_slit"]);
  return v;
}

Relation json_relation(const std::string& r) {
  if (r == "contained") return Relation::Contained;
  if (r == "disjoint") return Relation::Disjoint;
  if (r == "crossing") return Relation::Crossing;
  throw GeometryError("unknown relation " + r);
}

Corner json_site(const MixedStructure& eta, const nlohmann::json& j, int& piece) {
  piece = j.at("piece").get<int>();
  if (piece < 0 || piece >= static_cast<int>(eta.pieces.size())) throw GeometryError("slit site piece out of range");
  const FlatSurface& s = eta.pieces[piece].surface;
  if (j.contains("corner")) return {j["corner"].at(0).get<int>(), j["corner"].at(1).get<int>()};
  const int v = j.at("vertex").get<int>();
  if (v < 0 || v >= s.num_vertices()) throw GeometryError("slit site vertex out of range");
  return s.vertices()[v].corners.front();
}

struct Split {
  Slot minus, plus;  // slit sides with edge vectors -w and +w
};

// Splits the triangle at corner cn by the segment from the corner along w; returns the two slit sides.
Split split_at(FlatSurface& s, Corner cn, const Vec2q& w, std::vector<Corner>& pending, std::vector<int>& split) {
  const int k = cn.t, c = cn.c;
  const Triangle T = s.tri[k];
  const Vec2q Vc = T.corner(c), Vb = T.corner((c + 1) % 3), Vcc = T.corner((c + 2) % 3);
  const Vec2q P = Vc + w;
  if (sgn(cross(Vb - Vc, P - Vc)) <= 0 || sgn(cross(Vcc - Vb, P - Vb)) <= 0 || sgn(cross(Vc - Vcc, P - Vcc)) <= 0)
    throw GeometryError("slit collision");
  const int tb = s.num_triangles(), tc = tb + 1;
  const auto oldtw = s.twin[k];
  const auto oldsg = s.sign[k];
  auto f = [&](Slot x) -> Slot {
    if (x.t != k) return x;
    if (x.e == c) return {k, 0};
    if (x.e == (c + 1) % 3) return {tb, 0};
    return {tc, 0};
  };
  for (int u = 0; u < tb; ++u)
    for (int e = 0; e < 3; ++e)
      if (s.twin[u][e].t == k) s.twin[u][e] = f(s.twin[u][e]);
  s.tri[k].e = {Vb - Vc, P - Vb, Vc - P};
  s.tri.push_back({{Vcc - Vb, P - Vcc, Vb - P}});
  s.tri.push_back({{Vc - Vcc, P - Vc, Vcc - P}});
  s.twin.resize(tc + 1);
  s.sign.resize(tc + 1);
  const int src[3] = {c, (c + 1) % 3, (c + 2) % 3};
  const int dst[3] = {k, tb, tc};
  for (int j = 0; j < 3; ++j) {
    s.twin[dst[j]][0] = f(oldtw[src[j]]);
    s.sign[dst[j]][0] = oldsg[src[j]];
  }
  s.twin[k][1] = {tb, 2}, s.twin[tb][2] = {k, 1};
  s.twin[tb][1] = {tc, 2}, s.twin[tc][2] = {tb, 1};
  s.sign[k][1] = s.sign[tb][2] = s.sign[tb][1] = s.sign[tc][2] = 1;
  s.twin[k][2] = s.twin[tc][1] = {-1, -1};
  s.sign[k][2] = s.sign[tc][1] = 1;
  for (Corner& p : pending) {
    if (p.t != k) continue;
    if (p.c == c) p = {k, 0};
    else if (p.c == (c + 1) % 3) p = {k, 1};
    else p = {tc, 0};
  }
  split.push_back(k);
  return {{k, 2}, {tc, 1}};
}

void glue(FlatSurface& s, Slot a, Slot b) {
  const Vec2q &va = s.edge(a), &vb = s.edge(b);
  int sg = 0;
  if (va == -vb) sg = 1;
  else if (va == vb) sg = -1;
  else throw GeometryError("slit sides differ");
  s.twin[a.t][a.e] = b;
  s.twin[b.t][b.e] = a;
  s.sign[a.t][a.e] = s.sign[b.t][b.e] = sg;
}

void add_triangle(FlatSurface& s, const Vec2q& a, const Vec2q& b, const Vec2q& c) {
  s.tri.push_back({{b - a, c - b, a - c}});
  s.twin.push_back({Slot{-1, -1}, Slot{-1, -1}, Slot{-1, -1}});
  s.sign.push_back({1, 1, 1});
}

}  // namespace

FlatSurface marked_square_torus() {
  FlatSurface s;
  const Q h(1, 2);
  const Vec2q O00{Q(0), Q(0)}, O10{Q(1), Q(0)}, O11{Q(1), Q(1)}, O01{Q(0), Q(1)}, M{h, h};
  const Vec2q ring[4] = {O00, O10, O11, O01};
  for (int i = 0; i < 4; ++i) {
    const Vec2q& a = ring[i];
    const Vec2q& b = ring[(i + 1) % 4];
    s.tri.push_back({{b - a, M - b, a - M}});
  }
  s.twin.resize(4);
  s.sign.assign(4, {1, 1, 1});
  for (int i = 0; i < 4; ++i) {
    s.twin[i][1] = {(i + 1) % 4, 2};
    s.twin[(i + 1) % 4][2] = {i, 1};
    s.twin[i][0] = {(i + 2) % 4, 0};
  }
  s.build_index();
  s.marked = {s.vertex_of({0, 2})};
  s.build_index();
  s.labels["name"] = "square torus, centre marked";
  s.labels["torus_basis"] = {{1, 0}, {0, 1}};
  return s;
}

MixedStructure two_tori_mixed(const Q& s) {
  MixedStructure eta;
  eta.pieces = {{"T1", marked_square_torus()}, {"T2", marked_square_torus()}};
  eta.lambda.push_back({"core", s, 0, 1, {2, 2}, {2, 2}});
  const Q eta_off(1, 8), h(1, 2);
  auto sv = [](Q x, Q y, Q px = 0, Q py = 0) { return ScaledVec{{x, y}, {px, py}}; };
  // once around each torus through the cylinder: v2 in T2 then v1 in T1
  auto crossing = [&](const std::string& name, long p1, long q1, long p2, long q2) {
    TestClassSpec c;
    c.name = name;
    c.relation = Relation::Crossing;
    c.lambda_crossings = {2};
    c.flat_parts = {{0, {Q(p1), Q(q1)}}, {1, {Q(p2), Q(q2)}}};
    c.start_piece = 0;
    c.start_triangle = 3;  // corner 0 is (0,1)
    c.start_point = sv(h - eta_off, h - 1, 0, h);
    c.steps = {sv(2 * eta_off, 0, 0, 0), sv(Q(p2) - 2 * eta_off, Q(q2)), sv(2 * eta_off, 0), sv(Q(p1) - 2 * eta_off, Q(q1))};
    return c;
  };
  for (auto [p1, q1, p2, q2] :
       {std::array<long, 4>{1, 0, 1, 0}, {0, 1, 1, 0}, {1, 0, 0, 1}, {2, 1, 1, 0}, {1, 0, 1, 2}}) {
    eta.classes.push_back(crossing("cross(" + std::to_string(p1) + "," + std::to_string(q1) + ";" +
                                       std::to_string(p2) + "," + std::to_string(q2) + ")",
                                   p1, q1, p2, q2));
  }
  // the cylinder crossing runs across its height in both crossing steps
  for (auto& c : eta.classes) {
    c.steps[0].base.x += s;
    c.steps[2].base.x += s;
  }
  TestClassSpec in;
  in.name = "horizontal in T1";
  in.relation = Relation::Contained;
  in.lambda_crossings = {0};
  in.flat_parts = {{0, {Q(1), Q(0)}}};
  in.start_piece = 0;
  in.start_triangle = 0;
  in.start_point = sv(h, Q(1, 4));
  in.steps = {sv(1, 0)};
  eta.classes.push_back(in);
  TestClassSpec core;
  core.name = "core";
  core.relation = Relation::Disjoint;
  core.lambda_crossings = {0};
  core.core_of = 0;
  eta.classes.push_back(core);
  return eta;
}

MixedStructure mixed_from_json(const nlohmann::json& j, const std::string& base_dir) {
  MixedStructure eta;
  for (const auto& p : j.at("pieces")) {
    std::filesystem::path f = p.at("file").get<std::string>();
    if (f.is_relative()) f = std::filesystem::path(base_dir) / f;
    eta.pieces.push_back({p.value("name", f.stem().string()), load_surface(f.string())});
  }
  if (j.contains("slit_direction")) eta.slit_direction = json_vec(j["slit_direction"]);
  for (const auto& l : j.at("lambda")) {
    WeightedCurve w;
    w.name = l.value("name", "lambda" + std::to_string(eta.lambda.size()));
    w.weight = json_q(l.at("weight"));
    if (sgn(w.weight) <= 0) throw GeometryError("lambda weight must be positive");
    const auto& sites = l.at("sites");
    if (sites.size() != 2) throw GeometryError("a lambda curve needs two slit sites");
    w.site_a = json_site(eta, sites[0], w.piece_a);
    w.site_b = json_site(eta, sites[1], w.piece_b);
    eta.lambda.push_back(w);
  }
  for (const auto& c : j.value("classes", nlohmann::json::array())) {
    TestClassSpec t;
    t.name = c.at("name").get<std::string>();
    t.relation = json_relation(c.value("relation", "disjoint"));
    t.lambda_crossings = c.value("lambda_crossings", std::vector<int>{});
    t.core_of = c.value("core_of", -1);
    for (const auto& f : c.value("flat_parts", nlohmann::json::array()))
      t.flat_parts.push_back({f.at("piece").get<int>(), json_vec(f.at("holonomy"))});
    if (c.contains("start")) {
      t.start_piece = c["start"].at("piece").get<int>();
      t.start_triangle = c["start"].at("triangle").get<int>();
      t.start_point = json_scaled(c["start"].at("point"));
    }
    for (const auto& s : c.value("steps", nlohmann::json::array())) t.steps.push_back(json_scaled(s));
    eta.classes.push_back(t);
  }
  return eta;
}

Degeneration degeneration_family(const MixedStructure& eta, int n) {
  if (n < 1) throw GeometryError("n must be at least 1");
  if (eta.pieces.empty()) throw GeometryError("no flat pieces");
  if (eta.slit_direction.is_zero()) throw GeometryError("zero slit direction");
  Degeneration d;
  d.n = n;
  d.slit = Q(1, static_cast<long>(n) * n);
  FlatSurface& S = d.surface;
  std::vector<Corner> marked_corners;
  for (const auto& p : eta.pieces) {
    const int off = S.num_triangles();
    d.piece_offset.push_back(off);
    for (int t = 0; t < p.surface.num_triangles(); ++t) {
      S.tri.push_back(p.surface.tri[t]);
      auto tw = p.surface.twin[t];
      for (auto& x : tw) x.t += off;
      S.twin.push_back(tw);
      S.sign.push_back(p.surface.sign[t]);
    }
    for (int m : p.surface.marked) {
      const Corner c = p.surface.vertices()[m].corners.front();
      marked_corners.push_back({c.t + off, c.c});
    }
  }
  S.build_index();
  for (const Corner& c : marked_corners) S.marked.push_back(S.vertex_of(c));
  S.build_index();
  std::set<int> site_vertices;
  // pending corners: slit sites first (a then b per curve), then marked corners
  std::vector<Corner> pending;
  std::vector<Vec2q> dirs;
  for (const auto& w : eta.lambda) {
    for (auto [piece, site] : {std::pair{w.piece_a, w.site_a}, std::pair{w.piece_b, w.site_b}}) {
      const Corner g{site.t + d.piece_offset.at(piece), site.c};
      if (!S.is_marked(S.vertex_of(g))) throw GeometryError("slit site is not a marked point");
      if (!site_vertices.insert(S.vertex_of(g)).second) throw GeometryError("slit collision");
      auto [cn, v] = sector_of(S, g, eta.slit_direction);
      pending.push_back(cn);
      dirs.push_back(v);
    }
  }
  std::vector<Corner> keep;
  for (const Corner& c : marked_corners)
    if (!site_vertices.count(S.vertex_of(c))) keep.push_back(c);
  const size_t nsites = pending.size();
  pending.insert(pending.end(), keep.begin(), keep.end());
  std::vector<Split> sides;
  for (size_t i = 0; i < nsites; ++i) {
    const Corner cn = pending[i];
    sides.push_back(split_at(S, cn, dirs[i] * d.slit, pending, d.split_triangles));
  }
  for (size_t i = 0; i < eta.lambda.size(); ++i) {
    const Vec2q w = dirs[2 * i] * d.slit;
    const Vec2q nu = Vec2q{dirs[2 * i].y, -dirs[2 * i].x} * eta.lambda[i].weight;
    const int c0 = S.num_triangles();
    const Vec2q W0{}, W1 = w, W2 = w * Q(2), E0 = nu, E1 = nu + w, E2 = nu + w * Q(2);
    add_triangle(S, W0, E0, E1);
    add_triangle(S, W0, E1, W1);
    add_triangle(S, W1, E1, E2);
    add_triangle(S, W1, E2, W2);
    glue(S, {c0, 2}, {c0 + 1, 0});
    glue(S, {c0 + 1, 1}, {c0 + 2, 0});
    glue(S, {c0 + 2, 2}, {c0 + 3, 0});
    glue(S, {c0, 0}, {c0 + 3, 1});
    const Split& A = sides[2 * i];
    const Split& B = sides[2 * i + 1];
    glue(S, {c0 + 1, 2}, A.plus);
    glue(S, {c0 + 3, 2}, A.minus);
    glue(S, {c0, 1}, B.minus);
    glue(S, {c0 + 2, 1}, B.plus);
  }
  S.marked.clear();
  S.build_index();
  for (size_t i = nsites; i < pending.size(); ++i) S.marked.push_back(S.vertex_of(pending[i]));
  std::sort(S.marked.begin(), S.marked.end());
  S.marked.erase(std::unique(S.marked.begin(), S.marked.end()), S.marked.end());
  S.build_index();
  for (size_t i = 0; i < eta.lambda.size(); ++i) {
    const Vec2q w = dirs[2 * i] * d.slit;
    const Vec2q nu = Vec2q{dirs[2 * i].y, -dirs[2 * i].x} * eta.lambda[i].weight;
    const int c0 = S.num_triangles() - 4 * static_cast<int>(eta.lambda.size() - i);
    CurveClass core = straight_closed_curve(S, c0, nu * Q(1, 2) + w * Q(1, 4), w * Q(2));
    core.name = eta.lambda[i].name;
    d.cores.push_back(core);
  }
  d.raw_area = surface_area(S).get_d();
  S.labels["name"] = "degeneration n=" + std::to_string(n);
  S.labels["slit"] = to_string(d.slit);
  return d;
}

CurveClass realize_class(const MixedStructure& eta, const Degeneration& d, int index) {
  if (index < 0 || index >= static_cast<int>(eta.classes.size())) throw GeometryError("declare decomposition");
  const TestClassSpec& c = eta.classes[index];
  if (c.core_of >= 0) {
    if (c.core_of >= static_cast<int>(d.cores.size())) throw GeometryError("core index out of range");
    return d.cores[c.core_of];
  }
  if (c.steps.empty()) throw GeometryError("declare decomposition");
  const FlatSurface& S = d.surface;
  const int t0 = d.piece_offset.at(c.start_piece) + c.start_triangle;
  if (std::count(d.split_triangles.begin(), d.split_triangles.end(), t0))
    throw GeometryError("test class starts in a slit triangle");
  const Vec2q p0 = c.start_point.at(d.slit);
  int t = t0;
  Vec2q p = p0;
  int flip = 1;
  std::vector<Slot> xs;
  for (const auto& st : c.steps) {
    const Vec2q v = signed_vec(flip, st.at(d.slit));
    const TraceResult r = trace_from_point(S, t, p, v);
    if (r.stop != TraceResult::Stop::Done) throw GeometryError("test class runs into a vertex");
    for (const auto& h : r.hits) xs.push_back(h.exit);
    if (r.end_dir != v && sgn(dot(r.end_dir, v)) < 0) flip = -flip;
    t = r.end_t;
    p = r.end_p;
  }
  if (t != t0 || p != p0) throw GeometryError("test class does not close up");
  CurveClass out = reduce(S, CurveClass::closed_curve(std::move(xs), c.name));
  if (out.crossings.empty()) throw TrivialClass("trivial test class");
  return out;
}

double mixed_pairing(const MixedStructure& eta, int index) {
  if (index < 0 || index >= static_cast<int>(eta.classes.size())) throw GeometryError("declare decomposition");
  const TestClassSpec& c = eta.classes[index];
  if (c.core_of < 0 && c.flat_parts.empty() && c.lambda_crossings.empty()) throw GeometryError("declare decomposition");
  double v = 0;
  for (size_t i = 0; i < c.lambda_crossings.size() && i < eta.lambda.size(); ++i)
    v += eta.lambda[i].weight.get_d() * c.lambda_crossings[i];
  for (const auto& f : c.flat_parts) v += f.holonomy.norm();
  return v;
}

double mixed_self_pairing(const MixedStructure& eta, long quad_n) {
  // lambda is a multicurve of boundary-type cores: I(lambda, lambda) = 0 and I(lambda, flat part) = 0
  double area = 0, acc = 0;
  for (const auto& p : eta.pieces) {
    area += surface_area(p.surface).get_d();
    LiouvillePairing L(p.surface, EvalMode::quadrature(quad_n));
    acc += liouville_pairing(L, L).value;
  }
  return acc / area;
}

}  // namespace flatspec
