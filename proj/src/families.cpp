#include "flatspec/families.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "flatspec/trace.hpp"

namespace flatspec {

namespace {

constexpr const char* kDeltaBranches[] = {"A1", "A2", "B1", "B2", "alpha", "alpha'", "alpha''", "beta", "beta'", "beta''"};

struct EndSpec {
  const char* branch;
  int end;
};

// Ends at a1, a2, b1, b2: the lone outgoing end first.
struct SwitchSpec {
  const char* id;
  EndSpec out;
  std::array<EndSpec, 4> in;
};

constexpr SwitchSpec kDeltaSwitches[] = {
    {"a1", {"A1", 0}, {{{"A2", 0}, {"alpha", 1}, {"beta'", 0}, {"beta''", 0}}}},
    {"a2", {"A2", 1}, {{{"A1", 1}, {"alpha", 0}, {"alpha'", 1}, {"alpha''", 1}}}},
    {"b1", {"B2", 0}, {{{"B1", 0}, {"beta", 1}, {"alpha'", 0}, {"alpha''", 0}}}},
    {"b2", {"B1", 1}, {{{"B2", 1}, {"beta", 0}, {"beta'", 1}, {"beta''", 1}}}},
};

// Offset of the top special vertex over the bottom one and the height of a cylinder of circumference c
// whose left and right diagonals have lengths l1, l2.
std::pair<double, double> solve_cylinder(double c, double l1, double l2) {
  const double o = (l2 * l2 - l1 * l1) / (2 * c) - c / 2;
  const double h2 = l1 * l1 - o * o;
  if (!(c > 0) || !(h2 > 0)) throw GeometryError("degenerate block");
  return {o, std::sqrt(h2)};
}

}  // namespace

double embedding_bound(double t) { return t / 4; }

TrainTrack delta_track() {
  TrainTrack tt;
  for (const char* b : kDeltaBranches) tt.branches.push_back(b);
  for (const auto& sw : kDeltaSwitches) {
    Switch s;
    s.id = sw.id;
    s.out.push_back({tt.branch_index(sw.out.branch), sw.out.end});
    for (const auto& e : sw.in) s.in.push_back({tt.branch_index(e.branch), e.end});
    tt.switches.push_back(s);
  }
  tt.validate();
  return tt;
}

std::vector<LinearRelation> delta_relations() {
  // A1 + alpha - B1 - beta, A2 + alpha - B2 - beta
  LinearRelation c1{QVec(10, Q(0)), 0}, c2{QVec(10, Q(0)), 0};
  c1.coeffs[0] = 1, c1.coeffs[4] = 1, c1.coeffs[2] = -1, c1.coeffs[7] = -1;
  c2.coeffs[1] = 1, c2.coeffs[4] = 1, c2.coeffs[3] = -1, c2.coeffs[7] = -1;
  return {c1, c2};
}

std::vector<double> published_table(double e, double d) {
  return {-e + d, e - d, -e + d, e - d, e + d, 2 * e, 2 * e, e + d, 2 * d, 2 * d};
}

QVec delta_perturbation(const Q& eps, const Q& delta) {
  const TrainTrack tt = delta_track();
  const auto M = switch_matrix(tt);
  const QVec x{eps, delta, delta, eps};
  QVec d(10, Q(0));
  for (size_t k = 0; k < M.size(); ++k)
    for (size_t b = 0; b < 10; ++b) d[b] += x[k] * M[k][b];
  return d;
}

BlockData build_block(const BlockSpec& spec) {
  if (!(spec.t > 0)) throw GeometryError("block scale t must be positive");
  if (std::abs(spec.eps) + std::abs(spec.delta) >= embedding_bound(spec.t)) throw GeometryError("degenerate block");
  BlockData out;
  out.spec = spec;
  const double t = spec.t;
  if (spec.kind == BlockKind::Sigma102) {
    out.track = delta_track();
    const QVec d = delta_perturbation(rationalize(spec.eps), rationalize(spec.delta));
    const double base[10] = {t, t, t, t, t, std::sqrt(2.0) * t, std::sqrt(2.0) * t, t, std::sqrt(2.0) * t,
                             std::sqrt(2.0) * t};
    for (int b = 0; b < 10; ++b) out.track.lengths.push_back(base[b] + d[b].get_d());
    const auto& L = out.track.lengths;
    // C1: top alpha|A1, bottom beta|B1, diagonals alpha', alpha''; C2: bottom alpha|A2, top beta|B2, beta', beta''.
    for (auto [top, diag1, diag2] : {std::array<int, 3>{0, 5, 6}, std::array<int, 3>{1, 8, 9}}) {
      const double c = L[4] + L[top];
      auto [o, h] = solve_cylinder(c, L[diag1], L[diag2]);
      out.cylinders.push_back({c, h, o});
      out.area += c * h;
    }
    return out;
  }
  // Sigma101: parallelogram u = (2t, 0), v = (t/2, 2t) with a slit of length t/2 and slope -1 from the lattice point.
  // Branches sigma+ sigma- alpha beta gamma; alpha, beta, gamma run from the slit end to u, v, u+v.
  TrainTrack tt;
  tt.branches = {"sigma+", "sigma-", "alpha", "beta", "gamma"};
  Switch p{"p", {{0, 0}}, {{1, 1}, {2, 0}, {3, 0}, {4, 0}}};
  Switch q{"q", {{1, 0}}, {{0, 1}, {2, 1}, {3, 1}, {4, 1}}};
  tt.switches = {p, q};
  tt.validate();
  const double r = t / 2;
  auto lengths_at = [&](double a, double vx, double vy, double phi) {
    const Vec2 s{r * std::cos(phi), r * std::sin(phi)};
    const Vec2 u{a, 0}, v{vx, vy};
    return std::array<double, 3>{(u - s).norm(), (v - s).norm(), (u + v - s).norm()};
  };
  const double phi0 = -kPi / 4;
  const auto l0 = lengths_at(2 * t, t / 2, 2 * t, phi0);
  // the common length change eps; delta turns the slit, and the parallelogram is re-solved by Newton
  const double phi = phi0 + spec.delta / t;
  std::array<double, 3> x{2 * t, t / 2, 2 * t};
  for (int it = 0; it < 100; ++it) {
    auto f = lengths_at(x[0], x[1], x[2], phi);
    std::array<double, 3> res{f[0] - l0[0] - spec.eps, f[1] - l0[1] - spec.eps, f[2] - l0[2] - spec.eps};
    if (std::abs(res[0]) + std::abs(res[1]) + std::abs(res[2]) < 1e-15) break;
    double J[3][3];
    for (int k = 0; k < 3; ++k) {
      auto y = x;
      const double hstep = 1e-7;
      y[k] += hstep;
      auto g = lengths_at(y[0], y[1], y[2], phi);
      for (int i = 0; i < 3; ++i) J[i][k] = (g[i] - f[i]) / hstep;
    }
    // solve J dx = -res by Cramer
    auto det3 = [](double m[3][3]) {
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double D = det3(J);
    if (std::abs(D) < 1e-300) throw GeometryError("degenerate block");
    for (int k = 0; k < 3; ++k) {
      double m[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = j == k ? -res[i] : J[i][j];
      x[k] += det3(m) / D;
    }
  }
  const auto f = lengths_at(x[0], x[1], x[2], phi);
  tt.lengths = {r, r, f[0], f[1], f[2]};
  out.track = tt;
  out.u = {x[0], 0};
  out.v = {x[1], x[2]};
  out.slit = {r * std::cos(phi), r * std::sin(phi)};
  if (!(x[0] > 0) || !(x[2] > 0)) throw GeometryError("degenerate block");
  out.area = x[0] * x[2];
  return out;
}

namespace {

// Triangles given by their corner positions and keyed half-edges; equal keys are glued.
struct HalfEdge {
  std::string key, from, to;
};

struct Builder {
  struct Tri {
    std::array<Vec2q, 3> p;
    std::array<HalfEdge, 3> he;
  };
  std::vector<Tri> tris;

  void add(const Vec2q& a, const Vec2q& b, const Vec2q& c, HalfEdge e0, HalfEdge e1, HalfEdge e2) {
    if (sgn(cross(b - a, c - a)) <= 0) throw GeometryError("degenerate block");
    tris.push_back({{a, b, c}, {std::move(e0), std::move(e1), std::move(e2)}});
  }

  FlatSurface build() const {
    FlatSurface s;
    std::map<std::string, std::vector<Slot>> by_key;
    for (size_t t = 0; t < tris.size(); ++t) {
      Triangle T;
      for (int j = 0; j < 3; ++j) {
        T.e[j] = tris[t].p[(j + 1) % 3] - tris[t].p[j];
        by_key[tris[t].he[j].key].push_back({static_cast<int>(t), j});
      }
      s.tri.push_back(T);
    }
    s.twin.assign(tris.size(), {});
    s.sign.assign(tris.size(), {1, 1, 1});
    for (const auto& [key, sl] : by_key) {
      if (sl.size() != 2) throw GeometryError("edge " + key + " is not glued in a pair");
      const auto& h0 = tris[sl[0].t].he[sl[0].e];
      const auto& h1 = tris[sl[1].t].he[sl[1].e];
      if (h0.from != h1.to || h0.to != h1.from) throw GeometryError("edge " + key + " glued with mismatched ends");
      const Vec2q& v0 = s.tri[sl[0].t].e[sl[0].e];
      const Vec2q& v1 = s.tri[sl[1].t].e[sl[1].e];
      int sg = 0;
      if (v0 == -v1) sg = 1;
      else if (v0 == v1) sg = -1;
      else throw GeometryError("edge " + key + " glued with different lengths");
      s.twin[sl[0].t][sl[0].e] = sl[1];
      s.twin[sl[1].t][sl[1].e] = sl[0];
      s.sign[sl[0].t][sl[0].e] = sg;
      s.sign[sl[1].t][sl[1].e] = sg;
    }
    s.build_index();
    return s;
  }

  Slot slot_of(const std::string& key, const std::string& from) const {
    for (size_t t = 0; t < tris.size(); ++t)
      for (int j = 0; j < 3; ++j)
        if (tris[t].he[j].key == key && tris[t].he[j].from == from) return {static_cast<int>(t), j};
    throw GeometryError("no half-edge " + key + " from " + from);
  }
};

// Cylinder with bottom vertices at bx (bx[0] = 0, bx.back() = c) and top vertices at sigma + tx, height h.
// The bottom special vertex bx[kb] joins the top special vertex (tx[0], repeated at tx.back()) by two diagonals.
void add_cylinder(Builder& B, const std::string& name, const std::vector<Q>& bx, const std::vector<std::string>& blab,
                  const std::vector<std::string>& bkey, int kb, const Q& sigma, const std::vector<Q>& tx,
                  const std::vector<std::string>& tlab, const std::vector<std::string>& tkey, const Q& h,
                  const std::string& left, const std::string& right) {
  const int m = static_cast<int>(bx.size()) - 1, n = static_cast<int>(tx.size()) - 1;
  const Q c = bx[m];
  if (tx[n] != c) throw GeometryError("cylinder boundaries differ in length");
  const Vec2q P{bx[kb], 0};
  auto Qt = [&](int j) { return Vec2q{sigma + tx[j], h}; };
  auto up = [&](int j) { return name + ":u" + std::to_string(j); };
  auto lo = [&](int k) { return name + ":l" + std::to_string(k); };
  for (int j = 0; j < n; ++j)
    B.add(P, Qt(j + 1), Qt(j), {j + 1 == n ? right : up(j + 1), blab[kb], tlab[j + 1]},
          {tkey[j], tlab[j + 1], tlab[j]}, {j == 0 ? left : up(j), tlab[j], blab[kb]});
  const Vec2q A = Qt(n);
  auto Bp = [&](int k) { return k <= m ? Vec2q{bx[k], 0} : Vec2q{bx[k - m] + c, 0}; };
  for (int k = kb; k < kb + m; ++k)
    B.add(Bp(k), Bp(k + 1), A, {bkey[k % m], blab[k % m], blab[(k + 1) % m]},
          {k + 1 == kb + m ? left : lo(k + 1), blab[(k + 1) % m], tlab[n]}, {k == kb ? right : lo(k), tlab[n], blab[k % m]});
}

std::string ix(const std::string& s, int i) { return s + "_" + std::to_string(i); }

TrainTrack assembled_track(int blocks) {
  TrainTrack tt;
  const char* names[] = {"S1", "S2", "S3", "S4", "alpha", "alpha'", "alpha''", "beta", "beta'", "beta''"};
  for (int i = 0; i < blocks; ++i)
    for (const char* n : names) tt.branches.push_back(ix(n, i));
  auto br = [&](const char* n, int i) { return tt.branch_index(ix(n, ((i % blocks) + blocks) % blocks)); };
  for (int i = 0; i < blocks; ++i) {
    const int p = i - 1;  // the circle on the b-side of block i belongs to block i-1
    tt.switches.push_back({ix("a1", i), {{br("S4", i), 1}, {br("alpha", i), 1}, {br("beta'", i), 0}, {br("beta''", i), 0}},
                           {{br("S1", i), 0}}});
    tt.switches.push_back({ix("a2", i), {{br("S2", i), 1}, {br("alpha", i), 0}, {br("alpha'", i), 1}, {br("alpha''", i), 1}},
                           {{br("S3", i), 0}}});
    tt.switches.push_back({ix("b1", i), {{br("S2", p), 0}, {br("beta", i), 1}, {br("alpha'", i), 0}, {br("alpha''", i), 0}},
                           {{br("S1", p), 1}}});
    tt.switches.push_back({ix("b2", i), {{br("S4", p), 0}, {br("beta", i), 0}, {br("beta'", i), 1}, {br("beta''", i), 1}},
                           {{br("S3", p), 1}}});
  }
  tt.validate();
  return tt;
}

struct Plan {
  std::vector<Q> horiz;  // rational lengths of every branch (diagonals unused)
  std::vector<double> diag;
  std::vector<std::array<Q, 4>> cyl;  // per block: sigma1, h1, sigma2, h2
  double area = 0;
};

// Lengths from base t and switch potentials; cylinder shapes solved from the diagonals.
Plan make_plan(const TrainTrack& tt, int blocks, const Q& tq, double t, const QVec& x, int bits, bool exact_shape) {
  const auto M = switch_matrix(tt);
  const int nb = tt.num_branches();
  QVec d(nb, Q(0));
  for (size_t k = 0; k < M.size(); ++k)
    for (int b = 0; b < nb; ++b)
      if (M[k][b]) d[b] += x[k] * M[k][b];
  Plan pl;
  pl.horiz.resize(nb);
  pl.diag.assign(nb, 0);
  for (int i = 0; i < blocks; ++i) {
    const int o = 10 * i;
    for (int k = 0; k < 4; ++k) pl.horiz[o + k] = tq / 2 + d[o + k];
    pl.horiz[o + 4] = tq + d[o + 4];
    pl.horiz[o + 7] = tq + d[o + 7];
    for (int k : {5, 6, 8, 9}) pl.diag[o + k] = std::sqrt(2.0) * t + d[o + k].get_d();
  }
  for (int i = 0; i < blocks; ++i) {
    const int o = 10 * i, p = 10 * ((i + blocks - 1) % blocks);
    const Q c1 = pl.horiz[o + 4] + pl.horiz[o + 0] + pl.horiz[o + 1];
    const Q c1b = pl.horiz[o + 7] + pl.horiz[p + 1] + pl.horiz[p + 2];
    const Q c2 = pl.horiz[o + 4] + pl.horiz[o + 3] + pl.horiz[o + 2];
    const Q c2b = pl.horiz[o + 7] + pl.horiz[p + 0] + pl.horiz[p + 3];
    if (c1 != c1b || c2 != c2b) throw GeometryError("admissibility violation: cylinder boundaries differ");
    for (const Q* h : {&pl.horiz[o], &pl.horiz[o + 1], &pl.horiz[o + 2], &pl.horiz[o + 3], &pl.horiz[o + 4], &pl.horiz[o + 7]})
      if (sgn(*h) <= 0) throw GeometryError("degenerate block");
    auto [o1, h1] = solve_cylinder(c1.get_d(), pl.diag[o + 5], pl.diag[o + 6]);
    auto [o2, h2] = solve_cylinder(c2.get_d(), pl.diag[o + 8], pl.diag[o + 9]);
    pl.area += c1.get_d() * h1 + c2.get_d() * h2;
    if (exact_shape) {
      // sigma is the top special vertex position; the bottom special sits at beta (C1) or alpha (C2)
      pl.cyl.push_back({pl.horiz[o + 7] + rationalize(o1, bits), rationalize(h1, bits), pl.horiz[o + 4] + rationalize(o2, bits),
                        rationalize(h2, bits)});
    }
  }
  return pl;
}

QVec potentials_of(int blocks, const std::vector<double>& params, double shift, int bits) {
  QVec x;
  for (int i = 0; i < blocks; ++i) {
    const Q e = rationalize(params[2 * i] + shift, bits), d = rationalize(params[2 * i + 1] + shift, bits);
    x.insert(x.end(), {e, d, d, e});
  }
  return x;
}

AssembledFamily realize(int genus, const TrainTrack& tt, double t, const Q& tq, QVec x, int bits) {
  const int blocks = genus - 1;
  const Plan pl = make_plan(tt, blocks, tq, t, x, bits, true);
  Builder B;
  auto H = [&](const char* n, int i) { return pl.horiz[tt.branch_index(ix(n, ((i % blocks) + blocks) % blocks))]; };
  for (int i = 0; i < blocks; ++i) {
    const int p = i - 1, q = i + 1;
    auto lab = [&](const char* n, int j) { return ix(n, ((j % blocks) + blocks) % blocks); };
    auto key = [&](const char* n, int j) { return lab(n, j); };
    const Q al = H("alpha", i), be = H("beta", i);
    const auto& cy = pl.cyl[i];
    // C1: bottom b2 beta b1 S2_{i-1} a2_{i-1} S3_{i-1} b2; top a2 alpha a1 S1_i b1_{i+1} S2_i a2
    {
      const Q c = be + H("S2", p) + H("S3", p);
      add_cylinder(B, ix("C1", i), {Q(0), be, be + H("S2", p), c}, {lab("b2", i), lab("b1", i), lab("a2", p), lab("b2", i)},
                   {key("beta", i), key("S2", p), key("S3", p)}, 1, cy[0], {Q(0), al, al + H("S1", i), c},
                   {lab("a2", i), lab("a1", i), lab("b1", q), lab("a2", i)}, {key("alpha", i), key("S1", i), key("S2", i)},
                   cy[1], key("alpha'", i), key("alpha''", i));
    }
    // C2: bottom a2 alpha a1 S4_i b2_{i+1} S3_i a2; top b2 beta b1 S1_{i-1} a1_{i-1} S4_{i-1} b2
    {
      const Q c = al + H("S4", i) + H("S3", i);
      add_cylinder(B, ix("C2", i), {Q(0), al, al + H("S4", i), c}, {lab("a2", i), lab("a1", i), lab("b2", q), lab("a2", i)},
                   {key("alpha", i), key("S4", i), key("S3", i)}, 1, cy[2], {Q(0), be, be + H("S1", p), c},
                   {lab("b2", i), lab("b1", i), lab("a1", p), lab("b2", i)}, {key("beta", i), key("S1", p), key("S4", p)},
                   cy[3], key("beta'", i), key("beta''", i));
    }
  }
  AssembledFamily fam;
  fam.genus = genus;
  fam.t = t;
  fam.offset = t / 2;
  fam.surface = B.build();
  fam.track = tt;
  // branch starts: S1 a1_i, S2 b1_{i+1}, S3 a2_i, S4 b2_{i+1}, alpha a2, alpha' alpha'' b1, beta b2, beta' beta'' a1
  const std::pair<const char*, std::pair<const char*, int>> starts[] = {
      {"S1", {"a1", 0}},    {"S2", {"b1", 1}},     {"S3", {"a2", 0}},   {"S4", {"b2", 1}},    {"alpha", {"a2", 0}},
      {"alpha'", {"b1", 0}}, {"alpha''", {"b1", 0}}, {"beta", {"b2", 0}}, {"beta'", {"a1", 0}}, {"beta''", {"a1", 0}}};
  fam.track.embedding.assign(tt.num_branches(), {});
  for (int i = 0; i < blocks; ++i)
    for (const auto& [n, st] : starts) {
      const std::string from = ix(st.first, ((i + st.second) % blocks + blocks) % blocks);
      fam.track.embedding[tt.branch_index(ix(n, i))] = {B.slot_of(ix(n, i), from)};
    }
  fam.track.lengths = embedded_lengths(fam.surface, fam.track);
  fam.potentials = std::move(x);
  nlohmann::json br = nlohmann::json::object();
  for (int b = 0; b < tt.num_branches(); ++b) {
    const Slot sl = fam.track.embedding[b][0];
    br[tt.branches[b]] = {sl.t, sl.e};
  }
  fam.surface.labels["name"] = "genus " + std::to_string(genus) + " block assembly";
  fam.surface.labels["branches"] = br;
  fam.surface.labels["gluing_offset"] = fmt17(fam.offset);
  return fam;
}

double plan_area(const TrainTrack& tt, int blocks, double t, const std::vector<double>& params, double shift, int bits) {
  return make_plan(tt, blocks, rationalize(t, bits), t, potentials_of(blocks, params, shift, bits), bits, false).area;
}

}  // namespace

AssembledFamily assemble_closed(int genus, const std::vector<double>& params, const AssembleOptions& opt) {
  if (genus < 2) throw GeometryError("genus must be at least 2");
  const int blocks = genus - 1;
  if (static_cast<int>(params.size()) != 2 * blocks)
    throw GeometryError("parameter vector must have length 2(g-1)");
  const double t = 1 / (2 * std::sqrt(static_cast<double>(blocks)));
  const double bound = embedding_bound(t);
  for (int i = 0; i < blocks; ++i)
    if (std::abs(params[2 * i]) + std::abs(params[2 * i + 1]) >= bound) throw GeometryError("degenerate block");
  const TrainTrack tt = assembled_track(blocks);
  double shift = 0;
  const double a0 = plan_area(tt, blocks, t, params, 0, opt.bits);
  if (opt.unit_area) {
    // Newton on a common shift of every parameter; the area gradient along it is nonzero
    double a = a0;
    for (int it = 0; it < 60 && std::abs(a - 1) > 1e-15; ++it) {
      const double h = 1e-7;
      const double ap = plan_area(tt, blocks, t, params, shift + h, 60);
      const double am = plan_area(tt, blocks, t, params, shift - h, 60);
      const double step = (a - 1) / ((ap - am) / (2 * h));
      shift -= step;
      a = plan_area(tt, blocks, t, params, shift, 60);
      if (std::abs(step) < 1e-17) break;
    }
    for (int i = 0; i < blocks; ++i)
      if (std::abs(params[2 * i] + shift) + std::abs(params[2 * i + 1] + shift) >= bound)
        throw GeometryError("degenerate block");
  }
  AssembledFamily fam = realize(genus, tt, t, rationalize(t, opt.bits), potentials_of(blocks, params, shift, opt.bits), opt.bits);
  fam.params = params;
  fam.slice_shift = shift;
  fam.raw_area = a0;
  for (double p : params) fam.effective.push_back(p + shift);
  fam.surface.labels["params"] = params;
  fam.surface.labels["slice_shift"] = fmt17(shift);
  return fam;
}

AssembledFamily deform(const AssembledFamily& fam, const std::vector<double>& params) {
  return assemble_closed(fam.genus, params);
}

std::vector<LinearRelation> assembled_relations(const AssembledFamily& fam) {
  const TrainTrack& tt = fam.track;
  const int blocks = fam.blocks(), nb = tt.num_branches();
  std::vector<LinearRelation> out;
  auto b = [&](const char* n, int i) { return tt.branch_index(ix(n, ((i % blocks) + blocks) % blocks)); };
  for (int i = 0; i < blocks; ++i) {
    LinearRelation c1{QVec(nb, Q(0)), 0}, c2{QVec(nb, Q(0)), 0};
    // C1: alpha + S1_i + S2_i = beta + S2_{i-1} + S3_{i-1}
    for (int k : {b("alpha", i), b("S1", i), b("S2", i)}) c1.coeffs[k] += 1;
    for (int k : {b("beta", i), b("S2", i - 1), b("S3", i - 1)}) c1.coeffs[k] -= 1;
    // C2: alpha + S4_i + S3_i = beta + S1_{i-1} + S4_{i-1}
    for (int k : {b("alpha", i), b("S4", i), b("S3", i)}) c2.coeffs[k] += 1;
    for (int k : {b("beta", i), b("S1", i - 1), b("S4", i - 1)}) c2.coeffs[k] -= 1;
    out.push_back(c1);
    out.push_back(c2);
  }
  return out;
}

AssembledFamily deform_lengths(const AssembledFamily& fam, const QVec& d) {
  const TrainTrack& tt = fam.track;
  const int nb = tt.num_branches(), ns = tt.num_switches();
  if (static_cast<int>(d.size()) != nb) throw GeometryError("length change size mismatch");
  for (const auto& r : assembled_relations(fam))
    if (sgn(dot(r.coeffs, d)) != 0) throw GeometryError("admissibility violation");
  // potentials x with M^T x = d
  const auto M = switch_matrix_q(tt);
  QMatrix Mt(nb, QVec(ns));
  for (int k = 0; k < ns; ++k)
    for (int b = 0; b < nb; ++b) Mt[b][k] = M[k][b];
  auto y = solve(Mt, d, ns);
  if (!y) throw GeometryError("admissibility violation");
  QVec x = fam.potentials;
  for (int k = 0; k < ns; ++k) x[k] += (*y)[k];
  const int bits = 50;
  AssembledFamily out = realize(fam.genus, tt, fam.t, rationalize(fam.t, bits), x, bits);
  out.params = fam.params;
  out.effective = fam.effective;
  out.slice_shift = fam.slice_shift;
  out.raw_area = surface_area(out.surface).get_d();
  return out;
}

std::pair<int, int> family_dimensions(const AssembledFamily& fam) {
  const auto basis = admissible_perturbations(fam.track, assembled_relations(fam));
  const int dim = static_cast<int>(basis.size());
  // the area gradient along the admissible directions decides the slice codimension
  const int blocks = fam.blocks();
  bool moves = false;
  for (int k = 0; k < 2 * blocks && !moves; ++k) {
    std::vector<double> p(2 * blocks, 0.0), m(2 * blocks, 0.0);
    p[k] = 1e-6;
    m[k] = -1e-6;
    const double ap = plan_area(fam.track, blocks, fam.t, p, 0, 60);
    const double am = plan_area(fam.track, blocks, fam.t, m, 0, 60);
    moves = std::abs(ap - am) > 1e-12;
  }
  return {dim, moves ? dim - 1 : dim};
}

std::vector<std::pair<Circuit, CurveClass>> carried_panel(const AssembledFamily& fam, int count, int max_steps) {
  std::vector<std::pair<Circuit, CurveClass>> out;
  for (const auto& c : enumerate_circuits(fam.track, max_steps, 4 * count)) {
    if (static_cast<int>(out.size()) >= count) break;
    try {
      out.push_back({c, circuit_curve(fam.surface, fam.track, c)});
    } catch (const TrivialClass&) {
    }
  }
  return out;
}

std::vector<CurveClass> circumference_panel(const AssembledFamily& fam) {
  const TrainTrack& tt = fam.track;
  std::vector<CurveClass> out;
  for (int i = 0; i < fam.blocks(); ++i) {
    auto b = [&](const char* n) { return tt.branch_index(ix(n, i)); };
    // pushed into C1; the left side of the forward circuit runs outside it
    out.push_back(circuit_curve(fam.surface, tt, {{b("S2"), false}, {b("S1"), false}, {b("alpha"), false}}));
    out.push_back(circuit_curve(fam.surface, tt, {{b("alpha"), true}, {b("S4"), false}, {b("S3"), false}}));
    out.back().name = ix("C2", i);
    out[out.size() - 2].name = ix("C1", i);
  }
  return out;
}

IsospectralReport verify_isospectral(const AssembledFamily& a, const AssembledFamily& b,
                                     const std::vector<CurveClass>& panel, double threshold, double tol) {
  IsospectralReport rep;
  for (const auto& c : panel) {
    PanelDelta row;
    row.name = c.name;
    row.length_a = flat_length(a.surface, c);
    row.length_b = flat_length(b.surface, c);
    row.delta = std::abs(row.length_a - row.length_b);
    row.carried = carrying_weights(a.surface, a.track, c).has_value();
    rep.max_delta = std::max(rep.max_delta, row.delta);
    if (row.carried) rep.max_carried_delta = std::max(rep.max_carried_delta, row.delta);
    else if (row.delta > threshold) rep.witnesses.push_back(row.name);
    rep.rows.push_back(row);
  }
  rep.isometry_suspect = !panel.empty() && rep.max_delta <= tol;
  return rep;
}

GridReport family_grid(int genus, int n, const std::vector<CurveClass>& carried, const std::vector<CurveClass>& other,
                       bool parallel) {
  const double t = 1 / (2 * std::sqrt(static_cast<double>(genus - 1)));
  const double r = t / 9;
  const AssembledFamily base = assemble_closed(genus, std::vector<double>(2 * (genus - 1), 0.0));
  std::vector<double> l0c, l0o;
  for (const auto& c : carried) l0c.push_back(flat_length(base.surface, c));
  for (const auto& c : other) l0o.push_back(flat_length(base.surface, c));
  GridReport rep;
  rep.points = n * n;
  std::vector<GridReport> parts(n * n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < n * n; ++k) {
    const double e = n == 1 ? 0 : -r + 2 * r * (k / n) / (n - 1);
    const double d = n == 1 ? 0 : -r + 2 * r * (k % n) / (n - 1);
    std::vector<double> p;
    for (int i = 0; i < genus - 1; ++i) p.insert(p.end(), {e, d});
    const AssembledFamily f = assemble_closed(genus, p);
    GridReport& g = parts[k];
    for (size_t i = 0; i < carried.size(); ++i)
      g.max_carried_delta = std::max(g.max_carried_delta, std::abs(flat_length(f.surface, carried[i]) - l0c[i]));
    for (size_t i = 0; i < other.size(); ++i)
      g.max_other_delta = std::max(g.max_other_delta, std::abs(flat_length(f.surface, other[i]) - l0o[i]));
    g.all_magnetic = check_magnetic(f.surface, f.track).magnetic;
    g.max_area_error = std::abs(surface_area(f.surface).get_d() - 1);
    g.max_embedding_error = 0;
  }
  for (const auto& g : parts) {
    rep.max_carried_delta = std::max(rep.max_carried_delta, g.max_carried_delta);
    rep.max_other_delta = std::max(rep.max_other_delta, g.max_other_delta);
    rep.all_magnetic = rep.all_magnetic && g.all_magnetic;
    rep.max_area_error = std::max(rep.max_area_error, g.max_area_error);
  }
  return rep;
}

double torus_length(long p, long q, std::complex<double> tau) {
  return std::abs(static_cast<double>(p) + static_cast<double>(q) * tau) / std::sqrt(tau.imag());
}

std::optional<std::complex<double>> torus_from_three_lengths(const std::vector<std::pair<long, long>>& classes,
                                                             const std::vector<double>& lengths, double tol) {
  if (classes.size() < 3 || lengths.size() != classes.size()) throw GeometryError("under-determined");
  for (size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].first == 0 && classes[i].second == 0) throw GeometryError("under-determined");
    if (!(lengths[i] > 0)) throw GeometryError("lengths must be positive");
    for (size_t j = 0; j < i; ++j)
      if (classes[i].first * classes[j].second == classes[i].second * classes[j].first)
        throw GeometryError("under-determined");
  }
  // l^2 y = p^2 + 2pq x + q^2 w with w = x^2 + y^2: linear in (w, x, y)
  double A[3][3], b[3];
  for (int i = 0; i < 3; ++i) {
    const double p = static_cast<double>(classes[i].first), q = static_cast<double>(classes[i].second);
    A[i][0] = q * q;
    A[i][1] = 2 * p * q;
    A[i][2] = -lengths[i] * lengths[i];
    b[i] = -p * p;
  }
  auto det3 = [](double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double D = det3(A);
  double scale = 0;
  for (auto& r : A)
    for (double v : r) scale = std::max(scale, std::abs(v));
  if (std::abs(D) <= 1e-14 * scale * scale * scale) return std::nullopt;
  double sol[3];
  for (int k = 0; k < 3; ++k) {
    double m[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = j == k ? b[i] : A[i][j];
    sol[k] = det3(m) / D;
  }
  const double w = sol[0], x = sol[1], y = sol[2];
  if (!(y > 0)) return std::nullopt;
  const std::complex<double> tau{x, y};
  for (size_t i = 0; i < classes.size(); ++i)
    if (std::abs(torus_length(classes[i].first, classes[i].second, tau) - lengths[i]) > std::sqrt(tol) * std::max(1.0, lengths[i]))
      return std::nullopt;
  if (std::abs(w - (x * x + y * y)) > std::sqrt(tol) * std::max(1.0, w)) return std::nullopt;
  return tau;
}

}  // namespace flatspec
