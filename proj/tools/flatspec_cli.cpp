#include <CLI11.hpp>
#include <openssl/evp.h>
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

#include "flatspec/cylinders.hpp"
#include "flatspec/families.hpp"
#include "flatspec/foliation.hpp"
#include "flatspec/intersect.hpp"
#include "flatspec/spectra.hpp"
#include "flatspec/trace.hpp"

using namespace flatspec;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  double tol = 1e-9;
  long quad_n = 10000;
  int jobs = 0;
  std::string out, format = "json";
  std::string command;
  json inputs = json::array();
  json params = json::object();
  std::optional<unsigned long> seed;
};

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string h;
  for (unsigned i = 0; i < len; ++i) {
    h += hex[md[i] >> 4];
    h += hex[md[i] & 15];
  }
  return h;
}

// JSON with sorted keys and doubles at 17 significant digits.
void write_json(std::ostream& os, const json& j, int indent = 0) {
  const std::string pad(indent + 2, ' '), end(indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 2);
      }
      os << "\n" << end << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool flat = true;
      for (const auto& v : j) flat = flat && v.is_primitive();
      if (flat) {
        os << "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 2);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << end << "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x)) os << fmt17(x);
      else os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

void emit_text(const Run& run, const std::string& text) {
  if (run.out.empty() || run.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(run.out, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot write " + run.out);
  f << text;
  if (!f) throw std::ios_base::failure("cannot write " + run.out);
}

std::string report_text(const Run& run, const json& results, const std::string& status) {
  json r;
  r["tool"] = "flatspec";
  r["tool_version"] = FLATSPEC_VERSION;
  r["command"] = run.command;
  r["tolerance"] = run.tol;
  r["quad_n"] = run.quad_n;
  r["inputs"] = run.inputs;
  r["parameters"] = run.params;
  if (run.seed) r["seed"] = *run.seed;
  r["status"] = status;
  r["results"] = results;
  std::ostringstream os;
  write_json(os, r);
  os << "\n";
  return os.str();
}

void emit(const Run& run, const json& results, const std::string& csv = {}, bool ok = true) {
  if (run.format == "csv") {
    if (csv.empty()) throw UsageError("csv output is not available for " + run.command);
    emit_text(run, csv);
  } else {
    emit_text(run, report_text(run, results, ok ? "ok" : "check failed"));
  }
  if (!ok) throw CheckFailed("check failed");
}

FlatSurface input_surface(Run& run, const std::string& path) {
  run.inputs.push_back({{"path", path}, {"sha256", sha256_file(path)}});
  return load_surface(path);
}

std::vector<CurveClass> input_curves(Run& run, const FlatSurface& s, const std::vector<std::string>& args) {
  std::vector<CurveClass> out;
  for (const auto& a : args) {
    if (!a.empty() && a.front() != '(' && a.front() != '{')
      run.inputs.push_back({{"path", a}, {"sha256", sha256_file(a)}});
    CurveClass c = load_curve(s, a);
    if (c.name.empty()) c.name = a.size() < 40 ? a : "curve" + std::to_string(out.size());
    out.push_back(c);
  }
  return out;
}

std::vector<CurveClass> panel_file(Run& run, const FlatSurface& s, const std::string& path) {
  run.inputs.push_back({{"path", path}, {"sha256", sha256_file(path)}});
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("panel: ") + e.what());
  }
  const json& arr = j.is_object() ? j.at("curves") : j;
  std::vector<CurveClass> out;
  for (const auto& c : arr) {
    CurveClass cc = c.is_string() ? load_curve(s, c.get<std::string>()) : curve_from_json(s, c);
    if (cc.name.empty()) cc.name = "curve" + std::to_string(out.size());
    out.push_back(cc);
  }
  return out;
}

json chain_json(const Chain& c) {
  json a = json::array();
  for (const auto& sg : c.segs)
    a.push_back({{"from", sg.v0}, {"to", sg.v1}, {"vector", {to_string(sg.vec.x), to_string(sg.vec.y)}},
                 {"length", sg.length}});
  return a;
}

json cylinder_json(const CylinderRecord& r) {
  return {{"circumference", r.circumference}, {"height", r.height}, {"theta", r.theta},
          {"direction", {to_string(r.direction.x), to_string(r.direction.y)}},
          {"modulus", r.height / r.circumference}, {"fills_surface", r.fills_surface}};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) {
      try {
        v.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw UsageError("bad number '" + tok + "'");
      }
    }
  return v;
}

std::vector<std::pair<long, long>> parse_classes(const std::string& s) {
  std::vector<std::pair<long, long>> out;
  static const std::regex re(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back({std::stol((*it)[1]), std::stol((*it)[2])});
  if (out.empty()) throw UsageError("no classes in '" + s + "'");
  return out;
}

std::vector<double> block_params(int genus, std::vector<double> eps, std::vector<double> delta) {
  const size_t b = static_cast<size_t>(genus - 1);
  if (eps.empty()) eps = {0};
  if (delta.empty()) delta = {0};
  if (eps.size() == 1) eps.resize(b, eps[0]);
  if (delta.size() == 1) delta.resize(b, delta[0]);
  if (eps.size() != b || delta.size() != b) throw UsageError("--eps/--delta need 1 or g-1 values");
  std::vector<double> p;
  for (size_t i = 0; i < b; ++i) p.insert(p.end(), {eps[i], delta[i]});
  return p;
}

json family_json(const AssembledFamily& f) {
  const auto rep = validate_surface(f.surface);
  const auto mag = check_magnetic(f.surface, f.track);
  const auto [dim, slice] = family_dimensions(f);
  json lengths = json::object();
  for (int b = 0; b < f.track.num_branches(); ++b) lengths[f.track.branches[b]] = f.track.lengths[b];
  return {{"genus", f.genus},
          {"t", f.t},
          {"gluing_offset", f.offset},
          {"params", f.params},
          {"effective_params", f.effective},
          {"slice_shift", f.slice_shift},
          {"raw_area", f.raw_area},
          {"area", surface_area(f.surface).get_d()},
          {"valid", rep.pass},
          {"cone_points", rep.cone_points.size()},
          {"magnetic", mag.magnetic},
          {"min_switch_angle", mag.min_angle},
          {"admissible_dimension", dim},
          {"slice_dimension", slice},
          {"branch_lengths", lengths}};
}

void save_if(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw std::ios_base::failure("cannot write " + path);
  f << text;
}

std::vector<CurveClass> family_panel(Run& run, const AssembledFamily& base, const std::string& spec,
                                     std::vector<char>* carried_flags) {
  std::smatch m;
  std::vector<CurveClass> out;
  if (std::regex_match(spec, m, std::regex(R"(carried(\d+))"))) {
    for (auto& [c, curve] : carried_panel(base, std::stoi(m[1]))) {
      curve.name = circuit_name(base.track, c);
      out.push_back(curve);
    }
  } else if (std::regex_match(spec, m, std::regex(R"(random(\d+))"))) {
    const auto all = carried_panel(base, 400, 16);
    std::mt19937_64 rng(run.seed.value_or(1));
    std::vector<size_t> idx(all.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min<size_t>(idx.size(), std::stoul(m[1])));
    std::sort(idx.begin(), idx.end());
    for (size_t i : idx) {
      CurveClass c = all[i].second;
      c.name = circuit_name(base.track, all[i].first);
      out.push_back(c);
    }
  } else {
    out = panel_file(run, base.surface, spec);
  }
  if (carried_flags)
    for (const auto& c : out) carried_flags->push_back(carrying_weights(base.surface, base.track, c).has_value());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat surfaces, geodesic lengths and iso-length-spectral families"};
  app.require_subcommand(1);
  app.fallthrough();
  Run run;
  app.add_option("--tol", run.tol, "numeric tolerance")->check(CLI::PositiveNumber);
  app.add_option("--quad-n", run.quad_n, "quadrature cells")->check(CLI::Range(2L, 1L << 40));
  app.add_option("--jobs", run.jobs, "OpenMP threads (0 = default, 1 = serial)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", run.out, "report path (default stdout)");
  app.add_option("--format", run.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string surf, spec_file;
  std::vector<std::string> curves;
  std::string alpha, beta, dir, times, classes, lengths, panel = "carried50", save_surface, save_track;
  double bound = 10, cutoff = 0, threshold = 1e-3;
  std::vector<double> thetas, eps, delta, base_eps, base_delta;
  std::vector<int> ns{4, 8, 16};
  int genus = 2, grid = 5, n_max = 16, count = 20;
  long budget = 2000000;
  bool no_unit = false, oracle = false, exact = false;

  auto* validate = app.add_subcommand("validate", "check a surface file");
  validate->add_option("surface", surf)->required();
  auto* length = app.add_subcommand("length", "geodesic lengths");
  length->add_option("surface", surf)->required();
  length->add_option("--curve", curves, "curve: (p,q), JSON text or file")->required();
  auto* intersect = app.add_subcommand("intersect", "geometric intersection number");
  intersect->add_option("surface", surf)->required();
  intersect->add_option("--a", alpha)->required();
  intersect->add_option("--b", beta)->required();
  intersect->add_flag("--oracle", oracle, "also run the lift-linking oracle");
  auto* twist = app.add_subcommand("twist-test", "Dehn twist length increments");
  twist->add_option("surface", surf)->required();
  twist->add_option("--alpha", alpha)->required();
  twist->add_option("--beta", beta)->required();
  twist->add_option("--n-max", n_max);
  auto* cyl = app.add_subcommand("cylinders", "cylinder of a curve or maximal cylinders in a direction");
  cyl->add_option("surface", surf)->required();
  cyl->add_option("--curve", curves);
  cyl->add_option("--direction", dir, "x,y");
  cyl->add_option("--bound", bound);
  auto* fol = app.add_subcommand("foliation-length", "length from directional foliations");
  fol->add_option("surface", surf)->required();
  fol->add_option("--curve", curves)->required();
  fol->add_option("--theta", thetas)->delimiter(',');
  fol->add_flag("--exact", exact, "closed-form integral instead of quadrature");
  auto* liou = app.add_subcommand("liouville", "Liouville current pairings");
  liou->add_option("surface", surf)->required();
  liou->add_option("--curve", curves);
  liou->add_flag("--exact", exact);
  auto* build = app.add_subcommand("build", "assemble a genus-g block surface");
  build->add_option("--genus", genus)->check(CLI::Range(2, 64));
  build->add_option("--eps", eps)->delimiter(',');
  build->add_option("--delta", delta)->delimiter(',');
  build->add_flag("--no-unit-area", no_unit);
  build->add_option("--save-surface", save_surface);
  build->add_option("--save-track", save_track);
  auto* deform = app.add_subcommand("deform", "move along the family and compare panel lengths");
  deform->add_option("--genus", genus)->check(CLI::Range(2, 64));
  deform->add_option("--eps", eps)->delimiter(',');
  deform->add_option("--delta", delta)->delimiter(',');
  deform->add_option("--base-eps", base_eps)->delimiter(',');
  deform->add_option("--base-delta", base_delta)->delimiter(',');
  deform->add_option("--count", count, "carried circuits compared");
  deform->add_option("--save-surface", save_surface);
  auto* iso = app.add_subcommand("isospec-check", "carried lengths over a parameter grid");
  iso->add_option("--genus", genus)->check(CLI::Range(2, 16));
  iso->add_option("--grid", grid)->check(CLI::Range(1, 50));
  iso->add_option("--panel", panel, "carriedN, randomN or a curve file");
  iso->add_option("--witness-threshold", threshold);
  auto* spec = app.add_subcommand("spectrum", "marked or unmarked length spectrum");
  spec->add_option("surface", surf)->required();
  spec->add_option("--panel", spec_file, "curve file");
  spec->add_option("--cutoff", cutoff);
  spec->add_option("--budget", budget);
  auto* ray = app.add_subcommand("ray-limit", "normalized lengths along the Teichmuller ray");
  ray->add_option("surface", surf)->required();
  ray->add_option("--curve", curves)->required();
  ray->add_option("--times", times)->required();
  auto* torus = app.add_subcommand("torus-solve", "flat torus from three curve lengths");
  torus->add_option("--curves", classes)->required();
  torus->add_option("--lengths", lengths)->required();
  auto* pinch = app.add_subcommand("pinch", "degeneration to a mixed structure");
  pinch->add_option("--spec", spec_file)->required();
  pinch->add_option("--n", ns)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (run.jobs > 0) omp_set_num_threads(run.jobs);
  const bool par = run.jobs != 1;
  if (const char* sd = std::getenv("FLATSPEC_SEED")) run.seed = std::strtoul(sd, nullptr, 10);
  const EvalMode qmode = EvalMode::quadrature(run.quad_n);

  try {
    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    for (const auto* o : sub->get_options()) {
      const std::string name = o->get_name(false, true);
      if (name == "--help" || o->count() == 0) continue;
      const auto r = o->results();
      run.params[name] = r.size() == 1 ? json(r[0]) : json(r);
    }

    if (sub == validate) {
      const FlatSurface s = input_surface(run, surf);
      const auto rep = validate_surface(s, {true, run.tol});
      emit(run, rep.to_json(), {}, rep.pass);
    } else if (sub == length) {
      const FlatSurface s = input_surface(run, surf);
      json rows = json::array();
      std::string csv = "id,length,cylinder,error_bound\n";
      for (const auto& c : input_curves(run, s, curves)) {
        const GeodesicRep g = tighten(s, c, {run.tol});
        rows.push_back({{"id", c.name}, {"length", g.length}, {"cylinder", g.cylinder}, {"error_bound", g.error_bound},
                        {"segments", chain_json(g.chain)}});
        csv += "\"" + c.name + "\"," + fmt17(g.length) + "," + (g.cylinder ? "1" : "0") + "," + fmt17(g.error_bound) + "\n";
      }
      emit(run, {{"curves", rows}}, csv);
    } else if (sub == intersect) {
      const FlatSurface s = input_surface(run, surf);
      const auto c = input_curves(run, s, {alpha, beta});
      json res = {{"a", c[0].name}, {"b", c[1].name}, {"intersection", intersection_number(s, c[0], c[1])}};
      if (oracle) res["oracle"] = intersection_oracle(s, c[0], c[1]);
      emit(run, res, {}, !oracle || res["oracle"] == res["intersection"]);
    } else if (sub == twist) {
      const FlatSurface s = input_surface(run, surf);
      const auto c = input_curves(run, s, {alpha, beta});
      const auto e = twist_escalation(s, c[0], c[1], n_max, run.tol);
      json steps = json::array();
      for (const auto& st : e.steps)
        steps.push_back({{"N", st.power}, {"intersection", st.intersection}, {"lhs", st.lhs}, {"rhs", st.rhs},
                         {"equal", st.equal}});
      emit(run, {{"steps", steps}, {"equality_reached", e.reached}});
    } else if (sub == cyl) {
      const FlatSurface s = input_surface(run, surf);
      json res = json::object();
      if (!curves.empty()) {
        json rows = json::array();
        for (const auto& c : input_curves(run, s, curves)) {
          auto r = detect_cylinder(s, c);
          json row = {{"id", c.name}, {"cylinder", r.has_value()}};
          if (r) row["record"] = cylinder_json(*r);
          rows.push_back(row);
        }
        res["curves"] = rows;
      }
      if (!dir.empty()) {
        const auto d = parse_list(dir);
        if (d.size() != 2) throw UsageError("--direction needs x,y");
        json rows = json::array();
        for (const auto& r : cylinders_in_direction(s, rationalize({d[0], d[1]}), bound)) rows.push_back(cylinder_json(r));
        res["direction"] = rows;
      }
      if (curves.empty() && dir.empty()) throw UsageError("cylinders needs --curve or --direction");
      emit(run, res);
    } else if (sub == fol) {
      const FlatSurface s = input_surface(run, surf);
      json rows = json::array();
      for (const auto& c : input_curves(run, s, curves)) {
        const GeodesicRep g = tighten(s, c, {run.tol});
        const auto lf = length_from_foliations(g, exact ? EvalMode{} : qmode, par);
        json p = json::array();
        for (double th : thetas) p.push_back({{"theta", th}, {"pairing", foliation_curve_pairing(g, th)}});
        rows.push_back({{"id", c.name}, {"length", g.length}, {"length_from_foliations", lf.value},
                        {"error_bound", lf.error_bound}, {"mode", lf.mode.name()}, {"pairings", p}});
      }
      emit(run, {{"curves", rows}});
    } else if (sub == liou) {
      const FlatSurface s = input_surface(run, surf);
      const LiouvillePairing L(s, exact ? EvalMode{} : qmode);
      json rows = json::array();
      for (const auto& c : input_curves(run, s, curves)) {
        const auto v = liouville_pairing(L, c, par);
        rows.push_back({{"id", c.name}, {"pairing", v.value}, {"error_bound", v.error_bound}});
      }
      const auto self = liouville_pairing(L, L, par);
      emit(run, {{"curves", rows}, {"self_pairing", self.value}, {"self_error_bound", self.error_bound},
                 {"area", surface_area(s).get_d()}, {"mode", L.mode.name()}});
    } else if (sub == build) {
      AssembleOptions opt;
      opt.unit_area = !no_unit;
      const AssembledFamily f = assemble_closed(genus, block_params(genus, eps, delta), opt);
      save_if(save_surface, serialize_surface(f.surface));
      save_if(save_track, track_to_json(f.track).dump(1) + "\n");
      json res = family_json(f);
      res["surface"] = surface_to_json(f.surface);
      res["track"] = track_to_json(f.track);
      emit(run, res);
    } else if (sub == deform) {
      const AssembledFamily a = assemble_closed(genus, block_params(genus, base_eps, base_delta));
      const AssembledFamily b = assemble_closed(genus, block_params(genus, eps, delta));
      std::vector<CurveClass> pan;
      for (auto& [c, curve] : carried_panel(a, count)) {
        curve.name = circuit_name(a.track, c);
        pan.push_back(curve);
      }
      for (const auto& c : circumference_panel(a)) pan.push_back(c);
      const auto rep = verify_isospectral(a, b, pan, threshold, run.tol);
      json rows = json::array();
      for (const auto& r : rep.rows)
        rows.push_back({{"id", r.name}, {"carried", r.carried}, {"length_base", r.length_a}, {"length", r.length_b},
                        {"delta", r.delta}});
      save_if(save_surface, serialize_surface(b.surface));
      emit(run, {{"base", family_json(a)}, {"deformed", family_json(b)}, {"panel", rows},
                 {"max_carried_delta", rep.max_carried_delta}, {"witnesses", rep.witnesses},
                 {"isometry_suspect", rep.isometry_suspect}},
           {}, rep.max_carried_delta <= run.tol);
    } else if (sub == iso) {
      const AssembledFamily base = assemble_closed(genus, std::vector<double>(2 * (genus - 1), 0.0));
      std::vector<char> flags;
      const auto pan = family_panel(run, base, panel, &flags);
      std::vector<CurveClass> carried, other;
      for (size_t i = 0; i < pan.size(); ++i) (flags[i] ? carried : other).push_back(pan[i]);
      for (const auto& c : circumference_panel(base)) other.push_back(c);
      const GridReport g = family_grid(genus, grid, carried, other, par);
      const bool ok = g.max_carried_delta < run.tol && g.all_magnetic && g.max_area_error < 1e-12;
      json names = json::array();
      for (const auto& c : carried) names.push_back(c.name);
      emit(run, {{"genus", genus}, {"grid_points", g.points}, {"carried_curves", carried.size()},
                 {"other_curves", other.size()}, {"carried", names}, {"max_carried_delta", g.max_carried_delta},
                 {"max_other_delta", g.max_other_delta}, {"witness", g.max_other_delta > threshold},
                 {"all_magnetic", g.all_magnetic}, {"max_area_error", g.max_area_error},
                 {"dimensions", {family_dimensions(base).first, family_dimensions(base).second}}},
           {}, ok);
    } else if (sub == spec) {
      const FlatSurface s = input_surface(run, surf);
      if (!spec_file.empty()) {
        const auto m = marked_spectrum(s, panel_file(run, s, spec_file), par);
        json rows = json::array();
        std::string csv = "id,length\n";
        for (size_t i = 0; i < m.ids.size(); ++i) {
          rows.push_back({{"id", m.ids[i]}, {"length", m.lengths[i]}});
          csv += "\"" + m.ids[i] + "\"," + fmt17(m.lengths[i]) + "\n";
        }
        emit(run, {{"marked", rows}}, csv);
      } else {
        if (!(cutoff > 0)) throw UsageError("spectrum needs --panel or a positive --cutoff");
        const auto u = unmarked_spectrum(s, cutoff, budget);
        json rows = json::array();
        std::string csv = "index,length,power,cylinder\n";
        for (size_t i = 0; i < u.entries.size(); ++i) {
          const auto& e = u.entries[i];
          rows.push_back({{"length", e.length}, {"power", e.power}, {"cylinder", e.cylinder}, {"saddles", e.chain.size()}});
          csv += std::to_string(i) + "," + fmt17(e.length) + "," + std::to_string(e.power) + "," + (e.cylinder ? "1" : "0") + "\n";
        }
        emit(run, {{"cutoff", cutoff}, {"complete", u.complete}, {"count", u.lengths.size()}, {"entries", rows}}, csv);
      }
    } else if (sub == ray) {
      const FlatSurface s = input_surface(run, surf);
      const auto rows = ray_limit_check(s, input_curves(run, s, curves), parse_list(times), par);
      json arr = json::array();
      bool ok = true;
      for (const auto& r : rows) {
        arr.push_back({{"id", r.id}, {"t", r.t}, {"normalized", r.normalized}, {"target", r.target},
                       {"residual", r.residual}, {"lower", r.lower}, {"upper", r.upper}});
        ok = ok && r.normalized >= r.lower - run.tol && r.normalized <= r.upper + run.tol;
      }
      emit(run, {{"rows", arr}, {"sandwich_holds", ok}}, ray_csv(rows), ok);
    } else if (sub == torus) {
      const auto cls = parse_classes(classes);
      const auto ls = parse_list(lengths);
      const auto tau = torus_from_three_lengths(cls, ls, run.tol);
      json res = {{"solved", tau.has_value()}};
      if (tau) res["tau"] = {{"re", tau->real()}, {"im", tau->imag()}};
      else res["reason"] = "inconsistent lengths";
      emit(run, res, {}, tau.has_value());
    } else if (sub == pinch) {
      run.inputs.push_back({{"path", spec_file}, {"sha256", sha256_file(spec_file)}});
      std::ifstream in(spec_file);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ParseError(std::string("mixed structure: ") + e.what());
      }
      const std::string dir_of = std::filesystem::path(spec_file).parent_path().string();
      const MixedStructure eta = mixed_from_json(j, dir_of.empty() ? "." : dir_of);
      json steps = json::array();
      double fit = 0;
      for (int n : ns) {
        const Degeneration d = degeneration_family(eta, n);
        json cs = json::array();
        for (int i = 0; i < static_cast<int>(eta.classes.size()); ++i) {
          const double l = flat_length(d.surface, realize_class(eta, d, i), {run.tol});
          const double lim = mixed_pairing(eta, i);
          const auto& lc = eta.classes[i].lambda_crossings;
          const bool crossing = std::any_of(lc.begin(), lc.end(), [](int k) { return k != 0; });
          if (crossing) fit = std::max(fit, std::abs(l - lim) * n * n);
          cs.push_back({{"id", eta.classes[i].name}, {"crossing", crossing}, {"length", l}, {"limit", lim},
                        {"delta", l - lim}, {"unit_area_length", l / std::sqrt(d.raw_area)}});
        }
        json cores = json::array();
        for (const auto& c : d.cores) cores.push_back(flat_length(d.surface, c));
        steps.push_back({{"n", n}, {"slit", to_string(d.slit)}, {"raw_area", d.raw_area}, {"core_lengths", cores},
                         {"classes", cs}, {"valid", validate_surface(d.surface).pass}});
      }
      emit(run, {{"steps", steps}, {"fitted_C", fit}, {"self_pairing", mixed_self_pairing(eta, run.quad_n)}});
    }
    return 0;
  } catch (const CheckFailed&) {
    return 2;
  } catch (const UsageError& e) {
    std::cerr << json({{"status", "error"}, {"code", "usage"}, {"message", e.what()}}).dump() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << json({{"status", "error"}, {"code", "parse"}, {"message", e.what()}}).dump() << "\n";
    return 2;
  } catch (const TrivialClass& e) {
    std::cerr << json({{"status", "error"}, {"code", "trivial_class"}, {"message", e.what()}}).dump() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << json({{"status", "error"}, {"code", "geometry"}, {"message", e.what()}}).dump() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << json({{"status", "error"}, {"code", "io"}, {"message", e.what()}}).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json({{"status", "error"}, {"code", "internal"}, {"message", e.what()}}).dump() << "\n";
    return 2;
  }
}
