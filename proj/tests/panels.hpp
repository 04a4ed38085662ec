#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "flatspec/cylinders.hpp"
#include "flatspec/families.hpp"
#include "flatspec/intersect.hpp"
#include "flatspec/trace.hpp"

namespace panels {

using namespace flatspec;

// Product of two closed curves based in a common triangle.
inline CurveClass product(const FlatSurface& s, CurveClass a, CurveClass b, bool invert_b) {
  a = reduce(s, a);
  b = reduce(s, b);
  if (invert_b) {
    std::vector<Slot> r;
    for (auto it = b.crossings.rbegin(); it != b.crossings.rend(); ++it) r.push_back(s.twin_of(*it));
    b.crossings = r;
  }
  for (size_t i = 0; i < a.crossings.size(); ++i)
    for (size_t j = 0; j < b.crossings.size(); ++j) {
      if (a.crossings[i].t != b.crossings[j].t) continue;
      std::vector<Slot> xs;
      for (size_t k = 0; k < a.crossings.size(); ++k) xs.push_back(a.crossings[(i + k) % a.crossings.size()]);
      for (size_t k = 0; k < b.crossings.size(); ++k) xs.push_back(b.crossings[(j + k) % b.crossings.size()]);
      return CurveClass::closed_curve(xs);
    }
  throw GeometryError("no common triangle");
}

// Seeds first, then twists and products of earlier members; one curve per length.
inline std::vector<CurveClass> grow(const FlatSurface& s, const std::vector<CurveClass>& seeds, size_t count,
                                    unsigned seed = 11, size_t max_crossings = 60) {
  std::vector<CurveClass> out;
  std::map<long long, int> seen;
  auto add = [&](CurveClass c) {
    if (out.size() >= count) return;
    try {
      c = reduce(s, c);
      if (c.crossings.empty() || c.crossings.size() > max_crossings) return;
      const double l = flat_length(s, c);
      if (!(l > 1e-9)) return;
      const long long key = std::llround(l * 1e8);
      if (seen.count(key)) return;
      seen[key] = 1;
      if (c.name.empty()) c.name = "c" + std::to_string(out.size());
      out.push_back(c);
    } catch (const std::exception&) {
    }
  };
  for (const auto& c : seeds) add(c);
  std::mt19937 rng(seed);
  for (int tries = 0; out.size() < count && tries < 4000 && !out.empty(); ++tries) {
    std::uniform_int_distribution<size_t> pick(0, out.size() - 1);
    const CurveClass a = out[pick(rng)], b = out[pick(rng)];
    try {
      switch (rng() % 3) {
        case 0:
          add(dehn_twist(s, a, b, rng() % 2 ? 1 : -1));
          break;
        case 1:
          add(product(s, a, b, false));
          break;
        default:
          add(product(s, a, b, true));
      }
    } catch (const std::exception&) {
    }
  }
  return out;
}

inline std::vector<CurveClass> torus(const FlatSurface& s, size_t count) {
  std::vector<std::pair<long, long>> pq;
  for (long p = -6; p <= 6; ++p)
    for (long q = 0; q <= 6; ++q)
      if (std::gcd(p, q) == 1 && (q > 0 || p == 1)) pq.push_back({p, q});
  std::stable_sort(pq.begin(), pq.end(),
                   [](auto a, auto b) { return a.first * a.first + a.second * a.second < b.first * b.first + b.second * b.second; });
  std::vector<CurveClass> out;
  for (size_t i = 0; i < pq.size() && out.size() < count; ++i) out.push_back(torus_curve(s, pq[i].first, pq[i].second));
  return out;
}

inline std::vector<CurveClass> octagon(const FlatSurface& s, size_t count) {
  std::vector<CurveClass> seeds;
  for (auto d : {Vec2q{Q(1), Q(0)}, Vec2q{Q(0), Q(1)}, Vec2q{Q(1), Q(1)}, Vec2q{Q(1), Q(-1)}})
    for (const auto& c : cylinders_in_direction(s, d, 12)) seeds.push_back(c.core);
  return grow(s, seeds, count, 5);
}

inline std::vector<CurveClass> assembly(const AssembledFamily& f, size_t count) {
  std::vector<CurveClass> seeds = circumference_panel(f);
  for (auto& [c, curve] : carried_panel(f, 6)) {
    curve.name = circuit_name(f.track, c);
    seeds.push_back(curve);
  }
  return grow(f.surface, seeds, count, 3);
}

}  // namespace panels
