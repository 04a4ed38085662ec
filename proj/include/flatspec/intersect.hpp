#pragma once

#include <vector>

#include "flatspec/geodesic.hpp"

namespace flatspec {

// Closed curve drawn straight inside each triangle between points on the crossed edges.
// Point l lies on slot x[l] at parameter p[l] measured from the slot's start corner.
struct NormalCurve {
  std::vector<Slot> x;
  std::vector<Q> p;
  int size() const { return static_cast<int>(x.size()); }
};

// Generic realization of a closed crossing sequence.
NormalCurve realize(const FlatSurface& s, const std::vector<Slot>& xs, unsigned seed = 1);
// Interior parallel leaf of a cylinder.
NormalCurve leaf_curve(const GeodesicRep& g);
// Geodesic pushed into its sleeve by `delta` (edge parameter units); optional per-vertex scale factors.
NormalCurve pushed_curve(const FlatSurface& s, const GeodesicRep& g, const Q& delta,
                         const std::vector<Q>* scale = nullptr);
// Transverse self-crossings; coincident points count as crossings.
int self_crossings(const FlatSurface& s, const NormalCurve& c);

int intersection_number(const FlatSurface& s, const GeodesicRep& a, const GeodesicRep& b);
int intersection_number(const FlatSurface& s, const CurveClass& a, const CurveClass& b);

struct OracleOptions {
  Q delta = Q(1, 1 << 12);
  int refinements = 10;
};
int intersection_oracle(const FlatSurface& s, const CurveClass& a, const CurveClass& b, const OracleOptions& opt = {});

// T_alpha^power(c) by surgery at every crossing, reduced.
CurveClass dehn_twist(const FlatSurface& s, const CurveClass& alpha, const CurveClass& c, int power);

}  // namespace flatspec
