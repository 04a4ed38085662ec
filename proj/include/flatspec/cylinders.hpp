#pragma once

#include <optional>
#include <vector>

#include "flatspec/geodesic.hpp"

namespace flatspec {

struct CylinderRecord {
  double theta = 0;  // core direction mod pi
  Vec2q direction;   // core holonomy
  double circumference = 0;
  double height = 0;
  Q height_area;
  Chain boundary[2];
  CurveClass core;
  bool fills_surface = false;
};

std::optional<CylinderRecord> detect_cylinder(const FlatSurface& s, const CurveClass& alpha);
CylinderRecord cylinder_record(const GeodesicRep& g);

struct TwistTest {
  int power = 0;
  int intersection = 0;
  double lhs = 0, rhs = 0;
  bool equal = false;
};

// lhs = l(T^{N+1} beta) - l(T^N beta) against rhs = l(alpha) i(alpha, beta).
TwistTest twist_equality_test(const FlatSurface& s, const CurveClass& alpha, const CurveClass& beta, int power,
                              double tol = 1e-9);

struct TwistEscalation {
  std::vector<TwistTest> steps;
  bool reached = false;  // equality at some N <= n_max; otherwise inconclusive
};
// N = 0, 1, 2, 4, ... up to n_max.
TwistEscalation twist_escalation(const FlatSurface& s, const CurveClass& alpha, const CurveClass& beta,
                                 int n_max = 16, double tol = 1e-9);

// Maximal cylinders in direction `dir` (mod pi) with circumference at most `bound`.
std::vector<CylinderRecord> cylinders_in_direction(const FlatSurface& s, const Vec2q& dir, double bound);
std::vector<CylinderRecord> cylinders_in_direction(const FlatSurface& s, double theta, double bound);

// Saddle connections in direction `dir` (mod pi) of length at most `bound`, one per unordered pair of ends.
std::vector<SaddleSeg> saddle_connections_in_direction(const FlatSurface& s, const Vec2q& dir, double bound);

}  // namespace flatspec
