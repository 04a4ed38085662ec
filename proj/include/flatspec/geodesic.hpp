#pragma once

#include <memory>
#include <vector>

#include "flatspec/curve.hpp"
#include "flatspec/develop.hpp"

namespace flatspec {

struct SaddleSeg {
  int v0 = -1, v1 = -1;
  Corner start{};  // corner the segment leaves from
  Vec2q vec;       // holonomy in the frame of start.t
  Vec2q dev;       // holonomy in the developed frame of the curve
  double length = 0;
};

struct Chain {
  std::vector<SaddleSeg> segs;
  double length() const;
};

// Turning angle at a vertex, swept from d_in to d_out through a fan of rays.
struct TurnAngle {
  double value = 0;
  bool ccw = true;
  Vec2q d_in, d_out;
  // Sign of value - j*pi, decided exactly when value is close to j*pi.
  int cmp_multiple(int j) const;
};

struct Touch {
  int vertex = -1;
  int k = 0;
  bool marked = false;
  int side = 0;       // +1 vertex left of travel, -1 right
  TurnAngle free;     // angle on the sleeve side
  double peg = 0;     // k*pi - free
};

struct Lift {
  DevPt pos;
  int vertex = -1;
  int side = 0;  // +1 left boundary, -1 right boundary, 0 arc endpoint
  int first = -1, last = -1;
  Corner corner{};  // corner at this lift in tris[first] (arc endpoints: their own triangle)
};

// Developed strip of a crossing sequence, repeated `periods` times for closed curves.
struct Sleeve {
  int m = 0;
  int periods = 1;
  bool closed = true;
  std::vector<Slot> x;
  std::vector<DevTri> tris;
  std::vector<int> Lid, Rid;
  std::vector<Lift> lifts;
  int start_lift = -1, end_lift = -1;  // arcs
  int size() const { return static_cast<int>(x.size()); }
  const DevPt& L(int l) const { return lifts[Lid[l]].pos; }
  const DevPt& R(int l) const { return lifts[Rid[l]].pos; }
  Vec2q hol_translation() const;  // closed: translation part of one period
  int hol_sign() const;
};

Sleeve build_sleeve(const FlatSurface& s, const std::vector<Slot>& seq, bool closed, int periods,
                    Corner arc_start = {}, Corner arc_end = {});

struct CylinderData {
  Vec2q core;             // translation holonomy of the core (developed frame)
  double circumference = 0;
  Q height_area;          // circumference * height, exact
  double height = 0;
  Chain boundary[2];      // [0] left of travel, [1] right
  std::vector<Slot> leaf; // crossings of an interior parallel leaf
  std::vector<Q> leaf_param;  // its position on each crossed slot from the slot's start
  bool fills_surface = false;
};

struct GeodesicRep {
  bool cylinder = false;
  Chain chain;  // for cylinders: the pinned parallel loop
  CylinderData cyl;
  double length = 0;
  double error_bound = 0;
  std::vector<Touch> touches;
  // Internal geometry of the final loop.
  CurveClass curve;       // reduced, rerouted crossing sequence
  std::shared_ptr<const Sleeve> sleeve;
  std::vector<int> path;  // apex lift ids over one period (closed: from a lift to its translate)
  int k0 = 0;             // first portal of the period
  int reroutes = 0;
};

struct TightenOptions {
  double tol = 1e-9;
  int max_iterations = 200000;
};

struct TrivialClass : GeometryError {
  using GeometryError::GeometryError;
};

GeodesicRep tighten(const FlatSurface& s, const CurveClass& c, const TightenOptions& opt = {});
double flat_length(const FlatSurface& s, const CurveClass& c, const TightenOptions& opt = {});

// Independent re-check of the angle condition at every vertex the chain passes.
bool verify_angle_certificate(const FlatSurface& s, const GeodesicRep& g, std::string* why = nullptr);

// Turning angle helpers (exact zero detection).
double turn(const Vec2q& a, const Vec2q& b, bool ccw);
TurnAngle fan_turn(const Vec2q& d_in, const std::vector<Vec2q>& rays, const Vec2q& d_out, bool ccw);

// Corner walk around a vertex: positive steps cw, negative ccw; returns crossed slots.
std::vector<Slot> corner_walk(const FlatSurface& s, Corner start, int cw_steps, Corner* end = nullptr);

}  // namespace flatspec
