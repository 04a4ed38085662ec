#pragma once

#include <string>
#include <vector>

#include "flatspec/geodesic.hpp"

namespace flatspec {

struct MarkedSpectrum {
  std::vector<std::string> ids;
  std::vector<double> lengths;
};

MarkedSpectrum marked_spectrum(const FlatSurface& s, const std::vector<CurveClass>& panel, bool parallel = true);

// Directed saddle connection between vertices.
struct Saddle {
  Corner start;     // canonical corner holding the direction
  Vec2q vec;        // holonomy in the frame of start.t
  Corner end;       // canonical corner holding the reversed direction
  Vec2q back;       // reversed direction in the frame of end.t
  double length = 0;
  int v0 = -1, v1 = -1;
  std::vector<Slot> exits;  // edges crossed in between
};

struct SaddleSet {
  std::vector<Saddle> saddles;
  std::vector<int> reverse;  // id of the same connection run backwards
  bool complete = true;
};

SaddleSet saddle_connections(const FlatSurface& s, double bound, long budget = 2000000);

struct SpectrumEntry {
  double length = 0;
  int power = 1;            // iterate of a primitive geodesic
  bool cylinder = false;
  std::vector<int> chain;   // saddle ids of the primitive geodesic
};

struct UnmarkedSpectrum {
  double cutoff = 0;
  std::vector<double> lengths;  // nondecreasing, with multiplicity
  std::vector<SpectrumEntry> entries;
  bool complete = true;
};

UnmarkedSpectrum unmarked_spectrum(const FlatSurface& s, double cutoff, long budget = 2000000);
// Closed curve pushed off a saddle chain to its left.
CurveClass chain_curve(const FlatSurface& s, const SaddleSet& set, const std::vector<int>& chain);
// Lattice oracle for a flat torus with basis (a, b): classes up to sign with |p a + q b| <= L.
std::vector<double> torus_spectrum_oracle(const Vec2& a, const Vec2& b, double cutoff);

struct RayRow {
  std::string id;
  double t = 0;
  double normalized = 0;  // e^-t times the length on the stretched surface
  double target = 0;      // i(alpha, nu_0)
  double residual = 0;
  double lower = 0, upper = 0;
};

std::vector<RayRow> ray_limit_check(const FlatSurface& s, const std::vector<CurveClass>& panel,
                                    const std::vector<double>& times, bool parallel = true);
std::string ray_csv(const std::vector<RayRow>& rows);

}  // namespace flatspec
