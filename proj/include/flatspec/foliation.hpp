#pragma once

#include <string>

#include "flatspec/geodesic.hpp"

namespace flatspec {

// Straight-line foliation whose leaves have direction theta in every triangle frame.
// theta = pi/2 is the vertical foliation, measuring horizontal displacement.
struct DirectionalFoliation {
  const FlatSurface* surface = nullptr;
  double theta = 0;
  DirectionalFoliation() = default;
  DirectionalFoliation(const FlatSurface& s, double th);
};

struct EvalMode {
  bool exact = true;
  long n = 10000;
  static EvalMode quadrature(long n) { return {false, n}; }
  std::string name() const { return exact ? "exact" : "quadrature"; }
};

struct PairingValue {
  double value = 0;
  double error_bound = 0;
  EvalMode mode;
};

// Midpoint rule on [a,b) with n cells; OpenMP over cells unless `parallel` is false.
template <class F>
double midpoint(F&& f, double a, double b, long n, bool parallel = true) {
  const double h = (b - a) / static_cast<double>(n);
  double acc = 0;
#pragma omp parallel for reduction(+ : acc) schedule(static) if (parallel)
  for (long i = 0; i < n; ++i) acc += f(a + (static_cast<double>(i) + 0.5) * h);
  return acc * h;
}

// Transverse measure of the tightened curve: sum over segments of length * |sin(theta - phi)|.
double foliation_curve_pairing(const DirectionalFoliation& f, const CurveClass& c);
double foliation_curve_pairing(const GeodesicRep& g, double theta);

// Half the integral over theta of the foliation pairings.
PairingValue length_from_foliations(const FlatSurface& s, const CurveClass& c, const EvalMode& mode,
                                    bool parallel = true);
PairingValue length_from_foliations(const GeodesicRep& g, const EvalMode& mode, bool parallel = true);

double foliation_foliation_pairing(const DirectionalFoliation& f, const DirectionalFoliation& g);
// Slices every triangle by leaves of f and integrates the transverse measure of g along them.
double foliation_foliation_oracle(const DirectionalFoliation& f, const DirectionalFoliation& g, long slices);

struct LiouvillePairing {
  const FlatSurface* surface = nullptr;
  EvalMode mode;
  LiouvillePairing(const FlatSurface& s, EvalMode m = {}) : surface(&s), mode(m) {}
};

PairingValue liouville_pairing(const LiouvillePairing& L, const CurveClass& c, bool parallel = true);
PairingValue liouville_pairing(const LiouvillePairing& L, const DirectionalFoliation& f, bool parallel = true);
PairingValue liouville_pairing(const LiouvillePairing& L, const LiouvillePairing& M, bool parallel = true);

}  // namespace flatspec
