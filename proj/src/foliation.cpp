#include "flatspec/foliation.hpp"

#include <algorithm>
#include <cmath>

namespace flatspec {

namespace {

double reduce_pi(double th) {
  double r = std::fmod(th, kPi);
  if (r < 0) r += kPi;
  return r;
}

void same_surface(const FlatSurface* a, const FlatSurface* b) {
  if (a != b) throw GeometryError("pairing objects live on different surfaces");
}

double quad_bound(double total_length, long n) {
  const double h = kPi / static_cast<double>(n);
  return 0.5 * total_length * (kPi / 24 + 0.25) * h * h;
}

}  // namespace

DirectionalFoliation::DirectionalFoliation(const FlatSurface& s, double th) : surface(&s), theta(reduce_pi(th)) {}

double foliation_curve_pairing(const GeodesicRep& g, double theta) {
  double acc = 0;
  for (const auto& sg : g.chain.segs) {
    const Vec2 v = sg.vec.approx();
    acc += sg.length * std::abs(std::sin(theta - std::atan2(v.y, v.x)));
  }
  return acc;
}

double foliation_curve_pairing(const DirectionalFoliation& f, const CurveClass& c) {
  return foliation_curve_pairing(tighten(*f.surface, c), f.theta);
}

PairingValue length_from_foliations(const GeodesicRep& g, const EvalMode& mode, bool parallel) {
  PairingValue pv;
  pv.mode = mode;
  if (mode.exact) {
    double acc = 0;
    for (const auto& sg : g.chain.segs) acc += sg.length;  // half of the integral of |sin| over [0,pi) is 1
    pv.value = acc;
    pv.error_bound = g.error_bound;
    return pv;
  }
  if (mode.n < 2) throw GeometryError("quadrature needs at least 2 samples");
  pv.value = 0.5 * midpoint([&](double th) { return foliation_curve_pairing(g, th); }, 0.0, kPi, mode.n, parallel);
  pv.error_bound = quad_bound(g.length, mode.n) + g.error_bound;
  return pv;
}

PairingValue length_from_foliations(const FlatSurface& s, const CurveClass& c, const EvalMode& mode, bool parallel) {
  if (!mode.exact && mode.n < 2) throw GeometryError("quadrature needs at least 2 samples");
  return length_from_foliations(tighten(s, c), mode, parallel);
}

double foliation_foliation_pairing(const DirectionalFoliation& f, const DirectionalFoliation& g) {
  same_surface(f.surface, g.surface);
  return surface_area(*f.surface).get_d() * std::abs(std::sin(f.theta - g.theta));
}

double foliation_foliation_oracle(const DirectionalFoliation& f, const DirectionalFoliation& g, long slices) {
  same_surface(f.surface, g.surface);
  const Vec2 u{std::cos(f.theta), std::sin(f.theta)}, nrm{-u.y, u.x};
  const double w = std::abs(std::sin(f.theta - g.theta));
  double total = 0;
  for (const auto& T : f.surface->tri) {
    Vec2 P[3], E[3];
    for (int j = 0; j < 3; ++j) {
      P[j] = T.corner(j).approx();
      E[j] = T.e[j].approx();
    }
    double lo = 1e300, hi = -1e300;
    for (const auto& p : P) {
      lo = std::min(lo, dot(p, nrm));
      hi = std::max(hi, dot(p, nrm));
    }
    const double ds = (hi - lo) / static_cast<double>(slices);
    for (long i = 0; i < slices; ++i) {
      const double off = lo + (static_cast<double>(i) + 0.5) * ds;
      double t0 = -1e300, t1 = 1e300;
      for (int j = 0; j < 3; ++j) {
        // cross(E_j, off*n + t*u - P_j) >= 0
        const double a = cross(E[j], nrm * off - P[j]), b = cross(E[j], u);
        if (b > 0)
          t0 = std::max(t0, -a / b);
        else if (b < 0)
          t1 = std::min(t1, -a / b);
        else if (a < 0)
          t1 = t0 - 1;
      }
      if (t1 > t0) total += (t1 - t0) * w * ds;
    }
  }
  return total;
}

PairingValue liouville_pairing(const LiouvillePairing& L, const CurveClass& c, bool parallel) {
  return length_from_foliations(*L.surface, c, L.mode, parallel);
}

PairingValue liouville_pairing(const LiouvillePairing& L, const DirectionalFoliation& f, bool parallel) {
  same_surface(L.surface, f.surface);
  PairingValue pv;
  pv.mode = L.mode;
  const double area = surface_area(*L.surface).get_d();
  if (L.mode.exact) {
    pv.value = area;
    pv.error_bound = 4e-16 * area;
    return pv;
  }
  if (L.mode.n < 2) throw GeometryError("quadrature needs at least 2 samples");
  pv.value = 0.5 * midpoint([&](double ph) { return area * std::abs(std::sin(f.theta - ph)); }, 0.0, kPi, L.mode.n,
                            parallel);
  pv.error_bound = quad_bound(area, L.mode.n);
  return pv;
}

PairingValue liouville_pairing(const LiouvillePairing& L, const LiouvillePairing& M, bool parallel) {
  same_surface(L.surface, M.surface);
  PairingValue pv;
  pv.mode = L.mode.exact ? M.mode : L.mode;
  const double area = surface_area(*L.surface).get_d();
  if (pv.mode.exact) {
    pv.value = 0.5 * kPi * area;
    pv.error_bound = 4e-16 * area;
    return pv;
  }
  const long n = pv.mode.n;
  if (n < 2) throw GeometryError("quadrature needs at least 2 samples");
  auto inner = [&](double th) {
    return 0.5 * midpoint([&](double ph) { return area * std::abs(std::sin(th - ph)); }, 0.0, kPi, n, false);
  };
  pv.value = 0.5 * midpoint(inner, 0.0, kPi, n, parallel);
  pv.error_bound = 0.5 * kPi * quad_bound(area, n) + quad_bound(kPi * area, n);
  return pv;
}

}  // namespace flatspec
