// Serial reference against the OpenMP path for each parallel kernel.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "flatspec/families.hpp"
#include "flatspec/foliation.hpp"
#include "flatspec/spectra.hpp"
#include "flatspec/trace.hpp"

using namespace flatspec;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, int reps, const std::function<double(bool)>& kernel) {
  double serial = 0, parallel = 0;
  const double ts = best_of(reps, [&] { serial = kernel(false); });
  const double tp = best_of(reps, [&] { parallel = kernel(true); });
  std::printf("%-28s %12.4f %12.4f %8.2fx %12.3g\n", name, ts * 1e3, tp * 1e3, ts / tp, std::abs(serial - parallel));
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  const FlatSurface torus = load_surface(std::string(FLATSPEC_DATA_DIR) + "/square_torus.json");
  const AssembledFamily fam = assemble_closed(2, {0, 0});
  const GeodesicRep g = tighten(torus, torus_curve(torus, 13, 8));
  const LiouvillePairing Lq(fam.surface, EvalMode::quadrature(10000));

  std::vector<CurveClass> carried, other = circumference_panel(fam), panel;
  for (auto& [c, curve] : carried_panel(fam, 30)) carried.push_back(curve);
  panel = carried;
  panel.insert(panel.end(), other.begin(), other.end());

  std::printf("threads %d, best of %d\n", omp_get_max_threads(), reps);
  std::printf("%-28s %12s %12s %9s %12s\n", "kernel", "serial ms", "omp ms", "speedup", "|difference|");
  row("length_from_foliations 1e6", reps,
      [&](bool par) { return length_from_foliations(g, EvalMode::quadrature(1000000), par).value; });
  row("liouville self 1e4", reps, [&](bool par) { return liouville_pairing(Lq, Lq, par).value; });
  row("marked_spectrum 32", reps, [&](bool par) {
    double acc = 0;
    for (double l : marked_spectrum(fam.surface, panel, par).lengths) acc += l;
    return acc;
  });
  row("family_grid 3x3", 1, [&](bool par) { return family_grid(2, 3, carried, other, par).max_other_delta; });
  return 0;
}
