// Timing comparison of the parallel pair-grid kernel against the serial
// reference accumulation, on the knot-energy density of a trefoil.

#include <chrono>
#include <cstdio>

#include "mobius/curve.hpp"
#include "mobius/densities.hpp"
#include "mobius/energy.hpp"
#include "mobius/quad.hpp"

using namespace mobius;

namespace {

double time_seconds(const std::function<double()>& run, double& result) {
  auto t0 = std::chrono::steady_clock::now();
  result = run();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  ArcLengthCurve arc = reparametrize_arclength(make_torus_knot(2, 3, 2.0, 0.5));
  std::printf("curve: torus_knot(2,3), length %.6f, %d arc modes\n", arc.length(),
              arc.curve().modes());
  std::printf("%6s %14s %14s %9s %12s\n", "n", "parallel[s]", "serial[s]", "speedup",
              "|difference|");

  for (int n : {512, 1024, 2048}) {
    const PairGrid g = make_pair_grid(arc.length(), n);
    const int dim = arc.dimension();
    Mat p1(dim, n), t1(dim, n), p2(dim, n), t2(dim, n);
    for (int i = 0; i < n; ++i) {
      p1.col(i) = arc.point(g.s1(i));
      t1.col(i) = arc.unit_tangent(g.s1(i));
      p2.col(i) = arc.point(g.s2(i));
      t2.col(i) = arc.unit_tangent(g.s2(i));
    }
    auto density = [&](int i, int j) {
      PairCore pc;
      pc.ds = wrap_signed(g.s1(i) - g.s2(j), arc.length());
      double chord2 = 0, t1df = 0, t2df = 0, t1t2 = 0;
      for (int d = 0; d < dim; ++d) {
        const double dd = p1(d, i) - p2(d, j);
        chord2 += dd * dd;
        t1df += t1(d, i) * dd;
        t2df += t2(d, j) * dd;
        t1t2 += t1(d, i) * t2(d, j);
      }
      pc.chord2 = chord2;
      pc.t1df = t1df;
      pc.t2df = t2df;
      pc.t1t2 = t1t2;
      return density_bundle_core(pc).m;
    };

    double parallel_value = 0, serial_value = 0;
    const double tp = time_seconds([&] { return integrate_pair(g, density); }, parallel_value);
    const double ts =
        time_seconds([&] { return reference::integrate_pair(g, density); }, serial_value);
    std::printf("%6d %14.4f %14.4f %8.2fx %12.3e\n", n, tp, ts, ts / tp,
                std::abs(parallel_value - serial_value));
  }
  return 0;
}
