#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mobius/densities.hpp"
#include "mobius/quad.hpp"

using namespace mobius;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("pair grid stays off the diagonal and the antipodal set") {
  PairGrid g = make_pair_grid(2 * kPi, 64);
  CHECK(g.h() == doctest::Approx(2 * kPi / 64).epsilon(1e-15));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double ds = std::abs(wrap_signed(g.s1(i) - g.s2(j), g.period));
      CHECK(ds > 0.49 * g.h());
      CHECK(ds < g.period / 2 - 0.49 * g.h());
    }
  CHECK_THROWS_AS(make_pair_grid(1.0, 63), std::invalid_argument);
  CHECK_THROWS_AS(make_pair_grid(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_pair_grid(0.0, 64), std::invalid_argument);
}

TEST_CASE("pairwise_sum matches long double accumulation") {
  std::vector<double> v(10001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * double(i)) + 1e-3;
  long double acc = 0;
  for (double x : v) acc += x;
  CHECK(pairwise_sum(v) == doctest::Approx(double(acc)).epsilon(1e-15));
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("smooth periodic fields integrate spectrally") {
  PairGrid g = make_pair_grid(2 * kPi, 64);
  auto field = [&](int i, int j) {
    return 1.0 + std::sin(g.s1(i)) * std::cos(g.s2(j)) + std::cos(3 * g.s2(j));
  };
  const double exact = 4 * kPi * kPi;
  CHECK(integrate_pair(g, field) == doctest::Approx(exact).epsilon(1e-13));
  CHECK(reference::integrate_pair(g, field) == doctest::Approx(exact).epsilon(1e-13));
  CHECK(integrate_loop(2 * kPi, 64, [](double s) { return std::sin(s) * std::sin(s); }) ==
        doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("parallel kernel is bit-identical across worker counts") {
  PairGrid g = make_pair_grid(2 * kPi, 128);
  auto field = [&](int i, int j) {
    const double d = wrap_signed(g.s1(i) - g.s2(j), g.period);
    return std::cos(g.s1(i)) / (d * d) + std::exp(std::sin(g.s2(j)));
  };
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const double serial_workers = integrate_pair(g, field);
  omp_set_num_threads(max_threads);
  const double parallel_workers = integrate_pair(g, field);
  CHECK(serial_workers == parallel_workers);  // exact, not approximate
  // and the serial reference agrees to rounding
  CHECK(reference::integrate_pair(g, field) ==
        doctest::Approx(parallel_workers).epsilon(1e-13));
}

TEST_CASE("multi-component pass equals per-component passes bitwise") {
  PairGrid g = make_pair_grid(1.0, 32);
  auto f0 = [&](int i, int j) { return std::sin(g.s1(i) * 7 + g.s2(j)); };
  auto f1 = [&](int i, int j) { return std::cos(g.s1(i) - 3 * g.s2(j)); };
  auto multi = [&](int i, int j, double* out) {
    out[0] = f0(i, j);
    out[1] = f1(i, j);
  };
  std::vector<double> v = integrate_pair_multi(g, multi, 2);
  CHECK(v[0] == integrate_pair(g, f0));
  CHECK(v[1] == integrate_pair(g, f1));
}

TEST_CASE("non-finite field values are reported, not silently summed") {
  PairGrid g = make_pair_grid(1.0, 16);
  auto bad = [](int i, int j) {
    return (i == 7 && j == 3) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  CHECK_THROWS_AS(integrate_pair(g, bad), std::runtime_error);
  CHECK_THROWS_AS(reference::integrate_pair(g, bad), std::runtime_error);
  auto bad_multi = [&](int i, int j, double* out) { out[0] = bad(i, j); };
  CHECK_THROWS_AS(integrate_pair_multi(g, bad_multi, 1), std::runtime_error);
}

TEST_CASE("principal value bands extrapolate a cancelling singularity") {
  // g = cot^2(d/2) - 4/d^2 is bounded at the diagonal; over the torus of
  // length 2 pi its integral is 16 - 4 pi^2. The excluded band removes a
  // near-constant strip, so the band values converge at first order.
  PairGrid g = make_pair_grid(2 * kPi, 512);
  PvInput input;
  input.value = [&](int i, int j) {
    const double d = wrap_signed(g.s1(i) - g.s2(j), g.period);
    const double t = std::tan(d / 2);
    return 1.0 / (t * t) - 4.0 / (d * d);
  };
  PvReport r = pv_pair(g, input);
  REQUIRE(r.values.size() == 3);
  CHECK(r.converged);
  CHECK(r.order == doctest::Approx(1.0).epsilon(0.1));
  CHECK(r.extrapolated == doctest::Approx(16 - 4 * kPi * kPi).epsilon(1e-4));
  // frozen band values at n = 512, eps = {4,2,1} cells
  CHECK(r.values[0] == doctest::Approx(-23.06721256).epsilon(1e-8));
  CHECK(r.values[2] == doctest::Approx(-23.37562967).epsilon(1e-8));

  CHECK_THROWS_AS(pv_pair(g, input, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(pv_pair(g, input, {4}), std::invalid_argument);
}

TEST_CASE("convergence study measures order and limit") {
  ConvergenceReport r = convergence_study([](int n) { return 4.0 + 100.0 / (double(n) * n); },
                                          {64, 128, 256, 512});
  CHECK(r.order == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.extrapolated == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(convergence_study([](int n) { return double(n); }, {64, 100}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study([](int n) { return double(n); }, {64}),
                  std::invalid_argument);
}
