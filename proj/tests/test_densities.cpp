#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mobius/curve.hpp"
#include "mobius/densities.hpp"

using namespace mobius;

namespace {

constexpr double kPi = std::numbers::pi;

ArcLengthCurve unit_circle() { return reparametrize_arclength(make_circle(1.0)); }

}  // namespace

TEST_CASE("wrap_signed lands in (-L/2, L/2]") {
  const double L = 2 * kPi;
  CHECK(wrap_signed(0.3, L) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(wrap_signed(L + 0.3, L) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(wrap_signed(kPi, L) == kPi);
  CHECK(wrap_signed(-kPi, L) == kPi);
  CHECK(wrap_signed(1.5 * L, L) == kPi);
}

TEST_CASE("circle pair geometry has closed forms") {
  ArcLengthCurve c = unit_circle();
  for (double d : {0.3, 1.2, 2.9}) {
    const double s2 = 0.7;
    PairGeometry g = pair_geometry(c, s2 + d, s2);
    CHECK(g.ds == doctest::Approx(d).epsilon(1e-12));
    CHECK(g.chord == doctest::Approx(2 * std::sin(d / 2)).epsilon(1e-9));
    DensityBundle b = density_bundle(g);
    // constant tangent-part density 1/2, wedge part -1/2, conformal angle 0
    CHECK(b.m1 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b.m2 == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(std::abs(b.m0) < 1e-9);
    CHECK(b.cos_phi == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.m == doctest::Approx(1.0 / (g.chord * g.chord) - 1.0 / (d * d)).epsilon(1e-9));
  }
}

TEST_CASE("circle X bundle matches the logarithmic closed forms") {
  ArcLengthCurve c = unit_circle();
  for (double d : {0.4, 1.0, 2.5}) {
    PairGeometry g = pair_geometry(c, 1.1 + d, 1.1);
    XBundle x = x_bundle(g);
    const double chord = 2 * std::sin(d / 2);
    CHECK(x.x == doctest::Approx(std::log(d * d / (chord * chord))).epsilon(1e-9));
    CHECK(x.dx_ds1 == doctest::Approx(2 / d - 1 / std::tan(d / 2)).epsilon(1e-8));
    CHECK(x.dx_ds2 == doctest::Approx(-(2 / d - 1 / std::tan(d / 2))).epsilon(1e-8));
    const double csc = 1 / std::sin(d / 2);
    CHECK(x.d2x == doctest::Approx(2 / (d * d) - 0.25 * csc * csc * 2).epsilon(1e-8));
    CHECK(x.y == x.dx_ds2 + 4 / g.ds);
  }
}

TEST_CASE("X partials agree with finite differences on a knot") {
  ArcLengthCurve c = reparametrize_arclength(make_torus_knot(2, 3, 2.0, 0.5));
  const double L = c.length();
  auto xv = [&](double s1, double s2) { return x_bundle(pair_geometry(c, s1, s2)).x; };
  auto dx1 = [&](double s1, double s2) { return x_bundle(pair_geometry(c, s1, s2)).dx_ds1; };
  for (double frac : {0.07, 0.21, 0.42}) {
    const double s1 = 0.9 * L, s2 = s1 - frac * L, h = 1e-5;
    XBundle x = x_bundle(pair_geometry(c, s1, s2));
    const double fd1 = (xv(s1 + h, s2) - xv(s1 - h, s2)) / (2 * h);
    CHECK(x.dx_ds1 == doctest::Approx(fd1).epsilon(1e-6));
    const double fd2 = (xv(s1, s2 + h) - xv(s1, s2 - h)) / (2 * h);
    CHECK(x.dx_ds2 == doctest::Approx(fd2).epsilon(1e-6));
    // mixed partial checked against the analytic first derivative
    const double fd12 = (dx1(s1, s2 + h) - dx1(s1, s2 - h)) / (2 * h);
    CHECK(x.d2x == doctest::Approx(fd12).epsilon(1e-5));
  }
}

TEST_CASE("m0 = m1 + m2 stays exact near the diagonal") {
  ArcLengthCurve c = reparametrize_arclength(make_torus_knot(2, 3, 2.0, 0.5));
  const double L = c.length();
  for (double rel : {1e-2, 1e-3, 3e-5, 1e-6}) {
    PairGeometry g = pair_geometry(c, 0.31 * L + rel * L, 0.31 * L);
    DensityBundle b = density_bundle(g);
    CHECK(std::abs(b.m0 - b.m1 - b.m2) <= 1e-12 * (1.0 + std::abs(b.m0)));
    CHECK(std::abs(b.cos_phi) <= 1.0 + 1e-12);
  }
}

TEST_CASE("density m approaches the curvature limit at the diagonal") {
  // unit circle: m -> kappa^2 / 12 = 1/12 as ds -> 0
  // ds = 1e-2 keeps truncation ~ds^2/240 while staying far enough from the
  // diagonal that chord^2 roundoff (amplified by 1/ds^4) is negligible
  ArcLengthCurve c = unit_circle();
  PairGeometry g = pair_geometry(c, 1.0 + 1e-2, 1.0);
  CHECK(density_bundle(g).m == doctest::Approx(1.0 / 12).epsilon(1e-4));
}

TEST_CASE("coincident and antipodal guard rails") {
  ArcLengthCurve c = unit_circle();
  CHECK_THROWS_AS(pair_geometry(c, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pair_geometry(c, 1.0 + c.length(), 1.0), std::invalid_argument);
  // X itself is defined at the antipode, its derivatives are not; halving the
  // length is exact in binary, so this pair lands on |ds| = L/2 with no roundoff
  PairGeometry g = pair_geometry(c, c.length() / 2, 0.0);
  CHECK(std::abs(g.ds) == doctest::Approx(c.length() / 2).epsilon(1e-15));
  CHECK_THROWS_AS(x_bundle(g), std::domain_error);
  CHECK(antipodal_x(c, 0.37) == doctest::Approx(std::log(kPi * kPi / 4)).epsilon(1e-12));
}

TEST_CASE("C bundle reproduces the conformal angle on any parametrization") {
  ArcLengthCurve arc = reparametrize_arclength(make_ellipse(2.0, 1.0));
  const double L = arc.length();
  for (auto [t1, t2] : {std::pair{0.15, 0.62}, {0.8, 0.33}, {0.05, 0.55}}) {
    CBundle cb = c_bundle(arc.curve(), t1, t2);
    DensityBundle db = density_bundle(pair_geometry(arc, t1 * L, t2 * L));
    CHECK(cb.cos_phi_via_c == doctest::Approx(db.cos_phi).epsilon(1e-9));
    const double chord2 = (arc.point(t1 * L) - arc.point(t2 * L)).squaredNorm();
    CHECK(cb.c == doctest::Approx(L * L / chord2).epsilon(1e-9));
  }
}

TEST_CASE("C log-derivatives agree with finite differences") {
  ClosedCurve c = make_ellipse(2.0, 1.0);  // non-constant speed on purpose
  auto logc = [&](double t1, double t2) { return std::log(c_bundle(c, t1, t2).c); };
  const double t1 = 0.2, t2 = 0.55, h = 1e-6;
  CBundle cb = c_bundle(c, t1, t2);
  CHECK(cb.dlogc_dt1 ==
        doctest::Approx((logc(t1 + h, t2) - logc(t1 - h, t2)) / (2 * h)).epsilon(1e-6));
  CHECK(cb.dlogc_dt2 ==
        doctest::Approx((logc(t1, t2 + h) - logc(t1, t2 - h)) / (2 * h)).epsilon(1e-6));
  auto d1 = [&](double a, double b2) { return c_bundle(c, a, b2).dlogc_dt1; };
  CHECK(cb.d2logc == doctest::Approx((d1(t1, t2 + h) - d1(t1, t2 - h)) / (2 * h)).epsilon(1e-5));
}
