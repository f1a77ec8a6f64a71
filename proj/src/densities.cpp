#include "mobius/densities.hpp"

#include <cmath>
#include <stdexcept>

namespace mobius {

double wrap_signed(double d, double period) {
  double w = std::remainder(d, period);
  if (w == -period / 2) w = period / 2;
  return w;
}

PairGeometry pair_geometry(const ArcLengthCurve& c, double s1, double s2) {
  const double L = c.length();
  PairGeometry g;
  g.s1 = s1;
  g.s2 = s2;
  g.length = L;
  g.ds = wrap_signed(s1 - s2, L);
  if (g.ds == 0) throw std::invalid_argument("pair geometry: coincident parameters");
  g.df = c.point(s1) - c.point(s2);
  g.chord = g.df.norm();
  if (!(g.chord > 0)) throw std::invalid_argument("pair geometry: coincident points");
  g.tau1 = c.unit_tangent(s1);
  g.tau2 = c.unit_tangent(s2);
  g.u = g.df / g.chord;
  return g;
}

PairCore pair_core(const PairGeometry& g) {
  PairCore c;
  c.ds = g.ds;
  c.chord2 = g.chord * g.chord;
  c.t1df = g.tau1.dot(g.df);
  c.t2df = g.tau2.dot(g.df);
  c.t1t2 = g.tau1.dot(g.tau2);
  return c;
}

DensityBundle density_bundle_core(const PairCore& c) {
  const double ds2 = c.ds * c.ds;
  const double inv_c2 = 1.0 / c.chord2;
  const double t1u_t2u = c.t1df * c.t2df * inv_c2;  // (tau1.u)(tau2.u)
  DensityBundle b;
  // (ds^2 - chord^2) is exact near the diagonal where the two terms agree.
  b.m = (ds2 - c.chord2) / (c.chord2 * ds2);
  const double one_minus_t = 1.0 - c.t1t2;           // |tau1 - tau2|^2 / 2
  const double wedge = c.t1t2 - t1u_t2u;             // <tau1 ^ u, tau2 ^ u> - handled via Lagrange
  b.m1 = one_minus_t * inv_c2;
  b.m2 = 2.0 * wedge * inv_c2;
  // 1 - cos phi assembled from the same small pieces keeps m0 = m1 + m2
  // exact at all separations; expanding fl(2 p - q) first would not.
  const double one_minus_cos = one_minus_t + 2.0 * wedge;
  b.m0 = one_minus_cos * inv_c2;
  b.cos_phi = 1.0 - one_minus_cos;
  return b;
}

DensityBundle density_bundle(const PairGeometry& g) { return density_bundle_core(pair_core(g)); }

double x_value_core(const PairCore& c) { return std::log(c.ds * c.ds / c.chord2); }

XBundle x_bundle_core(const PairCore& c, double length) {
  const double half = length / 2;
  if (std::abs(c.ds) >= half)
    throw std::domain_error("x bundle: derivatives are undefined at the antipodal set |ds| = L/2");
  XBundle x;
  const double inv_c2 = 1.0 / c.chord2;
  const double inv_ds = 1.0 / c.ds;
  x.x = std::log(c.ds * c.ds * inv_c2);
  x.dx_ds1 = 2.0 * inv_ds - 2.0 * c.t1df * inv_c2;
  x.dx_ds2 = -2.0 * inv_ds + 2.0 * c.t2df * inv_c2;
  x.d2x = 2.0 * inv_ds * inv_ds + 2.0 * c.t1t2 * inv_c2 - 4.0 * c.t1df * c.t2df * inv_c2 * inv_c2;
  x.y = x.dx_ds2 + 4.0 * inv_ds;
  return x;
}

XBundle x_bundle(const PairGeometry& g) { return x_bundle_core(pair_core(g), g.length); }

double antipodal_x(const ArcLengthCurve& c, double s) {
  const double L = c.length();
  const double chord2 = (c.point(s + L / 2) - c.point(s)).squaredNorm();
  return std::log((L / 2) * (L / 2) / chord2);
}

CBundle c_bundle_jets(const Jet2& j1, const Jet2& j2) {
  const Vec df = j1.p - j2.p;
  const double c2 = df.squaredNorm();
  if (!(c2 > 0)) throw std::invalid_argument("c bundle: coincident points");
  const double v1 = j1.d1.norm(), v2 = j2.d1.norm();
  if (!(v1 > 0) || !(v2 > 0)) throw std::invalid_argument("c bundle: vanishing speed");
  const double vp1 = j1.d1.dot(j1.d2) / v1;
  const double vp2 = j2.d1.dot(j2.d2) / v2;
  const double f1df = j1.d1.dot(df);
  const double f2df = j2.d1.dot(df);
  const double f1f2 = j1.d1.dot(j2.d1);
  CBundle b;
  b.c = v1 * v2 / c2;
  b.dlogc_dt1 = vp1 / v1 - 2.0 * f1df / c2;
  b.dlogc_dt2 = vp2 / v2 + 2.0 * f2df / c2;
  b.d2logc = 2.0 * f1f2 / c2 - 4.0 * f1df * f2df / (c2 * c2);
  b.cos_phi_via_c = -b.d2logc / (2.0 * b.c);
  return b;
}

CBundle c_bundle(const ClosedCurve& c, double t1, double t2) {
  return c_bundle_jets(c.jet(t1), c.jet(t2));
}

}  // namespace mobius
