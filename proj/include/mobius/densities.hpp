#pragma once

#include "mobius/curve.hpp"

namespace mobius {

/// Signed representative of d modulo period in (-period/2, period/2].
double wrap_signed(double d, double period);

/// Geometry of an ordered pair of curve points in arc-length parametrization.
struct PairGeometry {
  double s1 = 0;
  double s2 = 0;
  double ds = 0;      // signed intrinsic difference, in (-L/2, L/2]
  double chord = 0;   // |f(s1) - f(s2)|
  double length = 0;  // curve length L
  Vec df;             // f(s1) - f(s2)
  Vec tau1;           // unit tangents
  Vec tau2;
  Vec u;              // df / chord
};

/// Requires s1 != s2 mod L (coincident points have no pair geometry).
PairGeometry pair_geometry(const ArcLengthCurve& c, double s1, double s2);

/// Scalar core of a pair: everything the energy densities and the X calculus
/// need. Kernels fill this from cached samples without forming vectors.
struct PairCore {
  double ds = 0;      // signed, in (-L/2, L/2]
  double chord2 = 0;  // |df|^2
  double t1df = 0;    // tau1 . df
  double t2df = 0;    // tau2 . df
  double t1t2 = 0;    // tau1 . tau2
};

PairCore pair_core(const PairGeometry& g);

/// Energy densities at one pair.
///   m      integrand of the knot energy: 1/chord^2 - 1/ds^2
///   m0     (1 - cos phi)/chord^2 with the conformal angle phi
///   m1     |tau1 - tau2|^2 / (2 chord^2)
///   m2     2 <tau1 ^ u, tau2 ^ u> / chord^2
/// cos phi = 2 (tau1.u)(tau2.u) - tau1.tau2, evaluated in a rearranged form
/// that stays exact for the pointwise identity m0 = m1 + m2 near the diagonal.
struct DensityBundle {
  double m = 0;
  double m0 = 0;
  double m1 = 0;
  double m2 = 0;
  double cos_phi = 0;
};

DensityBundle density_bundle_core(const PairCore& c);
DensityBundle density_bundle(const PairGeometry& g);

/// Logarithmic chord/arc comparison X = log(ds^2 / chord^2) >= 0 and its
/// exact partial derivatives. The derivatives have a kink across the
/// antipodal set; they are defined only for 0 < |ds| < L/2, and requesting
/// them at |ds| = L/2 throws std::domain_error (X itself is fine there).
struct XBundle {
  double x = 0;
  double dx_ds1 = 0;
  double dx_ds2 = 0;
  double d2x = 0;  // mixed partial d^2 X / ds1 ds2
  double y = 0;    // dx_ds2 + 4/ds
};

XBundle x_bundle_core(const PairCore& c, double length);
XBundle x_bundle(const PairGeometry& g);

double x_value_core(const PairCore& c);
/// X at the antipodal pair (s + L/2, s).
double antipodal_x(const ArcLengthCurve& c, double s);

/// Parametrization-blind calculus for a curve with any positive speed:
///   C = |f'(t1)| |f'(t2)| / chord^2,
/// its log derivatives, and the conformal angle recovered from them,
///   cos phi = -(1/(2C)) d2 log C.
struct CBundle {
  double c = 0;
  double dlogc_dt1 = 0;
  double dlogc_dt2 = 0;
  double d2logc = 0;
  double cos_phi_via_c = 0;
};

/// From explicit 2-jets (used for exact Moebius-image evaluation).
CBundle c_bundle_jets(const Jet2& j1, const Jet2& j2);
CBundle c_bundle(const ClosedCurve& c, double t1, double t2);

}  // namespace mobius
