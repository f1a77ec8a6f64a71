#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "mobius/curve.hpp"
#include "mobius/quad.hpp"

namespace mobius {

/// Sign convention for the antipodal loop term in the log-comparison route to
/// E1/E2. proof_plus (E2 = -cross - antipodal - 8) is the convention the
/// closed-form circle values select; printed_minus flips the antipodal term
/// and is kept selectable so the off-by-2A variant stays measurable.
enum class SignVariant { proof_plus, printed_minus };

std::string to_string(SignVariant v);
SignVariant sign_variant_from_string(const std::string& s);

/// All energy routes evaluated on one staggered grid. Curves are normalized
/// to length 2 pi before integration (every quantity here is scale
/// invariant).
struct EnergyReport {
  int grid_n = 0;
  double length_original = 0;
  double length_normalized = 0;

  double e = 0;   // knot energy, direct double integral of m
  double e0 = 0;  // cosine-formula integrand m0
  double e1 = 0;  // tangent part m1
  double e2 = 0;  // wedge part m2

  SignVariant variant = SignVariant::proof_plus;
  double x_cross_integral = 0;   // integral of X (m - m0 + 2/ds^2)
  double antipodal_integral = 0; // (4/L) * loop integral of X(s + L/2, s)
  double e1_via_x = 0;
  double e2_via_x = 0;

  double e0_via_c = 0;  // parametrization-blind route on the same curve

  double residual_cosine = 0;         // |e - e0 - 4|
  double residual_decomposition = 0;  // |e - e1 - e2 - 4|

  std::string family;
  std::map<std::string, double> params;
};

EnergyReport energy_report(const ArcLengthCurve& c, int grid_n,
                           SignVariant variant = SignVariant::proof_plus);

nlohmann::json energy_to_json(const EnergyReport& r);

/// The two ingredients of the X route plus the assembled energies.
struct XRoute {
  double cross = 0;      // integral of X (m - m0 + 2/ds^2)
  double antipodal = 0;  // (4/L) loop integral of antipodal X
  double e1 = 0;
  double e2 = 0;
};

/// e0_direct is the cosine-formula energy on the same grid (the route
/// recovers e1 = e0 - e2).
XRoute e1_e2_via_x(const ArcLengthCurve& c, int grid_n, SignVariant variant,
                   double e0_direct);

/// E0 from the parametrization-blind bundle on any positive-speed closed
/// curve: staggered-grid integral of C + (1/2) d2 log C over (R/Z)^2.
double e0_via_c(const ClosedCurve& c, int grid_n);

/// Named residuals of every identity the module verifies, all evaluated at
/// one grid size. Keys:
///   cosine_formula, decomposition, e0_split, pointwise_m0, x_density_pointwise,
///   x_route_proof_plus, x_route_printed_minus, c_route
/// Pointwise entries are maxima over seeded random pairs, scaled by the
/// conditioning of the identity.
std::map<std::string, double> identity_suite(const ArcLengthCurve& c, int grid_n,
                                             std::uint64_t seed = 2026);

}  // namespace mobius
