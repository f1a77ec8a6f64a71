#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mobius/curve.hpp"
#include "mobius/energy.hpp"

namespace mobius {

/// One Moebius primitive on R^n.
struct MoebiusPrimitive {
  enum class Kind { translation, scaling, orthogonal, inversion };
  Kind kind;
  Vec v;          // translation
  double lambda;  // scaling, > 0
  Mat q;          // orthogonal, q^T q = I
  Vec center;     // sphere inversion x -> center + r^2 (x-center)/|x-center|^2
  double radius;

  static MoebiusPrimitive translation(Vec v);
  static MoebiusPrimitive scaling(double lambda);
  static MoebiusPrimitive orthogonal(Mat q);
  static MoebiusPrimitive inversion(Vec center, double radius);
};

/// Ordered composition; primitives apply first-to-last.
class MoebiusMap {
 public:
  MoebiusMap() = default;
  explicit MoebiusMap(std::vector<MoebiusPrimitive> prims);

  const std::vector<MoebiusPrimitive>& primitives() const { return prims_; }
  MoebiusMap inverse() const;

  Vec apply(const Vec& x) const;
  /// Exact pushforward of a curve 2-jet through the chain (inversion Hessian
  /// in closed form). This is the image curve in the same parameter.
  Jet2 apply_jet(const Jet2& j) const;

 private:
  std::vector<MoebiusPrimitive> prims_;
};

Vec apply_point(const MoebiusMap& m, const Vec& x);

/// Minimum distance from any inversion center in the chain to the curve at
/// the point in the chain where that inversion applies (sampled).
double min_inversion_clearance(const MoebiusMap& m, const ClosedCurve& c, int samples = 2048);

/// Pointwise image sampled and refit as a Fourier curve (refit_modes 0 picks
/// max(64, 2 x input modes)); re-validates embeddedness. Throws
/// std::domain_error if the curve passes within 1e-6 of an inversion center.
ClosedCurve apply_curve(const MoebiusMap& m, const ClosedCurve& c, int refit_modes = 0);

/// Seeded reproducible composite (translation, orthogonal, scaling, one
/// inversion). The inversion center is drawn at distance >= safety from the
/// curve as seen at the inversion's slot in the chain; throws
/// std::invalid_argument if no center satisfying the safety margin is found.
MoebiusMap random_map(const ClosedCurve& c, std::uint64_t seed, double safety = 0.5);

/// Invariance measurements for one curve/map pair.
struct InvarianceReport {
  EnergyReport base;
  EnergyReport image;
  double de = 0;   // image minus base, per energy
  double de0 = 0;
  double de1 = 0;
  double de2 = 0;
  /// max |C_f - C_(T f)| / C_f over the staggered theta grid, image evaluated
  /// by exact jet pushforward at identical parameter pairs.
  double c_max_deviation = 0;
  int c_grid_n = 0;
  double clearance = 0;
};

InvarianceReport invariance_report(const ClosedCurve& c, const MoebiusMap& m, int grid_n,
                                   int c_grid_n = 128);

nlohmann::json invariance_to_json(const InvarianceReport& r);
nlohmann::json map_to_json(const MoebiusMap& m);
/// Verifies q^T q = I to 1e-10 on load; throws std::invalid_argument.
MoebiusMap map_from_json(const nlohmann::json& j);

}  // namespace mobius
