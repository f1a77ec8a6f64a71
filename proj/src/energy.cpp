#include "mobius/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mobius/densities.hpp"
#include "mobius/rng.hpp"

namespace mobius {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GridCache {
  int n = 0;
  int dim = 0;
  double length = 0;
  Mat p1, t1;  // points/unit tangents at s1 nodes
  Mat p2, t2;  // points/unit tangents at s2 nodes
};

GridCache build_cache(const ArcLengthCurve& c, const PairGrid& g) {
  GridCache cache;
  cache.n = g.n;
  cache.dim = c.dimension();
  cache.length = c.length();
  cache.p1.resize(cache.dim, g.n);
  cache.t1.resize(cache.dim, g.n);
  cache.p2.resize(cache.dim, g.n);
  cache.t2.resize(cache.dim, g.n);
  for (int i = 0; i < g.n; ++i) {
    cache.p1.col(i) = c.point(g.s1(i));
    cache.t1.col(i) = c.unit_tangent(g.s1(i));
    cache.p2.col(i) = c.point(g.s2(i));
    cache.t2.col(i) = c.unit_tangent(g.s2(i));
  }
  return cache;
}

inline PairCore core_at(const GridCache& c, const PairGrid& g, int i, int j) {
  PairCore pc;
  pc.ds = wrap_signed(g.s1(i) - g.s2(j), c.length);
  double chord2 = 0, t1df = 0, t2df = 0, t1t2 = 0;
  for (int d = 0; d < c.dim; ++d) {
    const double dd = c.p1(d, i) - c.p2(d, j);
    chord2 += dd * dd;
    t1df += c.t1(d, i) * dd;
    t2df += c.t2(d, j) * dd;
    t1t2 += c.t1(d, i) * c.t2(d, j);
  }
  pc.chord2 = chord2;
  pc.t1df = t1df;
  pc.t2df = t2df;
  pc.t1t2 = t1t2;
  return pc;
}

ArcLengthCurve normalized(const ArcLengthCurve& c) {
  if (std::abs(c.length() - kTwoPi) <= 1e-13 * kTwoPi) return c;
  return rescale_to_length(c, kTwoPi);
}

}  // namespace

std::string to_string(SignVariant v) {
  return v == SignVariant::proof_plus ? "proof_plus" : "printed_minus";
}

SignVariant sign_variant_from_string(const std::string& s) {
  if (s == "proof_plus") return SignVariant::proof_plus;
  if (s == "printed_minus") return SignVariant::printed_minus;
  throw std::invalid_argument("unknown sign variant: " + s);
}

EnergyReport energy_report(const ArcLengthCurve& curve, int grid_n, SignVariant variant) {
  const ArcLengthCurve c = normalized(curve);
  const PairGrid grid = make_pair_grid(c.length(), grid_n);
  const GridCache cache = build_cache(c, grid);

  auto field = [&](int i, int j, double* out) {
    const PairCore pc = core_at(cache, grid, i, j);
    const DensityBundle b = density_bundle_core(pc);
    out[0] = b.m;
    out[1] = b.m0;
    out[2] = b.m1;
    out[3] = b.m2;
    out[4] = x_value_core(pc) * (b.m - b.m0 + 2.0 / (pc.ds * pc.ds));
  };
  const std::vector<double> vals = integrate_pair_multi(grid, field, 5);

  EnergyReport r;
  r.grid_n = grid_n;
  r.length_original = curve.length();
  r.length_normalized = c.length();
  r.e = vals[0];
  r.e0 = vals[1];
  r.e1 = vals[2];
  r.e2 = vals[3];
  r.x_cross_integral = vals[4];
  r.antipodal_integral =
      (4.0 / c.length()) *
      integrate_loop(c.length(), grid_n, [&](double s) { return antipodal_x(c, s); });
  r.variant = variant;
  const double signed_a =
      variant == SignVariant::proof_plus ? -r.antipodal_integral : r.antipodal_integral;
  r.e2_via_x = -r.x_cross_integral + signed_a - 8.0;
  r.e1_via_x = r.e0 - r.e2_via_x;
  r.e0_via_c = e0_via_c(c.curve(), grid_n);
  r.residual_cosine = std::abs(r.e - r.e0 - 4.0);
  r.residual_decomposition = std::abs(r.e - r.e1 - r.e2 - 4.0);
  r.family = c.curve().family;
  r.params = c.curve().params;
  return r;
}

nlohmann::json energy_to_json(const EnergyReport& r) {
  return nlohmann::json{{"grid_n", r.grid_n},
                        {"length_original", r.length_original},
                        {"length_normalized", r.length_normalized},
                        {"e", r.e},
                        {"e0", r.e0},
                        {"e1", r.e1},
                        {"e2", r.e2},
                        {"sign_variant", to_string(r.variant)},
                        {"x_cross_integral", r.x_cross_integral},
                        {"antipodal_integral", r.antipodal_integral},
                        {"e1_via_x", r.e1_via_x},
                        {"e2_via_x", r.e2_via_x},
                        {"e0_via_c", r.e0_via_c},
                        {"residual_cosine", r.residual_cosine},
                        {"residual_decomposition", r.residual_decomposition},
                        {"family", r.family},
                        {"params", r.params}};
}

XRoute e1_e2_via_x(const ArcLengthCurve& curve, int grid_n, SignVariant variant,
                   double e0_direct) {
  const ArcLengthCurve c = normalized(curve);
  const PairGrid grid = make_pair_grid(c.length(), grid_n);
  const GridCache cache = build_cache(c, grid);
  XRoute x;
  x.cross = integrate_pair(grid, [&](int i, int j) {
    const PairCore pc = core_at(cache, grid, i, j);
    const DensityBundle b = density_bundle_core(pc);
    return x_value_core(pc) * (b.m - b.m0 + 2.0 / (pc.ds * pc.ds));
  });
  x.antipodal = (4.0 / c.length()) *
                integrate_loop(c.length(), grid_n, [&](double s) { return antipodal_x(c, s); });
  const double signed_a = variant == SignVariant::proof_plus ? -x.antipodal : x.antipodal;
  x.e2 = -x.cross + signed_a - 8.0;
  x.e1 = e0_direct - x.e2;
  return x;
}

double e0_via_c(const ClosedCurve& c, int grid_n) {
  const PairGrid grid = make_pair_grid(1.0, grid_n);
  const int dim = c.dimension();
  Mat p1(dim, grid_n), d1(dim, grid_n), p2(dim, grid_n), d2(dim, grid_n);
  Vec v1(grid_n), v2(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    Jet2 ja = c.jet(grid.s1(i));
    Jet2 jb = c.jet(grid.s2(i));
    p1.col(i) = ja.p;
    d1.col(i) = ja.d1;
    p2.col(i) = jb.p;
    d2.col(i) = jb.d1;
    v1[i] = ja.d1.norm();
    v2[i] = jb.d1.norm();
  }
  return integrate_pair(grid, [&](int i, int j) {
    double c2 = 0, f1df = 0, f2df = 0, f12 = 0;
    for (int d = 0; d < dim; ++d) {
      const double dd = p1(d, i) - p2(d, j);
      c2 += dd * dd;
      f1df += d1(d, i) * dd;
      f2df += d2(d, j) * dd;
      f12 += d1(d, i) * d2(d, j);
    }
    // C + (1/2) d2 log C
    return v1[i] * v2[j] / c2 + f12 / c2 - 2.0 * f1df * f2df / (c2 * c2);
  });
}

std::map<std::string, double> identity_suite(const ArcLengthCurve& curve, int grid_n,
                                             std::uint64_t seed) {
  const ArcLengthCurve c = normalized(curve);
  const EnergyReport r = energy_report(c, grid_n, SignVariant::proof_plus);

  std::map<std::string, double> out;
  out["cosine_formula"] = r.residual_cosine;
  out["decomposition"] = r.residual_decomposition;
  out["e0_split"] = std::abs(r.e0 - r.e1 - r.e2);
  out["x_route_proof_plus"] = std::abs(r.e1_via_x - r.e1);
  const double e2_printed = -r.x_cross_integral + r.antipodal_integral - 8.0;
  out["x_route_printed_minus"] = std::abs((r.e0 - e2_printed) - r.e1);
  out["c_route"] = std::abs(r.e0_via_c - r.e0);

  // pointwise identities over seeded random pairs
  const int npairs = 100000;
  const double L = c.length();
  Rng rng(seed);
  std::vector<double> s1(npairs), s2(npairs);
  for (int k = 0; k < npairs; ++k) {
    s1[k] = rng.uniform(0.0, L);
    double ds;
    do {
      ds = rng.uniform(-0.49 * L, 0.49 * L);
    } while (std::abs(ds) < 1e-9 * L);
    s2[k] = s1[k] - ds;
  }
  double worst_m0 = 0, worst_xd = 0;
#pragma omp parallel for schedule(static) reduction(max : worst_m0, worst_xd)
  for (int k = 0; k < npairs; ++k) {
    const PairGeometry g = pair_geometry(c, s1[k], s2[k]);
    const PairCore pc = pair_core(g);
    const DensityBundle b = density_bundle_core(pc);
    const XBundle x = x_bundle_core(pc, L);
    worst_m0 = std::max(worst_m0, std::abs(b.m0 - b.m1 - b.m2) / (1.0 + std::abs(b.m0)));
    const double scale = 1.0 + 2.0 / (pc.ds * pc.ds) + 2.0 / pc.chord2;
    const double drift = (2.0 / pc.ds) * (x.dx_ds1 - x.dx_ds2);
    const double quad = x.dx_ds1 * x.dx_ds2;
    const double r_m = std::abs(2 * b.m - (2 * b.m0 - x.d2x));
    const double r_m1 = std::abs(2 * b.m1 - (2 * b.m0 - 2 * x.d2x + quad + drift));
    const double r_m2 = std::abs(2 * b.m2 - (2 * x.d2x - quad - drift));
    worst_xd = std::max(worst_xd, std::max({r_m, r_m1, r_m2}) / scale);
  }
  out["pointwise_m0"] = worst_m0;
  out["x_density_pointwise"] = worst_xd;
  return out;
}

}  // namespace mobius
