#include "mobius/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mobius/densities.hpp"

namespace mobius {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Cache {
  int n = 0;
  int dim = 0;
  double length = 0;
  Mat p1, t1, p2, t2;
};

Cache sample_curve(const ArcLengthCurve& c, const PairGrid& g, double shift = 0.0) {
  Cache cache;
  cache.n = g.n;
  cache.dim = c.dimension();
  cache.length = c.length();
  cache.p1.resize(cache.dim, g.n);
  cache.t1.resize(cache.dim, g.n);
  cache.p2.resize(cache.dim, g.n);
  cache.t2.resize(cache.dim, g.n);
  for (int i = 0; i < g.n; ++i) {
    cache.p1.col(i) = c.point(g.s1(i) + shift);
    cache.t1.col(i) = c.unit_tangent(g.s1(i) + shift);
    cache.p2.col(i) = c.point(g.s2(i) + shift);
    cache.t2.col(i) = c.unit_tangent(g.s2(i) + shift);
  }
  return cache;
}

inline PairCore core_at(const Cache& c, const PairGrid& g, int i, int j) {
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

// Round circle of length L: Xc(ds) = log(ds^2 / ((L/pi)^2 sin^2(pi |ds| / L))).
double circle_x(double ds, double length) {
  const double a = std::numbers::pi * std::abs(ds) / length;
  const double chord = (length / std::numbers::pi) * std::sin(a);
  return std::log((ds * ds) / (chord * chord));
}

BoundLine line(std::string name, double lhs, double rhs) {
  BoundLine b;
  b.name = std::move(name);
  b.lhs = lhs;
  b.rhs = rhs;
  b.slack = rhs - lhs;
  b.satisfied = b.slack >= -1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));
  return b;
}

}  // namespace

double sup_x(const ArcLengthCurve& c, int grid_n) {
  const PairGrid g = make_pair_grid(c.length(), grid_n);
  const Cache cache = sample_curve(c, g);
  double worst = 0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      worst = std::max(worst, x_value_core(core_at(cache, g, i, j)));
  for (int j = 0; j < g.n; ++j) {
    worst = std::max(worst, antipodal_x(c, g.s1(j)));
    worst = std::max(worst, antipodal_x(c, g.s2(j)));
  }
  return worst;
}

std::string to_string(BoundVariant v) {
  return v == BoundVariant::printed ? "printed" : "corrected";
}

std::vector<BoundLine> decomposition_bounds_check(const EnergyReport& r, double sup_x_value,
                                      BoundVariant variant) {
  const double x = sup_x_value;
  const double add = variant == BoundVariant::printed ? 4.0 * (4.0 + x) : 8.0 * (2.0 + x);
  const double e2_cap =
      variant == BoundVariant::printed ? x * (r.e0 + 4.0) - 8.0 : x * r.e0 - 8.0;
  std::vector<BoundLine> out;
  out.push_back(line("e1_nonneg", 0.0, r.e1));
  out.push_back(line("e1_upper", r.e1, (3.0 + x) * r.e0 + add));
  out.push_back(line("e2_lower", -(2.0 + x) * r.e0 - add, r.e2));
  out.push_back(line("e2_upper_x", r.e2, e2_cap));
  out.push_back(line("e2_upper_e0", r.e2, r.e0));
  return out;
}

std::vector<BoundLine> decomposition_bounds_check(const ArcLengthCurve& c, int grid_n, BoundVariant variant) {
  return decomposition_bounds_check(energy_report(c, grid_n), sup_x(c, grid_n), variant);
}

nlohmann::json bounds_to_json(const std::vector<BoundLine>& lines) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : lines)
    arr.push_back({{"name", b.name},
                   {"lhs", b.lhs},
                   {"rhs", b.rhs},
                   {"slack", b.slack},
                   {"satisfied", b.satisfied}});
  return arr;
}

std::string bounds_table(const std::vector<BoundLine>& lines) {
  std::string out = "name            lhs             rhs             slack           ok\n";
  char buf[160];
  for (const auto& b : lines) {
    std::snprintf(buf, sizeof(buf), "%-14s %15.8f %15.8f %15.8f  %s\n", b.name.c_str(), b.lhs,
                  b.rhs, b.slack, b.satisfied ? "yes" : "NO");
    out += buf;
  }
  return out;
}

PairComparison::PairComparison(const ArcLengthCurve& a, const ArcLengthCurve& b)
    : f(rescale_to_length(a, kTwoPi)), ft(rescale_to_length(b, kTwoPi)) {}

DifferenceReport difference_identity(const PairComparison& pc, int grid_n) {
  const PairGrid g = make_pair_grid(kTwoPi, grid_n);
  const Cache cf = sample_curve(pc.f, g);
  const Cache ct = sample_curve(pc.ft, g);

  auto field = [&](int i, int j, double* out) {
    const PairCore a = core_at(cf, g, i, j);
    const PairCore b = core_at(ct, g, i, j);
    const DensityBundle da = density_bundle_core(a);
    const DensityBundle db = density_bundle_core(b);
    out[0] = da.m0;
    out[1] = da.m1;
    out[2] = da.m2;
    out[3] = db.m0;
    out[4] = db.m1;
    out[5] = db.m2;
    out[6] = (x_value_core(a) - x_value_core(b)) *
             (da.m - da.m0 + db.m - db.m0 + 2.0 / (a.ds * a.ds));
  };
  const std::vector<double> v = integrate_pair_multi(g, field, 7);

  DifferenceReport r;
  r.cross_integral = v[6];
  r.lhs1 = v[2] - v[5];
  r.rhs1 = -v[6];
  r.resid1 = std::abs(r.lhs1 - r.rhs1);
  r.lhs2 = v[1] - v[4];
  r.rhs2 = (v[0] - v[3]) + v[6];
  r.resid2 = std::abs(r.lhs2 - r.rhs2);
  return r;
}

ContinuityBoundReport continuity_bound_check(const PairComparison& pc, int grid_n, int shifts,
                              double shift_origin) {
  if (shifts < 1) throw std::invalid_argument("continuity bound: need at least one shift");
  const PairGrid g = make_pair_grid(kTwoPi, grid_n);
  const Cache cf = sample_curve(pc.f, g);
  const Cache ct0 = sample_curve(pc.ft, g);

  auto field = [&](int i, int j, double* out) {
    const DensityBundle da = density_bundle_core(core_at(cf, g, i, j));
    const DensityBundle db = density_bundle_core(core_at(ct0, g, i, j));
    out[0] = da.m0;
    out[1] = da.m1;
    out[2] = da.m2;
    out[3] = db.m0;
    out[4] = db.m1;
    out[5] = db.m2;
  };
  const std::vector<double> v = integrate_pair_multi(g, field, 6);
  const double e0f = v[0], e1f = v[1], e2f = v[2];
  const double e0t = v[3], e1t = v[4], e2t = v[5];

  // X of f on the grid, reused by every shift.
  std::vector<double> xf(std::size_t(g.n) * g.n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      xf[std::size_t(i) * g.n + j] = x_value_core(core_at(cf, g, i, j));

  ContinuityBoundReport r;
  r.t_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < shifts; ++k) {
    const double a = shift_origin + k * (kTwoPi / shifts);
    const Cache cs = sample_curve(pc.ft, g, a);
    double sup_diff = 0;
#pragma omp parallel for schedule(static) reduction(max : sup_diff)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        sup_diff = std::max(sup_diff, std::abs(xf[std::size_t(i) * g.n + j] -
                                               x_value_core(core_at(cs, g, i, j))));
    const double integral = integrate_pair(g, [&](int i, int j) {
      const PairCore b = core_at(cs, g, i, j);
      return (xf[std::size_t(i) * g.n + j] - x_value_core(b)) / (b.ds * b.ds);
    });
    const double t = sup_diff * (e0f + e0t + 4.0) + std::abs(integral);
    if (t < r.t_min) {
      r.t_min = t;
      r.best_shift = a;
    }
  }

  r.lhs1 = std::abs(e1f - e1t);
  r.rhs1 = std::abs(e0f - e0t) + 2.0 * r.t_min;
  r.lhs2 = std::abs(e2f - e2t);
  r.rhs2 = 2.0 * r.t_min;
  const double eps1 = 1e-9 * (1.0 + r.rhs1);
  const double eps2 = 1e-9 * (1.0 + r.rhs2);
  r.ok1 = r.lhs1 <= r.rhs1 + eps1;
  r.ok2 = r.lhs2 <= r.rhs2 + eps2;
  return r;
}

CircleComparisonReport circle_comparison_check(const ArcLengthCurve& c, int grid_n) {
  const double L = c.length();
  const PairGrid g = make_pair_grid(L, grid_n);
  const Cache cache = sample_curve(c, g);

  auto field = [&](int i, int j, double* out) {
    const PairCore pc = core_at(cache, g, i, j);
    const DensityBundle b = density_bundle_core(pc);
    out[0] = b.m0;
    out[1] = b.m1;
    out[2] = b.m2;
    out[3] = (x_value_core(pc) - circle_x(pc.ds, L)) / (pc.ds * pc.ds);
  };
  const std::vector<double> v = integrate_pair_multi(g, field, 4);
  const double e0 = v[0], e1 = v[1], e2 = v[2], integral = v[3];

  double sup_diff = 0;
#pragma omp parallel for schedule(static) reduction(max : sup_diff)
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const PairCore pc = core_at(cache, g, i, j);
      sup_diff = std::max(sup_diff, std::abs(x_value_core(pc) - circle_x(pc.ds, L)));
    }
  const double xc_half = std::log(std::numbers::pi * std::numbers::pi / 4.0);
  for (int j = 0; j < g.n; ++j) {
    sup_diff = std::max(sup_diff, std::abs(antipodal_x(c, g.s1(j)) - xc_half));
    sup_diff = std::max(sup_diff, std::abs(antipodal_x(c, g.s2(j)) - xc_half));
  }

  const double t = sup_diff * (e0 + 4.0) + std::abs(integral);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CircleComparisonReport r;
  r.lhs1 = std::abs(e1 - 2.0 * pi2);
  r.rhs1 = e0 + 2.0 * t;
  r.lhs2 = std::abs(e2 + 2.0 * pi2);
  r.rhs2 = 2.0 * t;
  r.ok1 = r.lhs1 <= r.rhs1 + 1e-9 * (1.0 + r.rhs1);
  r.ok2 = r.lhs2 <= r.rhs2 + 1e-9 * (1.0 + r.rhs2);
  return r;
}

JetCurve jet_curve(const ClosedCurve& c) {
  return [c](double theta) { return c.jet(theta); };
}

JetCurve jet_curve(const ClosedCurve& c, const MoebiusMap& m) {
  return [c, m](double theta) { return m.apply_jet(c.jet(theta)); };
}

namespace {

struct JetCache {
  std::vector<Jet2> j1, j2;
};

JetCache sample_jets(const JetCurve& f, const PairGrid& g) {
  JetCache c;
  c.j1.resize(g.n);
  c.j2.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    c.j1[i] = f(g.s1(i));
    c.j2[i] = f(g.s2(i));
  }
  return c;
}

inline double log_derivative_product(const Jet2& a, const Jet2& b) {
  const CBundle cb = c_bundle_jets(a, b);
  return cb.dlogc_dt1 * cb.dlogc_dt2;
}

}  // namespace

DiffCReport diff_via_c_jets(const JetCurve& f, const JetCurve& ft, double de2_direct, int grid_n,
                            std::vector<int> eps_cells) {
  const PairGrid g = make_pair_grid(1.0, grid_n);
  const JetCache cf = sample_jets(f, g);
  const JetCache ct = sample_jets(ft, g);

  PvInput input;
  input.value = [&](int i, int j) {
    return log_derivative_product(cf.j1[i], cf.j2[j]) -
           log_derivative_product(ct.j1[i], ct.j2[j]);
  };
  input.value_swapped = [&](int i, int j) {
    return log_derivative_product(cf.j2[j], cf.j1[i]) -
           log_derivative_product(ct.j2[j], ct.j1[i]);
  };

  DiffCReport r;
  r.pv = pv_pair(g, input, std::move(eps_cells));
  r.de2_via_c = -0.5 * r.pv.extrapolated;
  r.de2_direct = de2_direct;
  r.resid = std::abs(r.de2_via_c - r.de2_direct);
  return r;
}

DiffCReport diff_via_c(const ClosedCurve& f, const ClosedCurve& ft, int grid_n,
                       std::vector<int> eps_cells) {
  const double de2 = energy_report(reparametrize_arclength(f), grid_n).e2 -
                     energy_report(reparametrize_arclength(ft), grid_n).e2;
  return diff_via_c_jets(jet_curve(f), jet_curve(ft), de2, grid_n, std::move(eps_cells));
}

double pv_integrand_max(const JetCurve& f, const JetCurve& ft, int grid_n) {
  const PairGrid g = make_pair_grid(1.0, grid_n);
  const JetCache cf = sample_jets(f, g);
  const JetCache ct = sample_jets(ft, g);
  double worst = 0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      // restrict to the pairs the PV bands integrate; the half-cell ring next
      // to the diagonal is never summed and only measures rounding blow-up
      if (std::abs(wrap_signed(g.s1(i) - g.s2(j), g.period)) < g.h()) continue;
      worst = std::max(worst, std::abs(log_derivative_product(cf.j1[i], cf.j2[j]) -
                                       log_derivative_product(ct.j1[i], ct.j2[j])));
    }
  return worst;
}

}  // namespace mobius
