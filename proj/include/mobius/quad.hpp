#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace mobius {

/// Staggered pair grid on (R/period)^2:
///   s1_i = i h,  s2_j = (j + 1/2) h,  h = period / n,  n even.
/// No node pair ever has ds = 0 or |ds| = period/2, so integrands may assume
/// both the diagonal and the antipodal set are excluded structurally.
struct PairGrid {
  double period = 0;
  int n = 0;
  double h() const { return period / n; }
  double s1(int i) const { return i * h(); }
  double s2(int j) const { return (j + 0.5) * h(); }
};

/// Throws std::invalid_argument unless n is even and >= 8.
PairGrid make_pair_grid(double period, int n);

/// Deterministic fixed-order cascade sum; the result depends only on the
/// values, never on thread count or call context.
double pairwise_sum(std::span<const double> values);

using PairIndexField = std::function<double(int i, int j)>;
using MultiPairField = std::function<void(int i, int j, double* out)>;

/// Rectangle-rule sum of field over the staggered grid, row-parallel with a
/// fixed-order pairwise reduction: bit-identical across worker counts.
/// Throws std::runtime_error naming the offending pair if a value is not
/// finite.
double integrate_pair(const PairGrid& grid, const PairIndexField& field);

/// Same pass evaluated once per pair for m simultaneous components.
std::vector<double> integrate_pair_multi(const PairGrid& grid, const MultiPairField& field,
                                         int m);

namespace reference {
/// Serial left-to-right accumulation; kept as the plain reference the
/// parallel kernel is checked and benchmarked against.
double integrate_pair(const PairGrid& grid, const PairIndexField& field);
}  // namespace reference

/// Midpoint rule for loop integrals over one period.
double integrate_loop(double period, int n, const std::function<double(double)>& f);

/// Principal-value style band exclusion: for each eps = k h the pairs with
/// intrinsic |ds| < eps are dropped (whole cells, exactly representable).
/// The report carries the band sums, the symmetrized band sums (averaging the
/// swapped-argument value when provided), a convergence order estimated from
/// the last three symmetrized values, and the Richardson limit from the last
/// two.
struct PvReport {
  std::vector<double> eps;
  std::vector<double> values;
  std::vector<double> values_symmetrized;
  double order = 0;
  double extrapolated = 0;
  bool converged = false;
};

struct PvInput {
  PairIndexField value;          // g(s1_i, s2_j)
  PairIndexField value_swapped;  // g(s2_j, s1_i); may be null
};

PvReport pv_pair(const PairGrid& grid, const PvInput& input,
                 std::vector<int> eps_cells = {4, 2, 1});

/// Values of one quantity on a doubling sequence of grids, the observed
/// convergence order from the last three, and the Richardson extrapolation
/// from the last two. order/extrapolated require >= 3 grids (else NaN/last).
struct ConvergenceReport {
  std::vector<int> grids;
  std::vector<double> values;
  double order = 0;
  double extrapolated = 0;
};

ConvergenceReport convergence_study(const std::function<double(int n)>& value_at,
                                    const std::vector<int>& grids);

nlohmann::json convergence_to_json(const ConvergenceReport& r);

}  // namespace mobius
