#include "mobius/quad.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mobius {

PairGrid make_pair_grid(double period, int n) {
  if (!(period > 0)) throw std::invalid_argument("pair grid: period must be positive");
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("pair grid: n must be even and >= 8");
  return PairGrid{period, n};
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 8) {
    double s = 0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

struct BadPair {
  bool found = false;
  int i = 0, j = 0;
};

[[noreturn]] void throw_bad_pair(const PairGrid& g, const BadPair& bp) {
  throw std::runtime_error("integrate: non-finite field value at pair (s1=" +
                           std::to_string(g.s1(bp.i)) + ", s2=" + std::to_string(g.s2(bp.j)) +
                           ")");
}

}  // namespace

double integrate_pair(const PairGrid& grid, const PairIndexField& field) {
  const int n = grid.n;
  std::vector<double> rows(n);
  BadPair bad;
#pragma omp parallel
  {
    std::vector<double> vals(n);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = field(i, j);
        if (!std::isfinite(v)) {
#pragma omp critical
          {
            if (!bad.found) bad = {true, i, j};
          }
          v = 0;
        }
        vals[j] = v;
      }
      rows[i] = pairwise_sum(vals);
    }
  }
  if (bad.found) throw_bad_pair(grid, bad);
  return pairwise_sum(rows) * grid.h() * grid.h();
}

std::vector<double> integrate_pair_multi(const PairGrid& grid, const MultiPairField& field,
                                         int m) {
  const int n = grid.n;
  std::vector<double> rows(std::size_t(m) * n);
  BadPair bad;
#pragma omp parallel
  {
    std::vector<double> vals(std::size_t(m) * n);
    std::vector<double> cell(m);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        field(i, j, cell.data());
        for (int c = 0; c < m; ++c) {
          if (!std::isfinite(cell[c])) {
#pragma omp critical
            {
              if (!bad.found) bad = {true, i, j};
            }
            cell[c] = 0;
          }
          vals[std::size_t(c) * n + j] = cell[c];
        }
      }
      for (int c = 0; c < m; ++c)
        rows[std::size_t(c) * n + i] =
            pairwise_sum(std::span<const double>(vals).subspan(std::size_t(c) * n, n));
    }
  }
  if (bad.found) throw_bad_pair(grid, bad);
  std::vector<double> out(m);
  const double w = grid.h() * grid.h();
  for (int c = 0; c < m; ++c)
    out[c] = pairwise_sum(std::span<const double>(rows).subspan(std::size_t(c) * n, n)) * w;
  return out;
}

namespace reference {

double integrate_pair(const PairGrid& grid, const PairIndexField& field) {
  double s = 0;
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) {
      double v = field(i, j);
      if (!std::isfinite(v)) throw_bad_pair(grid, {true, i, j});
      s += v;
    }
  return s * grid.h() * grid.h();
}

}  // namespace reference

double integrate_loop(double period, int n, const std::function<double(double)>& f) {
  if (!(period > 0) || n < 1) throw std::invalid_argument("loop integral: bad period or n");
  const double h = period / n;
  std::vector<double> vals(n);
  for (int j = 0; j < n; ++j) {
    vals[j] = f((j + 0.5) * h);
    if (!std::isfinite(vals[j]))
      throw std::runtime_error("loop integral: non-finite value at s=" +
                               std::to_string((j + 0.5) * h));
  }
  return pairwise_sum(vals) * h;
}

namespace {

// Half-integer offset of the staggered pair (i, j), centered into
// (-n/2, n/2]; the intrinsic |ds| equals |offset| * h.
double centered_offset(int i, int j, int n) {
  double q = double(i - j) - 0.5;
  q -= n * std::round(q / n);
  if (q == -double(n) / 2) q = double(n) / 2;
  return q;
}

double band_sum(const PairGrid& grid, const PairIndexField& f, int excluded_cells) {
  const int n = grid.n;
  std::vector<double> rows(n);
#pragma omp parallel
  {
    std::vector<double> vals(n);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      int used = 0;
      for (int j = 0; j < n; ++j) {
        double q = centered_offset(i, j, n);
        if (std::abs(q) < excluded_cells) continue;
        vals[used++] = f(i, j);
      }
      rows[i] = pairwise_sum(std::span<const double>(vals).first(used));
    }
  }
  return pairwise_sum(rows) * grid.h() * grid.h();
}

}  // namespace

PvReport pv_pair(const PairGrid& grid, const PvInput& input, std::vector<int> eps_cells) {
  if (!input.value) throw std::invalid_argument("pv: missing field");
  if (eps_cells.size() < 2) throw std::invalid_argument("pv: need at least two band widths");
  for (std::size_t k = 1; k < eps_cells.size(); ++k)
    if (eps_cells[k] >= eps_cells[k - 1] || eps_cells[k] < 1)
      throw std::invalid_argument("pv: band widths must decrease and stay >= 1");

  PvReport r;
  for (int k : eps_cells) {
    r.eps.push_back(k * grid.h());
    r.values.push_back(band_sum(grid, input.value, k));
    if (input.value_swapped) {
      double sw = band_sum(grid, input.value_swapped, k);
      r.values_symmetrized.push_back(0.5 * (r.values.back() + sw));
    } else {
      r.values_symmetrized.push_back(r.values.back());
    }
  }
  const auto& v = r.values_symmetrized;
  const std::size_t m = v.size();
  r.extrapolated = v.back();
  r.order = std::numeric_limits<double>::quiet_NaN();
  double d_prev = (m >= 3) ? v[m - 2] - v[m - 3] : 0;
  double d_last = v[m - 1] - v[m - 2];
  if (d_last == 0) {
    r.converged = true;
    return r;
  }
  if (m >= 3 && d_prev != 0 && std::abs(d_last) < std::abs(d_prev)) {
    // assumes the band ratio between the last three entries is 2
    r.order = std::log2(std::abs(d_prev / d_last));
    r.extrapolated = v.back() + d_last / (std::pow(2.0, r.order) - 1.0);
    r.converged = true;
  } else if (m == 2) {
    r.order = 1.0;
    r.extrapolated = v.back() + d_last;  // first-order Richardson
    r.converged = true;
  } else {
    r.converged = false;
  }
  return r;
}

ConvergenceReport convergence_study(const std::function<double(int n)>& value_at,
                                    const std::vector<int>& grids) {
  if (grids.size() < 2) throw std::invalid_argument("convergence study: need >= 2 grids");
  for (std::size_t k = 1; k < grids.size(); ++k)
    if (grids[k] != 2 * grids[k - 1])
      throw std::invalid_argument("convergence study: grids must double");
  ConvergenceReport r;
  r.grids = grids;
  for (int n : grids) r.values.push_back(value_at(n));
  const auto& v = r.values;
  const std::size_t m = v.size();
  r.order = std::numeric_limits<double>::quiet_NaN();
  r.extrapolated = v.back();
  if (m >= 3) {
    double d1 = v[m - 2] - v[m - 3];
    double d2 = v[m - 1] - v[m - 2];
    if (d1 != 0 && d2 != 0 && std::abs(d2) < std::abs(d1)) {
      r.order = std::log2(std::abs(d1 / d2));
      r.extrapolated = v.back() + d2 / (std::pow(2.0, r.order) - 1.0);
    }
  }
  return r;
}

nlohmann::json convergence_to_json(const ConvergenceReport& r) {
  return nlohmann::json{{"grids", r.grids},
                        {"values", r.values},
                        {"order", r.order},
                        {"extrapolated", r.extrapolated}};
}

}  // namespace mobius
