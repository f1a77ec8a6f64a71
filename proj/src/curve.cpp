#include "mobius/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "mobius/densities.hpp"
#include "mobius/rng.hpp"

namespace mobius {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

}  // namespace

ClosedCurve::ClosedCurve(Mat cos_coef, Mat sin_coef)
    : cos_coef_(std::move(cos_coef)), sin_coef_(std::move(sin_coef)) {
  if (cos_coef_.rows() < 2) throw std::invalid_argument("curve: dimension must be >= 2");
  if (cos_coef_.cols() < 2) throw std::invalid_argument("curve: need at least one Fourier mode");
  if (sin_coef_.rows() != cos_coef_.rows() || sin_coef_.cols() != cos_coef_.cols())
    throw std::invalid_argument("curve: coefficient matrices must have matching shape");
  if (!cos_coef_.allFinite() || !sin_coef_.allFinite())
    throw std::invalid_argument("curve: coefficients must be finite");
  sin_coef_.col(0).setZero();
}

Vec ClosedCurve::point(double theta) const {
  const double r = frac(theta);
  const int n = dimension(), K = modes();
  Vec out = cos_coef_.col(0);
  for (int k = 1; k <= K; ++k) {
    const double w = kTwoPi * k * r;
    const double c = std::cos(w), s = std::sin(w);
    for (int d = 0; d < n; ++d) out[d] += cos_coef_(d, k) * c + sin_coef_(d, k) * s;
  }
  return out;
}

Vec ClosedCurve::derivative(double theta, int order) const {
  if (order < 1 || order > 2) throw std::invalid_argument("curve: derivative order must be 1 or 2");
  const double r = frac(theta);
  const int n = dimension(), K = modes();
  Vec out = Vec::Zero(n);
  for (int k = 1; k <= K; ++k) {
    const double w = kTwoPi * k * r;
    const double c = std::cos(w), s = std::sin(w);
    const double f = kTwoPi * k;
    if (order == 1) {
      for (int d = 0; d < n; ++d) out[d] += f * (-cos_coef_(d, k) * s + sin_coef_(d, k) * c);
    } else {
      const double f2 = f * f;
      for (int d = 0; d < n; ++d) out[d] -= f2 * (cos_coef_(d, k) * c + sin_coef_(d, k) * s);
    }
  }
  return out;
}

Jet2 ClosedCurve::jet(double theta) const {
  const double r = frac(theta);
  const int n = dimension(), K = modes();
  Jet2 j{cos_coef_.col(0), Vec::Zero(n), Vec::Zero(n)};
  for (int k = 1; k <= K; ++k) {
    const double w = kTwoPi * k * r;
    const double c = std::cos(w), s = std::sin(w);
    const double f = kTwoPi * k, f2 = f * f;
    for (int d = 0; d < n; ++d) {
      const double a = cos_coef_(d, k), b = sin_coef_(d, k);
      j.p[d] += a * c + b * s;
      j.d1[d] += f * (-a * s + b * c);
      j.d2[d] -= f2 * (a * c + b * s);
    }
  }
  return j;
}

double ClosedCurve::speed(double theta) const { return derivative(theta, 1).norm(); }

double ClosedCurve::total_length(double rel_tol) const {
  constexpr int kMaxNodes = 1 << 20;
  int n = 64;
  auto midpoint_sum = [this](int m) {
    double h = 1.0 / m;
    std::vector<double> v(m);
    for (int j = 0; j < m; ++j) v[j] = speed((j + 0.5) * h);
    double s = 0;
    for (double x : v) s += x;
    return s * h;
  };
  double prev = midpoint_sum(n);
  while (n <= kMaxNodes) {
    n *= 2;
    double cur = midpoint_sum(n);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw std::runtime_error("curve: total length did not converge to requested tolerance");
}

ClosedCurve ClosedCurve::scaled(double factor) const {
  if (!(factor > 0) || !std::isfinite(factor))
    throw std::invalid_argument("curve: scale factor must be positive and finite");
  ClosedCurve out(cos_coef_ * factor, sin_coef_ * factor);
  out.family = family;
  out.params = params;
  return out;
}

// ---------------- families ----------------

namespace {

ClosedCurve finish_family(Mat a, Mat b, std::string name, std::map<std::string, double> params) {
  ClosedCurve c(std::move(a), std::move(b));
  c.family = std::move(name);
  c.params = std::move(params);
  validate_embedded(c);
  return c;
}

}  // namespace

ClosedCurve make_circle(double radius, int dimension) {
  if (!(radius > 0)) throw std::invalid_argument("circle: radius must be positive");
  if (dimension < 2) throw std::invalid_argument("circle: dimension must be >= 2");
  Mat a = Mat::Zero(dimension, 2), b = Mat::Zero(dimension, 2);
  a(0, 1) = radius;
  b(1, 1) = radius;
  return finish_family(a, b, "circle", {{"radius", radius}});
}

ClosedCurve make_ellipse(double ax, double bx, int dimension) {
  if (!(ax > 0) || !(bx > 0)) throw std::invalid_argument("ellipse: semi-axes must be positive");
  if (dimension < 2) throw std::invalid_argument("ellipse: dimension must be >= 2");
  Mat a = Mat::Zero(dimension, 2), b = Mat::Zero(dimension, 2);
  a(0, 1) = ax;
  b(1, 1) = bx;
  return finish_family(a, b, "ellipse", {{"a", ax}, {"b", bx}});
}

ClosedCurve make_torus_knot(int p, int q, double R, double r, int dimension) {
  if (p < 1 || q < 1) throw std::invalid_argument("torus_knot: p and q must be positive");
  if (std::gcd(p, q) != 1) throw std::invalid_argument("torus_knot: p and q must be coprime");
  if (!(r > 0) || !(r < R)) throw std::invalid_argument("torus_knot: need 0 < r < R");
  if (dimension < 3) throw std::invalid_argument("torus_knot: dimension must be >= 3");
  const int K = p + q;
  Mat a = Mat::Zero(dimension, K + 1), b = Mat::Zero(dimension, K + 1);
  // (R + r cos(q w)) cos(p w), (R + r cos(q w)) sin(p w), r sin(q w)  with w = 2 pi theta
  a(0, p) += R;
  a(0, p + q) += r / 2;
  b(1, p) += R;
  b(1, p + q) += r / 2;
  if (p > q) {
    a(0, p - q) += r / 2;
    b(1, p - q) += r / 2;
  } else if (q > p) {
    a(0, q - p) += r / 2;
    b(1, q - p) -= r / 2;
  } else {
    a(0, 0) += r / 2;  // p == q == 1
  }
  b(2, q) = r;
  return finish_family(a, b, "torus_knot",
                       {{"p", double(p)}, {"q", double(q)}, {"R", R}, {"r", r}});
}

ClosedCurve make_perturbed_circle(std::uint64_t seed, double amplitude, int dimension) {
  if (!(amplitude >= 0) || amplitude > 0.3)
    throw std::invalid_argument("perturbed_circle: amplitude must be in [0, 0.3]");
  if (dimension < 2) throw std::invalid_argument("perturbed_circle: dimension must be >= 2");
  const int K = 4;
  Mat a = Mat::Zero(dimension, K + 1), b = Mat::Zero(dimension, K + 1);
  a(0, 1) = 1.0;
  b(1, 1) = 1.0;
  Rng rng(seed);
  for (int k = 2; k <= K; ++k)
    for (int d = 0; d < dimension; ++d) {
      a(d, k) = amplitude * rng.uniform(-1.0, 1.0) / k;
      b(d, k) = amplitude * rng.uniform(-1.0, 1.0) / k;
    }
  return finish_family(a, b, "perturbed_circle",
                       {{"seed", double(seed)}, {"amplitude", amplitude}});
}

ClosedCurve make_family(const std::string& name, const std::map<std::string, double>& params,
                        int dimension) {
  auto get = [&params](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "circle") return make_circle(get("radius", 1.0), dimension);
  if (name == "ellipse") return make_ellipse(get("a", 2.0), get("b", 1.0), dimension);
  if (name == "torus_knot")
    return make_torus_knot(int(get("p", 2)), int(get("q", 3)), get("R", 2.0), get("r", 0.5),
                           dimension);
  if (name == "perturbed_circle")
    return make_perturbed_circle(std::uint64_t(get("seed", 7)), get("amplitude", 0.05), dimension);
  throw std::invalid_argument("unknown curve family: " + name);
}

void validate_embedded(const ClosedCurve& c, int check_nodes) {
  const int m = check_nodes;
  const int n = c.dimension();
  Mat pts(n, m);
  double min_speed = std::numeric_limits<double>::infinity();
  double scale = 0;
  for (int j = 0; j < m; ++j) {
    double t = double(j) / m;
    pts.col(j) = c.point(t);
    min_speed = std::min(min_speed, c.speed(t));
    scale = std::max(scale, pts.col(j).norm());
  }
  double diameter = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double d = (pts.col(i) - pts.col(j)).norm();
      diameter = std::max(diameter, d);
      int sep = std::min(j - i, m - (j - i));
      if (sep >= 2) min_gap = std::min(min_gap, d);
    }
  if (!(min_speed > 1e-12 * std::max(scale, 1.0)))
    throw std::invalid_argument("curve: not an immersion (vanishing speed at a check node)");
  if (!(min_gap > 1e-9 * diameter))
    throw std::invalid_argument("curve: embeddedness proxy failed (near self-intersection)");
}

// ---------------- arc-length reparametrization ----------------

ArcLengthCurve::ArcLengthCurve(ClosedCurve unit_speed_curve, double length, double speed_residual)
    : curve_(std::move(unit_speed_curve)), length_(length), speed_residual_(speed_residual) {
  if (!(length_ > 0)) throw std::invalid_argument("arc-length curve: length must be positive");
}

Vec ArcLengthCurve::unit_tangent(double s) const {
  Vec d = curve_.derivative(s / length_, 1);
  return d / d.norm();
}

namespace {

// Spectral antiderivative of the speed: S(theta) = mean * theta + periodic part.
struct SpeedIntegral {
  double mean = 0;
  std::vector<double> alpha, beta;  // cos/sin DFT coefficients, k = 1..K

  double eval(double theta) const {
    const double w1 = kTwoPi * theta;
    const double c1 = std::cos(w1), s1 = std::sin(w1);
    double ck = 1.0, sk = 0.0;  // cos/sin of k*w1 via recurrence
    double acc = 0;
    for (std::size_t k = 1; k <= alpha.size(); ++k) {
      double cn = ck * c1 - sk * s1;
      double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      acc += (alpha[k - 1] * sk + beta[k - 1] * (ck - 1.0)) / (std::numbers::pi * k);
    }
    return mean * theta + acc;
  }
};

SpeedIntegral speed_integral(const ClosedCurve& c) {
  const int m = std::max(4096, 16 * (c.modes() + 1));
  std::vector<double> v(m);
  for (int j = 0; j < m; ++j) v[j] = c.speed(double(j) / m);
  SpeedIntegral si;
  double mean = 0;
  for (double x : v) mean += x;
  si.mean = mean / m;
  const int kmax = m / 2 - 1;
  si.alpha.reserve(256);
  si.beta.reserve(256);
  int tail = 0;  // stop once several consecutive modes are negligible
  for (int k = 1; k <= kmax; ++k) {
    double a = 0, b = 0;
    for (int j = 0; j < m; ++j) {
      double w = kTwoPi * k * j / m;
      a += v[j] * std::cos(w);
      b -= v[j] * std::sin(w);
    }
    a /= m;
    b /= m;
    si.alpha.push_back(a);
    si.beta.push_back(b);
    if (std::hypot(a, b) < 1e-17 * std::abs(si.mean)) {
      if (++tail >= 8) break;
    } else {
      tail = 0;
    }
  }
  return si;
}

// Safeguarded Newton on the monotone cumulative arc length.
double invert_arclength(const SpeedIntegral& si, const ClosedCurve& c, double target, double lo) {
  double hi = lo + 1.0;
  double th = lo + (target - si.eval(lo)) / std::max(si.mean, 1e-300);
  th = std::clamp(th, lo, hi);
  for (int it = 0; it < 200; ++it) {
    double g = si.eval(th) - target;
    if (std::abs(g) <= 1e-15 * si.mean) return th;
    if (g > 0)
      hi = th;
    else
      lo = th;
    double v = c.speed(th);
    double next = th - g / v;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    th = next;
  }
  return th;
}

struct Refit {
  Mat a, b;
};

Refit dft_refit(const Mat& samples, int K) {
  const int n = int(samples.rows()), m = int(samples.cols());
  Refit r{Mat::Zero(n, K + 1), Mat::Zero(n, K + 1)};
  for (int j = 0; j < m; ++j) r.a.col(0) += samples.col(j);
  r.a.col(0) /= m;
  for (int k = 1; k <= K; ++k) {
    Vec ac = Vec::Zero(n), bs = Vec::Zero(n);
    for (int j = 0; j < m; ++j) {
      double w = kTwoPi * k * j / m;
      ac += samples.col(j) * std::cos(w);
      bs += samples.col(j) * std::sin(w);
    }
    r.a.col(k) = ac * (2.0 / m);
    r.b.col(k) = bs * (2.0 / m);
  }
  return r;
}

double speed_residual_of(const ClosedCurve& c, double L, int check_nodes) {
  double worst = 0;
  for (int j = 0; j < check_nodes; ++j) {
    double u = (j + 0.37) / check_nodes;
    worst = std::max(worst, std::abs(c.speed(u) - L) / L);
  }
  return worst;
}

int trim_modes(const Mat& a, const Mat& b) {
  double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  int K = int(a.cols()) - 1;
  while (K > 1) {
    double mag = std::max(a.col(K).cwiseAbs().maxCoeff(), b.col(K).cwiseAbs().maxCoeff());
    if (mag > 1e-13 * scale) break;
    --K;
  }
  return K;
}

}  // namespace

ClosedCurve fit_closed_curve(const std::function<Vec(double)>& sample, int dimension, int modes,
                             int oversample) {
  if (dimension < 2) throw std::invalid_argument("fit: dimension must be >= 2");
  if (modes < 1) throw std::invalid_argument("fit: need at least one Fourier mode");
  if (oversample < 4) throw std::invalid_argument("fit: oversample must be >= 4");
  const int m = oversample * modes;
  Mat samples(dimension, m);
  for (int j = 0; j < m; ++j) {
    Vec p = sample(double(j) / m);
    if (int(p.size()) != dimension) throw std::invalid_argument("fit: sample dimension mismatch");
    samples.col(j) = p;
  }
  Refit r = dft_refit(samples, modes);
  int K_eff = trim_modes(r.a, r.b);
  return ClosedCurve(r.a.leftCols(K_eff + 1), r.b.leftCols(K_eff + 1));
}

ArcLengthCurve reparametrize_arclength(const ClosedCurve& c, double rel_tol, int max_modes) {
  validate_embedded(c);
  const SpeedIntegral si = speed_integral(c);
  const int n = c.dimension();

  int K = std::max(64, c.modes());
  while (true) {
    const int m = 8 * K;
    Mat samples(n, m);
    double lo = -1e-12;
    for (int j = 0; j < m; ++j) {
      double th = invert_arclength(si, c, si.mean * j / m, lo);
      lo = th - 1e-12;
      samples.col(j) = c.point(th);
    }
    Refit r = dft_refit(samples, K);
    // Trim by speed impact, not raw size: mode k feeds the speed residual
    // with weight 2 pi k / L, so a flat cutoff leaves a floor above rel_tol
    // whenever L is small relative to the coefficient scale.
    int K_eff = K;
    while (K_eff > 1) {
      const double mag =
          std::max(r.a.col(K_eff).cwiseAbs().maxCoeff(), r.b.col(K_eff).cwiseAbs().maxCoeff());
      if (mag > 0.02 * rel_tol * si.mean / (kTwoPi * K_eff)) break;
      --K_eff;
    }
    ClosedCurve fit(r.a.leftCols(K_eff + 1), r.b.leftCols(K_eff + 1));
    fit.family = c.family;
    fit.params = c.params;
    double Lfit = fit.total_length();
    double resid = speed_residual_of(fit, Lfit, std::max(4 * K, 256));
    if (resid <= rel_tol) return ArcLengthCurve(std::move(fit), Lfit, resid);
    if (K >= max_modes)
      throw std::runtime_error("reparametrize: speed residual did not reach tolerance at the mode cap");
    K = std::min(2 * K, max_modes);
  }
}

ArcLengthCurve rescale_to_length(const ArcLengthCurve& c, double target_length) {
  if (!(target_length > 0)) throw std::invalid_argument("rescale: target length must be positive");
  double f = target_length / c.length();
  return ArcLengthCurve(c.curve().scaled(f), target_length, c.speed_residual());
}

DistortionGap distortion_and_gap(const ArcLengthCurve& c, int grid_n) {
  const double L = c.length();
  const int N = grid_n;
  const double h = L / N;
  const int n = c.dimension();
  Mat p1(n, N), p2(n, N), pa(n, N);
  for (int i = 0; i < N; ++i) {
    p1.col(i) = c.point(i * h);
    p2.col(i) = c.point((i + 0.5) * h);
    pa.col(i) = c.point((i + 0.5) * h + L / 2);
  }
  double dist = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double ds = std::abs(wrap_signed(i * h - (j + 0.5) * h, L));
      double chord = (p1.col(i) - p2.col(j)).norm();
      dist = std::max(dist, ds / chord);
      if (ds >= h) gap = std::min(gap, chord);
    }
    double chord_a = (pa.col(i) - p2.col(i)).norm();
    dist = std::max(dist, (L / 2) / chord_a);
    gap = std::min(gap, chord_a);
  }
  return {dist, gap};
}

// ---------------- file format ----------------

nlohmann::json curve_to_json(const ClosedCurve& c) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int d = 0; d < c.dimension(); ++d) {
    nlohmann::json dim = nlohmann::json::array();
    dim.push_back({c.cos_coefficients()(d, 0)});
    for (int k = 1; k <= c.modes(); ++k)
      dim.push_back({c.cos_coefficients()(d, k), c.sin_coefficients()(d, k)});
    coeffs.push_back(std::move(dim));
  }
  nlohmann::json j{{"dimension", c.dimension()},
                   {"modes", c.modes()},
                   {"coefficients", std::move(coeffs)}};
  if (!c.family.empty()) {
    j["family"] = c.family;
    j["params"] = c.params;
  }
  return j;
}

ClosedCurve curve_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("modes") ||
      !j.contains("coefficients"))
    throw std::invalid_argument("curve file: missing dimension/modes/coefficients");
  const int n = j.at("dimension").get<int>();
  const int K = j.at("modes").get<int>();
  if (n < 2 || K < 1) throw std::invalid_argument("curve file: invalid dimension or mode count");
  const auto& coeffs = j.at("coefficients");
  if (!coeffs.is_array() || int(coeffs.size()) != n)
    throw std::invalid_argument("curve file: coefficients must have one entry per dimension");
  Mat a = Mat::Zero(n, K + 1), b = Mat::Zero(n, K + 1);
  for (int d = 0; d < n; ++d) {
    const auto& dim = coeffs.at(d);
    if (!dim.is_array() || int(dim.size()) != K + 1)
      throw std::invalid_argument("curve file: each dimension needs modes+1 coefficient rows");
    if (!dim.at(0).is_array() || dim.at(0).size() != 1)
      throw std::invalid_argument("curve file: order-0 row must be [a0]");
    a(d, 0) = dim.at(0).at(0).get<double>();
    for (int k = 1; k <= K; ++k) {
      if (!dim.at(k).is_array() || dim.at(k).size() != 2)
        throw std::invalid_argument("curve file: order-k rows must be [a_k, b_k]");
      a(d, k) = dim.at(k).at(0).get<double>();
      b(d, k) = dim.at(k).at(1).get<double>();
    }
  }
  ClosedCurve c(std::move(a), std::move(b));
  if (j.contains("family")) c.family = j.at("family").get<std::string>();
  if (j.contains("params")) c.params = j.at("params").get<std::map<std::string, double>>();
  return c;
}

void save_curve(const ClosedCurve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out << curve_to_json(c).dump(2) << "\n";
}

ClosedCurve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open curve file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("curve file: malformed JSON: ") + e.what());
  }
  return curve_from_json(j);
}

}  // namespace mobius
