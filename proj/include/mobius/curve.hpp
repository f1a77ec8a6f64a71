#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "json.hpp"

namespace mobius {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Curve value together with its first two parameter derivatives.
struct Jet2 {
  Vec p;
  Vec d1;
  Vec d2;
};

/// Closed curve in R^n given by a truncated Fourier series per coordinate,
/// parametrized over theta in R/Z:
///   x_d(theta) = a(d,0) + sum_k a(d,k) cos(2 pi k theta) + b(d,k) sin(2 pi k theta).
///
/// Evaluation reduces theta mod 1 first, so periodicity is structural: any
/// theta and theta+m (with theta+m exactly representable) give identical bits.
class ClosedCurve {
 public:
  /// cos_coef and sin_coef are n x (K+1); column k holds the order-k pair.
  /// Column 0 of sin_coef is ignored (kept zero).
  ClosedCurve(Mat cos_coef, Mat sin_coef);

  int dimension() const { return static_cast<int>(cos_coef_.rows()); }
  int modes() const { return static_cast<int>(cos_coef_.cols()) - 1; }
  const Mat& cos_coefficients() const { return cos_coef_; }
  const Mat& sin_coefficients() const { return sin_coef_; }

  Vec point(double theta) const;
  /// order 1 or 2
  Vec derivative(double theta, int order) const;
  Jet2 jet(double theta) const;
  double speed(double theta) const;

  /// Total length by midpoint sums under grid doubling, refined until two
  /// successive doublings agree to rel_tol. Throws std::runtime_error if the
  /// node cap is hit first.
  double total_length(double rel_tol = 1e-12) const;

  /// Uniform scaling of all coefficients (scaling about the origin).
  ClosedCurve scaled(double factor) const;

  // Optional provenance carried into reports and files.
  std::string family;
  std::map<std::string, double> params;

 private:
  Mat cos_coef_;
  Mat sin_coef_;
};

/// Arc-length reparametrization of a closed curve. The underlying Fourier
/// curve has constant speed equal to the total length L; point/tangent take
/// the arc length s in [0, L).
class ArcLengthCurve {
 public:
  ArcLengthCurve(ClosedCurve unit_speed_curve, double length, double speed_residual);

  double length() const { return length_; }
  /// Achieved max relative deviation of the refit speed from L.
  double speed_residual() const { return speed_residual_; }
  int dimension() const { return curve_.dimension(); }
  const ClosedCurve& curve() const { return curve_; }

  Vec point(double s) const { return curve_.point(s / length_); }
  Vec unit_tangent(double s) const;

 private:
  ClosedCurve curve_;
  double length_;
  double speed_residual_;
};

// -------- families (exact Fourier coefficients) --------

ClosedCurve make_circle(double radius = 1.0, int dimension = 3);
ClosedCurve make_ellipse(double a, double b, int dimension = 3);
/// (p,q) torus knot on the torus with radii (R, r); requires gcd(p,q) = 1,
/// 0 < r < R, dimension >= 3.
ClosedCurve make_torus_knot(int p, int q, double R, double r, int dimension = 3);
/// Unit circle plus deterministic seeded perturbation of Fourier modes 2..4.
ClosedCurve make_perturbed_circle(std::uint64_t seed, double amplitude, int dimension = 3);
/// Factory by name; used by the CLI. Throws std::invalid_argument for unknown
/// names or invalid parameters.
ClosedCurve make_family(const std::string& name, const std::map<std::string, double>& params,
                        int dimension = 3);

/// Embeddedness/immersion proxy used at construction time: positive speed at
/// check nodes and positive minimum chord gap over non-adjacent node pairs.
/// Throws std::invalid_argument when violated.
void validate_embedded(const ClosedCurve& c, int check_nodes = 512);

/// Trigonometric-polynomial fit of a smooth loop sampled over theta in [0,1):
/// DFT of `oversample * max(modes, 1)` equispaced samples truncated to the
/// requested mode count. Exact (to roundoff) whenever the loop itself is a
/// trig polynomial of degree <= modes * (1 - 1/oversample).
ClosedCurve fit_closed_curve(const std::function<Vec(double)>& sample, int dimension, int modes,
                             int oversample = 8);

// -------- reparametrization and geometry scans --------

/// Invert cumulative arc length (spectral antiderivative of the speed plus
/// bisection-guarded Newton) and refit a Fourier curve sampled at equal arc
/// length. Modes are doubled until the constant-speed residual meets rel_tol;
/// throws std::runtime_error if max_modes does not suffice.
ArcLengthCurve reparametrize_arclength(const ClosedCurve& c, double rel_tol = 1e-10,
                                       int max_modes = 1024);

ArcLengthCurve rescale_to_length(const ArcLengthCurve& c, double target_length);

struct DistortionGap {
  double distortion;  // sup of intrinsic distance / chord
  double min_gap;     // min chord over pairs at least one grid cell apart
};

/// Grid scan over the staggered pair grid plus the antipodal pairs
/// (s + L/2, s); a lower estimate of the true supremum.
DistortionGap distortion_and_gap(const ArcLengthCurve& c, int grid_n);

// -------- file format --------

nlohmann::json curve_to_json(const ClosedCurve& c);
ClosedCurve curve_from_json(const nlohmann::json& j);
void save_curve(const ClosedCurve& c, const std::string& path);
ClosedCurve load_curve(const std::string& path);

}  // namespace mobius
