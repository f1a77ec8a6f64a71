#include "mobius/moebius.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mobius/densities.hpp"
#include "mobius/rng.hpp"

namespace mobius {

namespace {

void check_orthogonal(const Mat& q, double tol = 1e-10) {
  if (q.rows() != q.cols() || q.rows() < 2)
    throw std::invalid_argument("moebius: orthogonal factor must be square, dimension >= 2");
  Mat err = q.transpose() * q - Mat::Identity(q.rows(), q.cols());
  if (err.cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("moebius: matrix is not orthogonal to tolerance");
}

}  // namespace

MoebiusPrimitive MoebiusPrimitive::translation(Vec v) {
  if (!v.allFinite()) throw std::invalid_argument("moebius: translation must be finite");
  MoebiusPrimitive p;
  p.kind = Kind::translation;
  p.v = std::move(v);
  return p;
}

MoebiusPrimitive MoebiusPrimitive::scaling(double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw std::invalid_argument("moebius: scaling factor must be positive and finite");
  MoebiusPrimitive p;
  p.kind = Kind::scaling;
  p.lambda = lambda;
  return p;
}

MoebiusPrimitive MoebiusPrimitive::orthogonal(Mat q) {
  check_orthogonal(q);
  MoebiusPrimitive p;
  p.kind = Kind::orthogonal;
  p.q = std::move(q);
  return p;
}

MoebiusPrimitive MoebiusPrimitive::inversion(Vec center, double radius) {
  if (!center.allFinite()) throw std::invalid_argument("moebius: inversion center must be finite");
  if (!(radius > 0) || !std::isfinite(radius))
    throw std::invalid_argument("moebius: inversion radius must be positive and finite");
  MoebiusPrimitive p;
  p.kind = Kind::inversion;
  p.center = std::move(center);
  p.radius = radius;
  return p;
}

MoebiusMap::MoebiusMap(std::vector<MoebiusPrimitive> prims) : prims_(std::move(prims)) {}

MoebiusMap MoebiusMap::inverse() const {
  std::vector<MoebiusPrimitive> inv;
  inv.reserve(prims_.size());
  for (auto it = prims_.rbegin(); it != prims_.rend(); ++it) {
    switch (it->kind) {
      case MoebiusPrimitive::Kind::translation:
        inv.push_back(MoebiusPrimitive::translation(-it->v));
        break;
      case MoebiusPrimitive::Kind::scaling:
        inv.push_back(MoebiusPrimitive::scaling(1.0 / it->lambda));
        break;
      case MoebiusPrimitive::Kind::orthogonal:
        inv.push_back(MoebiusPrimitive::orthogonal(it->q.transpose()));
        break;
      case MoebiusPrimitive::Kind::inversion:
        inv.push_back(*it);  // self-inverse
        break;
    }
  }
  return MoebiusMap(std::move(inv));
}

namespace {

Vec apply_primitive(const MoebiusPrimitive& p, const Vec& x) {
  switch (p.kind) {
    case MoebiusPrimitive::Kind::translation:
      return x + p.v;
    case MoebiusPrimitive::Kind::scaling:
      return p.lambda * x;
    case MoebiusPrimitive::Kind::orthogonal:
      return p.q * x;
    case MoebiusPrimitive::Kind::inversion: {
      Vec y = x - p.center;
      double rho2 = y.squaredNorm();
      if (!(rho2 > 0)) throw std::domain_error("moebius: inversion applied at its center");
      return p.center + (p.radius * p.radius / rho2) * y;
    }
  }
  throw std::logic_error("moebius: unreachable");
}

// Jets are pushed through the chain in extended precision: downstream
// consumers difference image points at nearby parameters, and plain double
// intermediates would leave those chords with only a few significant digits.
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct LJet {
  LVec p, d1, d2;
};

LJet apply_primitive_jet(const MoebiusPrimitive& p, const LJet& j) {
  switch (p.kind) {
    case MoebiusPrimitive::Kind::translation:
      return {j.p + p.v.cast<long double>(), j.d1, j.d2};
    case MoebiusPrimitive::Kind::scaling: {
      const long double l = p.lambda;
      return {l * j.p, l * j.d1, l * j.d2};
    }
    case MoebiusPrimitive::Kind::orthogonal: {
      const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> q =
          p.q.cast<long double>();
      return {q * j.p, q * j.d1, q * j.d2};
    }
    case MoebiusPrimitive::Kind::inversion: {
      const LVec y = j.p - p.center.cast<long double>();
      const long double rho2 = y.squaredNorm();
      if (!(rho2 > 0)) throw std::domain_error("moebius: inversion applied at its center");
      const long double r2 = (long double)p.radius * p.radius;
      const long double yd1 = y.dot(j.d1);
      const long double yd2 = y.dot(j.d2);
      const long double d1d1 = j.d1.squaredNorm();
      LJet out;
      out.p = p.center.cast<long double>() + (r2 / rho2) * y;
      out.d1 = (r2 / rho2) * (j.d1 - (2.0L * yd1 / rho2) * y);
      // D^2 phi(d1, d1) + D phi(d2)
      out.d2 = (r2 / (rho2 * rho2)) *
                   (-4.0L * yd1 * j.d1 - 2.0L * d1d1 * y + (8.0L * yd1 * yd1 / rho2) * y) +
               (r2 / rho2) * (j.d2 - (2.0L * yd2 / rho2) * y);
      return out;
    }
  }
  throw std::logic_error("moebius: unreachable");
}

}  // namespace

Vec MoebiusMap::apply(const Vec& x) const {
  Vec y = x;
  for (const auto& p : prims_) y = apply_primitive(p, y);
  return y;
}

Jet2 MoebiusMap::apply_jet(const Jet2& j) const {
  LJet out{j.p.cast<long double>(), j.d1.cast<long double>(), j.d2.cast<long double>()};
  for (const auto& p : prims_) out = apply_primitive_jet(p, out);
  return {out.p.cast<double>(), out.d1.cast<double>(), out.d2.cast<double>()};
}

Vec apply_point(const MoebiusMap& m, const Vec& x) { return m.apply(x); }

double min_inversion_clearance(const MoebiusMap& m, const ClosedCurve& c, int samples) {
  double clearance = std::numeric_limits<double>::infinity();
  const auto& prims = m.primitives();
  for (std::size_t i = 0; i < prims.size(); ++i) {
    if (prims[i].kind != MoebiusPrimitive::Kind::inversion) continue;
    MoebiusMap prefix(std::vector<MoebiusPrimitive>(prims.begin(), prims.begin() + i));
    for (int j = 0; j < samples; ++j) {
      Vec y = prefix.apply(c.point(double(j) / samples));
      clearance = std::min(clearance, (y - prims[i].center).norm());
    }
  }
  return clearance;
}

ClosedCurve apply_curve(const MoebiusMap& m, const ClosedCurve& c, int refit_modes) {
  if (min_inversion_clearance(m, c) < 1e-6)
    throw std::domain_error("moebius: curve passes too close to an inversion center");
  const int K = refit_modes > 0 ? refit_modes : std::max(64, 2 * c.modes());
  ClosedCurve image = fit_closed_curve([&](double t) { return m.apply(c.point(t)); },
                                       c.dimension(), K);
  image.family = c.family.empty() ? std::string("moebius_image") : c.family + "_moebius";
  validate_embedded(image);
  return image;
}

MoebiusMap random_map(const ClosedCurve& c, std::uint64_t seed, double safety) {
  if (!(safety > 0) || safety > 2.0)
    throw std::invalid_argument("moebius: safety margin must lie in (0, 2]");
  const int n = c.dimension();
  Rng rng(seed);

  std::vector<MoebiusPrimitive> prims;
  prims.push_back(MoebiusPrimitive::translation(rng.gaussian_vec(n)));

  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Vec rdiag = qr.matrixQR().diagonal();
  for (int k = 0; k < n; ++k)
    if (rdiag[k] < 0) q.col(k) = -q.col(k);
  prims.push_back(MoebiusPrimitive::orthogonal(q));

  prims.push_back(MoebiusPrimitive::scaling(rng.uniform(0.5, 2.0)));

  // Image of the curve at the inversion's slot in the chain.
  const int m_samples = 512;
  MoebiusMap prefix(prims);
  Mat pts(n, m_samples);
  for (int j = 0; j < m_samples; ++j) pts.col(j) = prefix.apply(c.point(double(j) / m_samples));
  Vec centroid = pts.rowwise().mean();
  double diam = 0;
  for (int i = 0; i < m_samples; ++i)
    for (int j = i + 1; j < m_samples; ++j)
      diam = std::max(diam, (pts.col(i) - pts.col(j)).norm());

  for (int attempt = 0; attempt < 200; ++attempt) {
    Vec dir = rng.gaussian_vec(n);
    double norm = dir.norm();
    if (norm < 1e-12) continue;
    dir /= norm;
    Vec center = centroid + (diam * rng.uniform(safety + 1.1, safety + 2.0)) * dir;
    double clearance = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m_samples; ++j)
      clearance = std::min(clearance, (pts.col(j) - center).norm());
    if (clearance < safety * diam) continue;
    double radius = diam * rng.uniform(0.8, 1.6);
    prims.push_back(MoebiusPrimitive::inversion(std::move(center), radius));
    return MoebiusMap(std::move(prims));
  }
  throw std::invalid_argument("moebius: could not place inversion center at the safety margin");
}

InvarianceReport invariance_report(const ClosedCurve& c, const MoebiusMap& m, int grid_n,
                                   int c_grid_n) {
  InvarianceReport r;
  r.clearance = min_inversion_clearance(m, c);
  ClosedCurve image = apply_curve(m, c);

  r.base = energy_report(reparametrize_arclength(c), grid_n);
  r.image = energy_report(reparametrize_arclength(image), grid_n);
  r.de = r.image.e - r.base.e;
  r.de0 = r.image.e0 - r.base.e0;
  r.de1 = r.image.e1 - r.base.e1;
  r.de2 = r.image.e2 - r.base.e2;

  // Conformal two-point invariance at identical parameter pairs; the image
  // side is the exact jet pushforward, independent of the Fourier refit.
  r.c_grid_n = c_grid_n;
  const PairGrid g = make_pair_grid(1.0, c_grid_n);
  std::vector<Jet2> j1(c_grid_n), j2(c_grid_n), mj1(c_grid_n), mj2(c_grid_n);
  for (int i = 0; i < c_grid_n; ++i) {
    j1[i] = c.jet(g.s1(i));
    j2[i] = c.jet(g.s2(i));
    mj1[i] = m.apply_jet(j1[i]);
    mj2[i] = m.apply_jet(j2[i]);
  }
  double worst = 0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (int i = 0; i < c_grid_n; ++i) {
    for (int j = 0; j < c_grid_n; ++j) {
      const double cb = c_bundle_jets(j1[i], j2[j]).c;
      const double ci = c_bundle_jets(mj1[i], mj2[j]).c;
      worst = std::max(worst, std::abs(ci - cb) / cb);
    }
  }
  r.c_max_deviation = worst;
  return r;
}

nlohmann::json invariance_to_json(const InvarianceReport& r) {
  return nlohmann::json{{"base", energy_to_json(r.base)},
                        {"image", energy_to_json(r.image)},
                        {"de", r.de},
                        {"de0", r.de0},
                        {"de1", r.de1},
                        {"de2", r.de2},
                        {"c_max_deviation", r.c_max_deviation},
                        {"c_grid_n", r.c_grid_n},
                        {"clearance", r.clearance}};
}

nlohmann::json map_to_json(const MoebiusMap& m) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& p : m.primitives()) {
    switch (p.kind) {
      case MoebiusPrimitive::Kind::translation:
        prims.push_back({{"kind", "translation"},
                         {"v", std::vector<double>(p.v.data(), p.v.data() + p.v.size())}});
        break;
      case MoebiusPrimitive::Kind::scaling:
        prims.push_back({{"kind", "scaling"}, {"lambda", p.lambda}});
        break;
      case MoebiusPrimitive::Kind::orthogonal: {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < p.q.rows(); ++i) {
          std::vector<double> row(p.q.cols());
          for (int j = 0; j < p.q.cols(); ++j) row[j] = p.q(i, j);
          rows.push_back(std::move(row));
        }
        prims.push_back({{"kind", "orthogonal"}, {"q", std::move(rows)}});
        break;
      }
      case MoebiusPrimitive::Kind::inversion:
        prims.push_back(
            {{"kind", "inversion"},
             {"center", std::vector<double>(p.center.data(), p.center.data() + p.center.size())},
             {"radius", p.radius}});
        break;
    }
  }
  return nlohmann::json{{"primitives", std::move(prims)}};
}

MoebiusMap map_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("primitives") || !j.at("primitives").is_array())
    throw std::invalid_argument("moebius file: missing primitives array");
  auto to_vec = [](const nlohmann::json& arr) {
    if (!arr.is_array() || arr.empty())
      throw std::invalid_argument("moebius file: expected a nonempty number array");
    Vec v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr.at(i).get<double>();
    return v;
  };
  std::vector<MoebiusPrimitive> prims;
  for (const auto& pj : j.at("primitives")) {
    const std::string kind = pj.at("kind").get<std::string>();
    if (kind == "translation") {
      prims.push_back(MoebiusPrimitive::translation(to_vec(pj.at("v"))));
    } else if (kind == "scaling") {
      prims.push_back(MoebiusPrimitive::scaling(pj.at("lambda").get<double>()));
    } else if (kind == "orthogonal") {
      const auto& rows = pj.at("q");
      if (!rows.is_array() || rows.empty())
        throw std::invalid_argument("moebius file: orthogonal block needs a matrix");
      const int n = int(rows.size());
      Mat q(n, n);
      for (int i = 0; i < n; ++i) {
        if (!rows.at(i).is_array() || int(rows.at(i).size()) != n)
          throw std::invalid_argument("moebius file: orthogonal matrix must be square");
        for (int k = 0; k < n; ++k) q(i, k) = rows.at(i).at(k).get<double>();
      }
      prims.push_back(MoebiusPrimitive::orthogonal(std::move(q)));
    } else if (kind == "inversion") {
      prims.push_back(
          MoebiusPrimitive::inversion(to_vec(pj.at("center")), pj.at("radius").get<double>()));
    } else {
      throw std::invalid_argument("moebius file: unknown primitive kind: " + kind);
    }
  }
  return MoebiusMap(std::move(prims));
}

}  // namespace mobius
