#include "vsclab/spaces.hpp"

#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "vsclab/errors.hpp"

namespace vsclab {

namespace {

double conjugateExponent(double q) { return q / (q - 1.0); }

// Smallest bracket-respecting root of t + lambda * s * c * t^(s-1) = a on [0, a].
double shrinkCoordinate(double a, double lambda, double s, double c) {
  if (a == 0.0 || lambda == 0.0) return a;
  if (s == 2.0) return a / (1.0 + 2.0 * lambda * c);
  auto h = [&](double t) { return t + lambda * s * c * std::pow(t, s - 1.0) - a; };
  std::uintmax_t maxIter = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      h, 0.0, a, -a, h(a), boost::math::tools::eps_tolerance<double>(52), maxIter);
  return 0.5 * (lo + hi);
}

}  // namespace

NormSpec::NormSpec(double q, Eigen::Index dim) : NormSpec(q, Vector::Ones(dim)) {}

NormSpec::NormSpec(double q, Vector weights)
    : q_(q), qStar_(0.0), weights_(std::move(weights)), euclidean_(false) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw ConfigError("norm exponent q must satisfy 1 < q < inf, got " + std::to_string(q));
  }
  if (weights_.size() == 0) throw ConfigError("norm weights must be non-empty");
  if (!(weights_.array() > 0.0).all() || !weights_.allFinite()) {
    throw ConfigError("norm weights must be positive and finite");
  }
  qStar_ = conjugateExponent(q_);
  euclidean_ = (q_ == 2.0) && (weights_.array() == 1.0).all();
}

void NormSpec::checkDim(const Vector& v) const {
  if (v.size() != weights_.size()) {
    throw StructuralError("vector of length " + std::to_string(v.size()) +
                          " does not belong to a space of dimension " +
                          std::to_string(weights_.size()));
  }
}

double NormSpec::norm(const Vector& v) const {
  checkDim(v);
  if (euclidean_) return v.norm();
  // Scale by the largest entry so that |v_i|^q neither under- nor overflows.
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    sum += weights_[i] * std::pow(std::abs(v[i]) / scale, q_);
  }
  return scale * std::pow(sum, 1.0 / q_);
}

double NormSpec::dualNorm(const Vector& eta) const {
  checkDim(eta);
  if (euclidean_) return eta.norm();
  const double scale = eta.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    sum += std::pow(weights_[i], 1.0 - qStar_) * std::pow(std::abs(eta[i]) / scale, qStar_);
  }
  return scale * std::pow(sum, 1.0 / qStar_);
}

Vector NormSpec::fittingGradient(const Vector& y, double p) const {
  checkDim(y);
  if (!(p > 1.0)) throw ConfigError("fitting exponent p must exceed 1");
  const double ny = norm(y);
  if (ny == 0.0) return Vector::Zero(y.size());
  if (q_ == 2.0) {
    return std::pow(ny, p - 2.0) * weights_.cwiseProduct(y);
  }
  Vector eta(y.size());
  const double lead = std::pow(ny, p - q_);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    eta[i] = a == 0.0 ? 0.0 : lead * weights_[i] * std::pow(a, q_ - 1.0) * (y[i] > 0 ? 1.0 : -1.0);
  }
  return eta;
}

Vector NormSpec::projectDualBall(const Vector& z, double radius) const {
  checkDim(z);
  if (radius <= 0.0) return Vector::Zero(z.size());
  const double nz = dualNorm(z);
  if (nz <= radius) return z;
  if (euclidean_) return z * (radius / nz);

  // KKT: mu_i = sgn(z_i) t_i(lambda) with t_i solving t + lambda q* c_i t^(q*-1) = |z_i|,
  // c_i = w_i^(1-q*); lambda chosen so that the constraint is active.
  const double s = qStar_;
  Vector c(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) c[i] = std::pow(weights_[i], 1.0 - s);
  auto shrunk = [&](double lambda) {
    Vector mu(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double t = shrinkCoordinate(std::abs(z[i]), lambda, s, c[i]);
      mu[i] = z[i] >= 0 ? t : -t;
    }
    return mu;
  };
  auto excess = [&](double lambda) { return dualNorm(shrunk(lambda)) / radius - 1.0; };

  double hi = 1.0;
  while (excess(hi) > 0.0) hi *= 4.0;
  std::uintmax_t maxIter = 300;
  auto [lo, up] = boost::math::tools::toms748_solve(
      excess, 0.0, hi, nz / radius - 1.0, excess(hi),
      boost::math::tools::eps_tolerance<double>(50), maxIter);
  Vector mu = shrunk(up);
  const double nmu = dualNorm(mu);
  if (nmu > radius) mu *= radius / nmu;
  return mu;
}

}  // namespace vsclab
