#include "vsclab/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "vsclab/errors.hpp"

namespace vsclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softThreshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Solves t + k t^(s-1) = a for t in [0, a] (a >= 0, k > 0, 1 < s < 2).
double powerShrink(double a, double k, double s) {
  if (a == 0.0) return 0.0;
  if (s == 1.5) {
    const double u = 0.5 * (-k + std::sqrt(k * k + 4.0 * a));
    return u * u;
  }
  auto h = [&](double t) { return t + k * std::pow(t, s - 1.0) - a; };
  std::uintmax_t maxIter = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      h, 0.0, a, -a, h(a), boost::math::tools::eps_tolerance<double>(52), maxIter);
  return 0.5 * (lo + hi);
}

void validateWeights(const Vector& w) {
  if (w.size() > 0 && (!(w.array() > 0.0).all() || !w.allFinite())) {
    throw ConfigError("penalty weights must be positive and finite");
  }
}

}  // namespace

PenaltySpec::PenaltySpec(PenaltyKind kind, double s, double mu, Vector weights)
    : kind_(kind), s_(s), mu_(mu), weights_(std::move(weights)) {
  validateWeights(weights_);
}

PenaltySpec PenaltySpec::squaredL2(Vector weights) {
  return {PenaltyKind::SquaredL2, 2.0, 0.0, std::move(weights)};
}

PenaltySpec PenaltySpec::powerNorm(double s, Vector weights) {
  if (!(s > 1.0 && s <= 2.0)) {
    throw ConfigError("PowerNorm exponent s must lie in (1, 2], got " + std::to_string(s));
  }
  return {PenaltyKind::PowerNorm, s, 0.0, std::move(weights)};
}

PenaltySpec PenaltySpec::l1(Vector weights) {
  return {PenaltyKind::L1, 1.0, 0.0, std::move(weights)};
}

PenaltySpec PenaltySpec::elasticNet(double mu, Vector weights) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ConfigError("ElasticNet parameter mu must be positive, got " + std::to_string(mu));
  }
  return {PenaltyKind::ElasticNet, 1.0, mu, std::move(weights)};
}

PenaltyKind parsePenaltyKind(const std::string& name) {
  if (name == "SquaredL2") return PenaltyKind::SquaredL2;
  if (name == "PowerNorm") return PenaltyKind::PowerNorm;
  if (name == "L1") return PenaltyKind::L1;
  if (name == "ElasticNet") return PenaltyKind::ElasticNet;
  throw ConfigError("unknown penalty kind '" + name +
                    "' (expected SquaredL2, PowerNorm, L1 or ElasticNet)");
}

std::string PenaltySpec::name() const {
  switch (kind_) {
    case PenaltyKind::SquaredL2: return "SquaredL2";
    case PenaltyKind::PowerNorm: return "PowerNorm(s=" + std::to_string(s_) + ")";
    case PenaltyKind::L1: return "L1";
    case PenaltyKind::ElasticNet: return "ElasticNet(mu=" + std::to_string(mu_) + ")";
  }
  return "?";
}

void PenaltySpec::checkDim(const Vector& x) const {
  if (weights_.size() != 0 && weights_.size() != x.size()) {
    throw StructuralError("penalty weights have length " + std::to_string(weights_.size()) +
                          " but the argument has length " + std::to_string(x.size()));
  }
}

double PenaltySpec::value(const Vector& x) const {
  checkDim(x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    double f = 0.0;
    switch (kind_) {
      case PenaltyKind::SquaredL2: f = 0.5 * a * a; break;
      case PenaltyKind::PowerNorm: f = std::pow(a, s_) / s_; break;
      case PenaltyKind::L1: f = a; break;
      case PenaltyKind::ElasticNet: f = a + 0.5 * mu_ * a * a; break;
    }
    sum += weight(i) * f;
  }
  return sum;
}

Vector PenaltySpec::prox(const Vector& v, double tau) const {
  checkDim(v);
  Vector x(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double tw = tau * weight(i);
    switch (kind_) {
      case PenaltyKind::SquaredL2: x[i] = v[i] / (1.0 + tw); break;
      case PenaltyKind::PowerNorm:
        if (s_ == 2.0) {
          x[i] = v[i] / (1.0 + tw);
        } else {
          const double t = powerShrink(std::abs(v[i]), tw, s_);
          x[i] = v[i] >= 0 ? t : -t;
        }
        break;
      case PenaltyKind::L1: x[i] = softThreshold(v[i], tw); break;
      case PenaltyKind::ElasticNet: x[i] = softThreshold(v[i], tw) / (1.0 + tw * mu_); break;
    }
  }
  return x;
}

double PenaltySpec::conjugate(const Vector& z) const {
  checkDim(z);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double w = weight(i);
    const double a = std::abs(z[i]);
    switch (kind_) {
      case PenaltyKind::SquaredL2: sum += a * a / (2.0 * w); break;
      case PenaltyKind::PowerNorm: {
        const double sStar = s_ / (s_ - 1.0);
        sum += std::pow(w, 1.0 - sStar) * std::pow(a, sStar) / sStar;
        break;
      }
      case PenaltyKind::L1:
        if (a > w) return kInf;
        break;
      case PenaltyKind::ElasticNet: {
        const double e = std::max(a - w, 0.0);
        sum += e * e / (2.0 * w * mu_);
        break;
      }
    }
  }
  return sum;
}

double PenaltySpec::dualFeasibleScale(const Vector& z) const {
  checkDim(z);
  if (kind_ != PenaltyKind::L1) return 1.0;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]);
    if (a > weight(i)) scale = std::min(scale, weight(i) / a);
  }
  return scale;
}

double PenaltySpec::strongConvexity() const {
  const double wMin = weights_.size() == 0 ? 1.0 : weights_.minCoeff();
  switch (kind_) {
    case PenaltyKind::SquaredL2: return wMin;
    case PenaltyKind::PowerNorm: return s_ == 2.0 ? wMin : 0.0;
    case PenaltyKind::L1: return 0.0;
    case PenaltyKind::ElasticNet: return mu_ * wMin;
  }
  return 0.0;
}

SubgradientReport subgradientCheck(const PenaltySpec& omega, const Vector& x, const Vector& xi,
                                   double tol) {
  if (x.size() != xi.size()) {
    throw StructuralError("subgradient and point have different dimensions");
  }
  const Eigen::Index n = x.size();
  const double base = omega.value(x);
  const double reach = std::max(1.0, x.lpNorm<Eigen::Infinity>());
  double worst = 0.0;
  auto probe = [&](const Vector& step) {
    const double gap = base + xi.dot(step) - omega.value(x + step);
    worst = std::max(worst, gap);
  };

  constexpr double kScales[] = {1e-4, 1e-2, 1.0};
  for (double scale : kScales) {
    const double h = scale * reach;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector e = Vector::Zero(n);
      e[i] = h;
      probe(e);
      probe(-e);
    }
  }

  std::mt19937_64 gen(0x5eedULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 8; ++k) {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = unit(gen);
    const double nd = d.norm();
    if (nd == 0.0) continue;
    d /= nd;
    for (double scale : kScales) probe(scale * reach * d);
  }
  return {worst <= tol, worst};
}

}  // namespace vsclab
