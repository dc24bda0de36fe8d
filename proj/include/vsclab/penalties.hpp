#pragma once

#include <string>

#include "vsclab/spaces.hpp"

namespace vsclab {

enum class PenaltyKind { SquaredL2, PowerNorm, L1, ElasticNet };

/// A separable convex penalty  Omega(x) = sum_i w_i f(x_i)  with
///   SquaredL2:   f(t) = t^2 / 2
///   PowerNorm:   f(t) = |t|^s / s,         s in (1, 2]
///   L1:          f(t) = |t|
///   ElasticNet:  f(t) = |t| + (mu/2) t^2,  mu > 0
/// Every member is proper, convex, coercive and attains its minimum 0 at x = 0.
/// Without explicit weights all w_i are one.
class PenaltySpec {
 public:
  static PenaltySpec squaredL2(Vector weights = {});
  static PenaltySpec powerNorm(double s, Vector weights = {});
  static PenaltySpec l1(Vector weights = {});
  static PenaltySpec elasticNet(double mu, Vector weights = {});

  PenaltyKind kind() const { return kind_; }
  double s() const { return s_; }
  double mu() const { return mu_; }
  const Vector& weights() const { return weights_; }
  std::string name() const;

  double value(const Vector& x) const;

  /// argmin_x  1/2 ||x - v||_2^2 + tau * Omega(x).
  Vector prox(const Vector& v, double tau) const;

  /// Convex conjugate Omega^*(z); +infinity outside its domain (L1 only).
  double conjugate(const Vector& z) const;

  /// Largest factor in [0, 1] that moves z into the domain of the conjugate.
  double dualFeasibleScale(const Vector& z) const;

  /// Modulus of strong convexity w.r.t. the Euclidean norm (0 if none).
  double strongConvexity() const;

 private:
  PenaltySpec(PenaltyKind kind, double s, double mu, Vector weights);
  double weight(Eigen::Index i) const { return weights_.size() == 0 ? 1.0 : weights_[i]; }
  void checkDim(const Vector& x) const;

  PenaltyKind kind_;
  double s_;
  double mu_;
  Vector weights_;
};

PenaltyKind parsePenaltyKind(const std::string& name);

struct SubgradientReport {
  bool member = false;
  /// max over probes z of  Omega(x) + <xi, z - x> - Omega(z), clipped at 0.
  double violation = 0.0;
};

/// Probes the subgradient inequality  Omega(z) >= Omega(x) + <xi, z - x> - tol
/// on coordinate steps at several scales and on fixed-seed random directions.
SubgradientReport subgradientCheck(const PenaltySpec& omega, const Vector& x, const Vector& xi,
                                   double tol);

}  // namespace vsclab
