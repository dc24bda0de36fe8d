#pragma once

#include <Eigen/Dense>

namespace vsclab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weighted q-norm on R^n,  ||v|| = (sum_i w_i |v_i|^q)^(1/q),  1 < q < inf.
///
/// The dual space is identified with R^n through the Euclidean pairing, so the
/// dual norm is the weighted q*-norm with weights w_i^(1-q*).
class NormSpec {
 public:
  /// Unit weights.
  NormSpec(double q, Eigen::Index dim);
  NormSpec(double q, Vector weights);

  double exponent() const { return q_; }
  double dualExponent() const { return qStar_; }
  const Vector& weights() const { return weights_; }
  Eigen::Index dim() const { return weights_.size(); }
  /// True for q = 2 with all weights equal to one.
  bool isEuclidean() const { return euclidean_; }

  double norm(const Vector& v) const;
  double dualNorm(const Vector& eta) const;

  /// The unique element of the subdifferential of (1/p)||.||^p at y:
  /// <eta, y> = ||eta||_* ||y||  and  ||eta||_* = ||y||^(p-1).  Zero at y = 0.
  Vector fittingGradient(const Vector& y, double p) const;

  /// Euclidean projection of z onto {eta : ||eta||_* <= radius}.
  Vector projectDualBall(const Vector& z, double radius) const;

 private:
  void checkDim(const Vector& v) const;

  double q_;
  double qStar_;
  Vector weights_;
  bool euclidean_;
};

}  // namespace vsclab
