#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "vsclab/spaces.hpp"

namespace vsclab {

struct SolveReport {
  Vector minimizer;
  double objectiveValue = 0.0;
  int iterations = 0;
  /// Fixed-point residual (proximal gradient) or primal-dual gap (primal-dual).
  double certificateResidual = 0.0;
  bool converged = false;
  /// Primal-dual only: best dual iterate and its dual objective.
  Vector dualSolution;
  double dualObjective = 0.0;
};

struct EngineOptions {
  double tol = 1e-10;
  int maxIter = 200000;
  /// Certificates are evaluated every `checkEvery` iterations.
  int checkEvery = 5;
};

/// min_x f(x) + g(x) with f convex and smooth, g convex with a cheap prox.
struct CompositeProblem {
  /// Returns f(x); writes grad f(x) when `grad` is non-null.
  std::function<double(const Vector& x, Vector* grad)> smooth;
  /// g(x).
  std::function<double(const Vector& x)> nonsmooth;
  /// argmin_z 1/2 ||z - v||^2 + tau g(z).
  std::function<Vector(const Vector& v, double tau)> prox;
  /// Lipschitz constant of grad f if known; otherwise found by backtracking.
  std::optional<double> lipschitz;
};

/// Accelerated proximal gradient (FISTA) with backtracking and function-value
/// restart. Accepted iterates have nonincreasing objective. The certificate is
/// ||x - prox_{g/L}(x - grad f(x)/L)||_2 / max(1, ||x||_2).
SolveReport proxGradMinimize(const CompositeProblem& problem, const Vector& x0,
                             const EngineOptions& options = {});

/// min_x G(x) + F(K x) solved through the saddle point
///   min_x max_mu <K x, mu> - F^*(mu) + G(x).
struct SaddleProblem {
  Matrix K;
  /// prox_{sigma F^*}(v).
  std::function<Vector(const Vector& v, double sigma)> dataConjugateProx;
  /// prox_{tau G}(v).
  std::function<Vector(const Vector& v, double tau)> penaltyProx;
  /// G(x) + F(K x).
  std::function<double(const Vector& x)> primalObjective;
  /// -F^*(mu) - G^*(-K^T mu); may return -inf. When absent the certificate
  /// falls back to the scaled fixed-point residual.
  std::function<double(const Vector& mu)> dualObjective;
  /// Strong convexity modulus of G; enables the accelerated step rule.
  double strongConvexity = 0.0;
  /// tau / sigma balance for the initial steps (tau = ratio / L, sigma = 1 / (ratio L)).
  double stepRatio = 1.0;
};

/// Largest singular value of K by power iteration from a fixed-seed start.
double operatorNorm(const Matrix& K, std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

/// Chambolle-Pock primal-dual splitting. The certificate is the best primal
/// value minus the best dual value seen, relative to max(1, |primal|).
SolveReport primalDualMinimize(const SaddleProblem& problem, const Vector& x0,
                               const EngineOptions& options = {});

}  // namespace vsclab

#include <string>

#include "vsclab/errors.hpp"

namespace vsclab {

/// Raised when an engine exhausts its iteration budget; carries the best iterate.
class UnconvergedSolve : public SolverFailure {
 public:
  UnconvergedSolve(const std::string& what, SolveReport report)
      : SolverFailure(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

}  // namespace vsclab
