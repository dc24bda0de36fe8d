#pragma once

#include <optional>
#include <string>

#include "vsclab/convex_engine.hpp"
#include "vsclab/penalties.hpp"
#include "vsclab/spaces.hpp"

namespace vsclab {

struct SolverSettings {
  /// Fixed-point certificate for Tikhonov solves.
  double tikhonovTol = 1e-10;
  /// Relative primal-dual gap for the distance-function inner problems.
  double innerTol = 1e-8;
  int maxIter = 200000;
};

/// An instance of  A x = y_exact  with penalty Omega, fitting exponent p and data-space norm.
class ProblemSpec {
 public:
  ProblemSpec(Matrix A, Vector yExact, PenaltySpec penalty, double p, NormSpec ySpace,
              SolverSettings solver = {}, std::string name = "problem");

  const Matrix& A() const { return A_; }
  const Vector& yExact() const { return yExact_; }
  const PenaltySpec& penalty() const { return penalty_; }
  double p() const { return p_; }
  const NormSpec& ySpace() const { return ySpace_; }
  const SolverSettings& solver() const { return solver_; }
  const std::string& name() const { return name_; }
  Eigen::Index xDim() const { return A_.cols(); }
  Eigen::Index yDim() const { return A_.rows(); }

  /// (1/p)||A x - y||^p + alpha Omega(x).
  double tikhonovObjective(const Vector& x, const Vector& y, double alpha) const;

 private:
  Matrix A_;
  Vector yExact_;
  PenaltySpec penalty_;
  double p_;
  NormSpec ySpace_;
  SolverSettings solver_;
  std::string name_;
};

struct RegularizedSolution {
  Vector x;
  Vector eta;
  Vector xi;
  double alpha = 0.0;
  double delta = 0.0;
  Vector yNoisy;
  double residualNorm = 0.0;
  /// Fixed-point certificate of the Tikhonov solve.
  double optimalityGap = 0.0;
  SolveReport report;
};

struct ExactSolution {
  Vector x;
  double penaltyValue = 0.0;
  double feasibilityResidual = 0.0;
  /// Largest penalty decrease found along null-space probes (0 if none).
  double minimalityViolation = 0.0;
  std::optional<Vector> xiDagger;
};

/// Minimizes the Tikhonov functional for data y^delta. Throws UnconvergedSolve
/// when the engine does not certify, SolverFailure when the dual certificate
/// fails the subgradient probe.
RegularizedSolution solveTikhonov(const ProblemSpec& problem, const Vector& yNoisy, double alpha,
                                  double delta = 0.0, const std::optional<Vector>& x0 = {});

/// Omega-minimizing solution of A x = y_exact by vanishing-alpha continuation,
/// exact-penalty primal-dual polish and a least-norm feasibility correction.
/// Throws AssumptionViolation when the equation is inconsistent.
ExactSolution omegaMinSolution(const ProblemSpec& problem);

/// Omega(x) - Omega(xBar) - <xiBar, x - xBar>. Throws std::domain_error when
/// xiBar fails the subgradient probe at xBar.
double bregman(const PenaltySpec& omega, const Vector& x, const Vector& xBar, const Vector& xiBar);

/// B_{xi_alpha}(x_dagger, x_alpha) anchored at the regularized solution.
double skewedBregman(const RegularizedSolution& sol, const ExactSolution& exact,
                     const PenaltySpec& omega);

/// B_{xi_dagger}(x_alpha, x_dagger) when a subgradient at x_dagger is available.
std::optional<double> standardBregman(const RegularizedSolution& sol, const ExactSolution& exact,
                                      const PenaltySpec& omega);

}  // namespace vsclab

namespace vsclab {

/// Saddle formulation of  min_x Omega(x) + r ||A x - b||  for the primal-dual engine.
/// Dual iterates are rescaled into the conjugate's domain before evaluation.
SaddleProblem normPenaltySaddle(const ProblemSpec& problem, const Vector& b, double r);

}  // namespace vsclab
