#include "vsclab/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "vsclab/errors.hpp"

namespace vsclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dims(const Matrix& A) {
  return std::to_string(A.rows()) + "x" + std::to_string(A.cols());
}

}  // namespace

ProblemSpec::ProblemSpec(Matrix A, Vector yExact, PenaltySpec penalty, double p, NormSpec ySpace,
                         SolverSettings solver, std::string name)
    : A_(std::move(A)),
      yExact_(std::move(yExact)),
      penalty_(std::move(penalty)),
      p_(p),
      ySpace_(std::move(ySpace)),
      solver_(solver),
      name_(std::move(name)) {
  if (A_.size() == 0) throw ConfigError("operator A must be non-empty");
  if (!A_.allFinite()) throw ConfigError("operator A has non-finite entries");
  if (yExact_.size() != A_.rows()) {
    throw StructuralError("y_exact has length " + std::to_string(yExact_.size()) +
                          " but A is " + dims(A_));
  }
  if (ySpace_.dim() != A_.rows()) {
    throw StructuralError("data-space weights have length " + std::to_string(ySpace_.dim()) +
                          " but A is " + dims(A_));
  }
  if (penalty_.weights().size() != 0 && penalty_.weights().size() != A_.cols()) {
    throw StructuralError("penalty weights have length " +
                          std::to_string(penalty_.weights().size()) + " but A is " + dims(A_));
  }
  if (!(p_ > 1.0) || !std::isfinite(p_)) {
    throw ConfigError("fitting exponent p must satisfy p > 1, got " + std::to_string(p_));
  }
  if (!(solver_.tikhonovTol > 0.0) || !(solver_.innerTol > 0.0) || solver_.maxIter <= 0) {
    throw ConfigError("solver tolerances and max_iter must be positive");
  }
}

double ProblemSpec::tikhonovObjective(const Vector& x, const Vector& y, double alpha) const {
  const double res = ySpace_.norm(A_ * x - y);
  return std::pow(res, p_) / p_ + alpha * penalty_.value(x);
}

namespace {

double fixedPointResidual(const CompositeProblem& composite, const Vector& x) {
  Vector grad;
  composite.smooth(x, &grad);
  const double lip = *composite.lipschitz;
  const Vector step = composite.prox(x - grad / lip, 1.0 / lip);
  return (x - step).norm() / std::max(1.0, x.norm());
}

// With a quadratic fit and an l1-type penalty the minimizer solves a linear
// system once support and signs are known. Solving it removes the iteration
// error that 1/alpha would otherwise amplify in eta.
void polishOnSupport(const ProblemSpec& problem, const Vector& y, double alpha,
                     const CompositeProblem& composite, SolveReport& report) {
  const Vector& x = report.minimizer;
  const Matrix& A = problem.A();
  const Vector& w = problem.ySpace().weights();
  const PenaltySpec& omega = problem.penalty();
  const double mu = omega.kind() == PenaltyKind::ElasticNet ? omega.mu() : 0.0;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) support.push_back(i);
  }
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > A.rows()) return;

  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  Matrix as(A.rows(), k);
  Vector rhsPenalty(k);
  Vector diag(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = support[static_cast<std::size_t>(j)];
    as.col(j) = A.col(i);
    const double pw = omega.weights().size() == 0 ? 1.0 : omega.weights()[i];
    rhsPenalty[j] = alpha * pw * (x[i] > 0.0 ? 1.0 : -1.0);
    diag[j] = alpha * mu * pw;
  }
  Matrix normal = as.transpose() * w.asDiagonal() * as;
  normal.diagonal() += diag;
  const Vector rhs = as.transpose() * w.asDiagonal() * y - rhsPenalty;
  Eigen::ColPivHouseholderQR<Matrix> qr(normal);
  if (qr.rank() < k) return;
  const Vector xs = qr.solve(rhs);

  Vector polished = Vector::Zero(x.size());
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = support[static_cast<std::size_t>(j)];
    if (xs[j] * x[i] <= 0.0) return;
    polished[i] = xs[j];
  }
  const double before = composite.smooth(x, nullptr) + composite.nonsmooth(x);
  const double after = composite.smooth(polished, nullptr) + composite.nonsmooth(polished);
  if (after > before + 1e-12 * std::max(1.0, std::abs(before))) return;
  const double residual = fixedPointResidual(composite, polished);
  if (residual > report.certificateResidual) return;
  report.minimizer = std::move(polished);
  report.objectiveValue = after;
  report.certificateResidual = residual;
}

// Hilbert case with a quadratic penalty: the optimality condition is the linear
// system (A^T W A + alpha diag(w)) x = A^T W y. Same acceptance rule as above.
void polishQuadratic(const ProblemSpec& problem, const Vector& y, double alpha,
                     const CompositeProblem& composite, SolveReport& report) {
  const Matrix& A = problem.A();
  const Vector& w = problem.ySpace().weights();
  const PenaltySpec& omega = problem.penalty();
  Matrix normal = A.transpose() * w.asDiagonal() * A;
  for (Eigen::Index i = 0; i < normal.rows(); ++i) {
    normal(i, i) += alpha * (omega.weights().size() == 0 ? 1.0 : omega.weights()[i]);
  }
  const Eigen::LDLT<Matrix> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return;
  Vector polished = ldlt.solve(A.transpose() * w.asDiagonal() * y);
  if (!polished.allFinite()) return;
  const Vector& x = report.minimizer;
  const double before = composite.smooth(x, nullptr) + composite.nonsmooth(x);
  const double after = composite.smooth(polished, nullptr) + composite.nonsmooth(polished);
  if (after > before + 1e-12 * std::max(1.0, std::abs(before))) return;
  const double residual = fixedPointResidual(composite, polished);
  if (residual > report.certificateResidual) return;
  report.minimizer = std::move(polished);
  report.objectiveValue = after;
  report.certificateResidual = residual;
}

}  // namespace

RegularizedSolution solveTikhonov(const ProblemSpec& problem, const Vector& yNoisy, double alpha,
                                  double delta, const std::optional<Vector>& x0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("regularization parameter alpha must be positive");
  }
  if (yNoisy.size() != problem.yDim()) throw StructuralError("data vector has wrong length");
  const Matrix& A = problem.A();
  const NormSpec& Y = problem.ySpace();
  const PenaltySpec& omega = problem.penalty();
  const double p = problem.p();

  CompositeProblem composite;
  composite.smooth = [&](const Vector& x, Vector* grad) {
    const Vector r = A * x - yNoisy;
    const double nr = Y.norm(r);
    if (grad != nullptr) *grad = A.transpose() * Y.fittingGradient(r, p);
    return std::pow(nr, p) / p;
  };
  composite.nonsmooth = [&](const Vector& x) { return alpha * omega.value(x); };
  composite.prox = [&](const Vector& v, double tau) { return omega.prox(v, tau * alpha); };
  if (p == 2.0 && Y.exponent() == 2.0) {
    const Matrix wa = Y.weights().cwiseSqrt().asDiagonal() * A;
    composite.lipschitz = std::pow(operatorNorm(wa) * 1.0001, 2);
  }

  EngineOptions options;
  options.tol = problem.solver().tikhonovTol;
  options.maxIter = problem.solver().maxIter;
  SolveReport report =
      proxGradMinimize(composite, x0.value_or(Vector::Zero(problem.xDim())), options);
  if (!report.converged) {
    throw UnconvergedSolve("Tikhonov solve did not converge (alpha=" + std::to_string(alpha) +
                               ", residual=" + std::to_string(report.certificateResidual) +
                               " after " + std::to_string(report.iterations) + " iterations)",
                           report);
  }

  if (p == 2.0 && Y.exponent() == 2.0 &&
      (omega.kind() == PenaltyKind::L1 || omega.kind() == PenaltyKind::ElasticNet)) {
    polishOnSupport(problem, yNoisy, alpha, composite, report);
  }
  if (p == 2.0 && Y.exponent() == 2.0 &&
      (omega.kind() == PenaltyKind::SquaredL2 ||
       (omega.kind() == PenaltyKind::PowerNorm && omega.s() == 2.0))) {
    polishQuadratic(problem, yNoisy, alpha, composite, report);
  }

  RegularizedSolution sol;
  sol.x = report.minimizer;
  const Vector residual = A * sol.x - yNoisy;
  sol.residualNorm = Y.norm(residual);
  sol.eta = -Y.fittingGradient(residual, p) / alpha;
  sol.xi = A.transpose() * sol.eta;
  sol.alpha = alpha;
  sol.delta = delta;
  sol.yNoisy = yNoisy;
  sol.optimalityGap = report.certificateResidual;
  sol.report = std::move(report);

  const SubgradientReport check = subgradientCheck(omega, sol.x, sol.xi, 1e-6);
  if (!check.member) {
    throw SolverFailure("Tikhonov dual certificate A^T eta is not a subgradient (violation " +
                        std::to_string(check.violation) + ")");
  }
  return sol;
}

SaddleProblem normPenaltySaddle(const ProblemSpec& problem, const Vector& b, double r) {
  const PenaltySpec& omega = problem.penalty();
  const NormSpec& Y = problem.ySpace();
  SaddleProblem saddle;
  saddle.K = problem.A();
  saddle.dataConjugateProx = [&Y, b, r](const Vector& v, double sigma) {
    return Y.projectDualBall(v - sigma * b, r);
  };
  saddle.penaltyProx = [&omega](const Vector& v, double tau) { return omega.prox(v, tau); };
  const Matrix& A = problem.A();
  saddle.primalObjective = [&A, &Y, &omega, b, r](const Vector& x) {
    return omega.value(x) + (r > 0.0 ? r * Y.norm(A * x - b) : 0.0);
  };
  saddle.dualObjective = [&A, &omega, b](const Vector& mu) {
    Vector z = -(A.transpose() * mu);
    const double scale = omega.dualFeasibleScale(z);
    const Vector muFeasible = scale * mu;
    z *= scale;
    const double conj = omega.conjugate(z);
    if (!std::isfinite(conj)) return -kInf;
    return -muFeasible.dot(b) - conj;
  };
  saddle.strongConvexity = omega.strongConvexity();
  return saddle;
}

ExactSolution omegaMinSolution(const ProblemSpec& problem) {
  const Matrix& A = problem.A();
  const Vector& y = problem.yExact();
  const NormSpec& Y = problem.ySpace();
  const PenaltySpec& omega = problem.penalty();
  const double feasTol = 1e-8 * std::max(1.0, Y.norm(y));

  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  {
    const Vector xLs = cod.solve(y);
    const double lsResidual = Y.norm(A * xLs - y);
    if (lsResidual > feasTol) {
      throw AssumptionViolation(
          "A x = y_exact has no solution: least-squares residual " + std::to_string(lsResidual) +
          " exceeds feasibility tolerance " + std::to_string(feasTol));
    }
  }

  // Vanishing-alpha continuation provides a warm start and the scale of the
  // dual certificate, which bounds the exact-penalty parameter from below.
  Vector x = Vector::Zero(problem.xDim());
  double etaScale = 0.0;
  {
    for (double alpha = 1.0; alpha >= 1e-9; alpha *= 0.1) {
      SolverSettings s = problem.solver();
      s.maxIter = std::min(s.maxIter, 20000);
      ProblemSpec stage(A, y, omega, problem.p(), Y, s, problem.name());
      try {
        const RegularizedSolution sol = solveTikhonov(stage, y, alpha, 0.0, x);
        x = sol.x;
        etaScale = std::max(etaScale, Y.dualNorm(sol.eta));
        if (sol.residualNorm <= feasTol) break;
      } catch (const SolverFailure&) {
        break;
      }
    }
  }

  ExactSolution exact;
  Vector mu;
  double rBig = 4.0 * std::max(1.0, etaScale);
  for (int attempt = 0; attempt < 4; ++attempt, rBig *= 4.0) {
    const SaddleProblem saddle = normPenaltySaddle(problem, y, rBig);
    EngineOptions options;
    options.tol = problem.solver().innerTol;
    options.maxIter = problem.solver().maxIter;
    options.checkEvery = 10;
    const SolveReport polish = primalDualMinimize(saddle, x, options);
    const double residual = Y.norm(A * polish.minimizer - y);
    // An active penalty (dual iterate on the ball boundary) means rBig is too small.
    const bool saturated = Y.dualNorm(polish.dualSolution) >= rBig * (1.0 - 1e-6) &&
                           residual > feasTol;
    x = polish.minimizer;
    mu = polish.dualSolution;
    if (!saturated) break;
  }

  // Least-norm step onto the affine solution set; removes the residual left
  // by the nonsmooth polish without moving along the null space of A.
  x += cod.solve(y - A * x);
  const double residual = Y.norm(A * x - y);
  if (residual > feasTol) {
    throw AssumptionViolation("could not reach a feasible point of A x = y_exact (residual " +
                              std::to_string(residual) + ")");
  }

  exact.x = x;
  exact.penaltyValue = omega.value(x);
  exact.feasibilityResidual = residual;

  // Probe penalty decrease along the null space of A.
  const Matrix nullBasis = Eigen::FullPivLU<Matrix>(A).kernel();
  double worst = 0.0;
  if (nullBasis.cols() > 0 && nullBasis.norm() > 0.0) {
    const double reach = std::max(1.0, x.lpNorm<Eigen::Infinity>());
    std::mt19937_64 gen(0xfeedULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto probe = [&](const Vector& v) {
      const double nv = v.norm();
      if (nv == 0.0) return;
      for (double scale : {1e-6, 1e-4, 1e-2, 1.0}) {
        const Vector step = (scale * reach / nv) * v;
        worst = std::max(worst, exact.penaltyValue - omega.value(x + step));
        worst = std::max(worst, exact.penaltyValue - omega.value(x - step));
      }
    };
    for (Eigen::Index j = 0; j < nullBasis.cols(); ++j) probe(nullBasis.col(j));
    for (int k = 0; k < 32; ++k) {
      Vector c(nullBasis.cols());
      for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = unit(gen);
      probe(nullBasis * c);
    }
  }
  exact.minimalityViolation = worst;
  if (worst > 1e-7 * std::max(1.0, exact.penaltyValue)) {
    throw SolverFailure("computed solution is not penalty-minimal: a feasible probe lowers the "
                        "penalty by " + std::to_string(worst));
  }

  if (mu.size() == A.rows()) {
    const Vector xiDagger = -(A.transpose() * mu);
    if (subgradientCheck(omega, x, xiDagger, 1e-6).member) exact.xiDagger = xiDagger;
  }
  return exact;
}

double bregman(const PenaltySpec& omega, const Vector& x, const Vector& xBar,
               const Vector& xiBar) {
  if (x.size() != xBar.size() || xBar.size() != xiBar.size()) {
    throw StructuralError("Bregman distance arguments have mismatched dimensions");
  }
  const SubgradientReport check = subgradientCheck(omega, xBar, xiBar, 1e-6);
  if (!check.member) {
    throw std::domain_error("Bregman distance undefined: xi is not a subgradient at xBar "
                            "(violation " + std::to_string(check.violation) + ")");
  }
  return omega.value(x) - omega.value(xBar) - xiBar.dot(x - xBar);
}

double skewedBregman(const RegularizedSolution& sol, const ExactSolution& exact,
                     const PenaltySpec& omega) {
  if (sol.x.size() != exact.x.size()) {
    throw StructuralError("regularized and exact solutions have different dimensions");
  }
  return exact.penaltyValue - omega.value(sol.x) - sol.xi.dot(exact.x - sol.x);
}

std::optional<double> standardBregman(const RegularizedSolution& sol, const ExactSolution& exact,
                                      const PenaltySpec& omega) {
  if (!exact.xiDagger) return std::nullopt;
  return omega.value(sol.x) - exact.penaltyValue - exact.xiDagger->dot(sol.x - exact.x);
}

}  // namespace vsclab
