#include "vsclab/convex_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vsclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

SolveReport proxGradMinimize(const CompositeProblem& problem, const Vector& x0,
                             const EngineOptions& options) {
  double lip = problem.lipschitz.value_or(1.0);
  if (!(lip > 0.0)) lip = 1.0;

  Vector x = x0;
  Vector gradX(x.size());
  double objX = problem.smooth(x, nullptr) + problem.nonsmooth(x);
  Vector y = x;
  double t = 1.0;
  bool momentum = false;

  auto certificate = [&]() {
    problem.smooth(x, &gradX);
    const Vector step = problem.prox(x - gradX / lip, 1.0 / lip);
    return (x - step).norm() / std::max(1.0, x.norm());
  };

  SolveReport report;
  Vector gradY(x.size());
  Vector z;
  int k = 0;
  double residual = kInf;
  for (; k < options.maxIter; ++k) {
    const double fy = problem.smooth(y, &gradY);
    double fz = 0.0;
    for (;;) {
      z = problem.prox(y - gradY / lip, 1.0 / lip);
      fz = problem.smooth(z, nullptr);
      const Vector d = z - y;
      const double model = fy + gradY.dot(d) + 0.5 * lip * d.squaredNorm();
      if (fz <= model + 10.0 * kEps * std::max(1.0, std::abs(fy))) break;
      lip *= 2.0;
    }
    const double objZ = fz + problem.nonsmooth(z);

    if (objZ > objX) {
      // Restart: drop momentum and retry from the accepted iterate.
      if (momentum) {
        y = x;
        t = 1.0;
        momentum = false;
        continue;
      }
      // Plain step from x: z is its own fixed-point test. Increases at rounding
      // level are accepted so the certificate keeps shrinking; larger ones stop.
      residual = (x - z).norm() / std::max(1.0, x.norm());
      if (residual <= options.tol ||
          objZ - objX > 100.0 * kEps * std::max(1.0, std::abs(objX))) {
        ++k;
        break;
      }
      x.swap(z);
      objX = objZ;
      y = x;
      continue;
    }

    const double tNext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / tNext) * (z - x);
    momentum = true;
    x.swap(z);
    objX = objZ;
    t = tNext;

    if ((k + 1) % options.checkEvery == 0) {
      residual = certificate();
      if (residual <= options.tol) {
        ++k;
        break;
      }
    }
  }
  if (k >= options.maxIter) residual = certificate();

  report.minimizer = std::move(x);
  report.objectiveValue = objX;
  report.iterations = k;
  report.certificateResidual = residual;
  report.converged = residual <= options.tol;
  return report;
}

double operatorNorm(const Matrix& K, std::uint64_t seed) {
  if (K.size() == 0) return 0.0;
  std::mt19937_64 gen(seed);
  Vector v(K.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  }
  double nv = v.norm();
  if (nv == 0.0) {
    v.setOnes();
    nv = v.norm();
  }
  v /= nv;
  double estimate = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector w = K.transpose() * (K * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = std::sqrt(nw);
    v = w / nw;
    if (std::abs(next - estimate) <= 1e-14 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

SolveReport primalDualMinimize(const SaddleProblem& problem, const Vector& x0,
                               const EngineOptions& options) {
  const Matrix& K = problem.K;
  const double normK = operatorNorm(K);
  const double lk = normK > 0.0 ? 1.01 * normK : 1.0;
  const double ratio = problem.stepRatio > 0.0 ? problem.stepRatio : 1.0;
  double tau = ratio / lk;
  double sigma = 1.0 / (ratio * lk);
  const double gamma = problem.strongConvexity;

  Vector x = x0;
  Vector xBar = x;
  Vector mu = Vector::Zero(K.rows());
  Vector xPrev(x.size());
  Vector muPrev(mu.size());
  Vector kx(K.rows());
  Vector ktmu(K.cols());

  SolveReport report;
  double bestPrimal = kInf;
  double bestDual = -kInf;
  Vector bestX = x;
  Vector bestMu = mu;
  double residual = kInf;

  int k = 0;
  for (; k < options.maxIter; ++k) {
    xPrev = x;
    muPrev = mu;
    kx.noalias() = K * xBar;
    mu = problem.dataConjugateProx(mu + sigma * kx, sigma);
    ktmu.noalias() = K.transpose() * mu;
    x = problem.penaltyProx(x - tau * ktmu, tau);
    const double theta = gamma > 0.0 ? 1.0 / std::sqrt(1.0 + 2.0 * gamma * tau) : 1.0;
    xBar = x + theta * (x - xPrev);
    const double tauUsed = tau;
    const double sigmaUsed = sigma;
    if (gamma > 0.0) {
      tau *= theta;
      sigma /= theta;
    }

    if ((k + 1) % options.checkEvery != 0 && k + 1 < options.maxIter) continue;

    const double primal = problem.primalObjective(x);
    if (primal < bestPrimal) {
      bestPrimal = primal;
      bestX = x;
    }
    if (problem.dualObjective) {
      const double dual = problem.dualObjective(mu);
      if (dual > bestDual) {
        bestDual = dual;
        bestMu = mu;
      }
      residual = (bestPrimal - bestDual) / std::max(1.0, std::abs(bestPrimal));
    } else {
      const Vector dx = xPrev - x;
      const Vector dmu = muPrev - mu;
      const Vector px = dx / tauUsed - K.transpose() * dmu;
      const Vector pmu = dmu / sigmaUsed - K * dx;
      residual = std::sqrt(px.squaredNorm() + pmu.squaredNorm()) /
                 std::max(1.0, std::sqrt(ktmu.squaredNorm() + kx.squaredNorm()));
      bestMu = mu;
      bestX = x;
      bestPrimal = primal;
    }
    if (residual <= options.tol) {
      ++k;
      break;
    }
  }

  report.minimizer = std::move(bestX);
  report.objectiveValue = bestPrimal;
  report.iterations = std::min(k, options.maxIter);
  report.certificateResidual = std::max(residual, 0.0);
  report.converged = residual <= options.tol;
  report.dualSolution = std::move(bestMu);
  report.dualObjective = bestDual;
  return report;
}

}  // namespace vsclab
