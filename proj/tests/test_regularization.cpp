#include <doctest.h>

#include <cmath>
#include <random>

#include "vsclab/errors.hpp"
#include "vsclab/regularization.hpp"

using namespace vsclab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> v) {
  Matrix m(r, c);
  Eigen::Index k = 0;
  for (double x : v) {
    m(k / c, k % c) = x;
    ++k;
  }
  return m;
}

ProblemSpec quadratic(const Matrix& A, const Vector& y) {
  return ProblemSpec(A, y, PenaltySpec::squaredL2(), 2.0, NormSpec(2.0, A.rows()));
}

}  // namespace

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(ProblemSpec(Matrix::Identity(2, 2), Vector::Zero(3), PenaltySpec::l1(), 2.0,
                              NormSpec(2.0, 2)),
                  StructuralError);
  CHECK_THROWS_AS(ProblemSpec(Matrix::Identity(2, 2), Vector::Zero(2), PenaltySpec::l1(), 1.0,
                              NormSpec(2.0, 2)),
                  ConfigError);
}

TEST_CASE("scalar Tikhonov solve and its certificate") {
  const ProblemSpec P = quadratic(Matrix::Identity(1, 1), vec({2}));
  const RegularizedSolution s = solveTikhonov(P, vec({2}), 1.0);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.eta[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.xi[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.residualNorm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("zero data gives the zero solution for every penalty") {
  for (const PenaltySpec& omega : {PenaltySpec::squaredL2(), PenaltySpec::powerNorm(1.5),
                                   PenaltySpec::l1(), PenaltySpec::elasticNet(1.0)}) {
    const ProblemSpec P(mat(2, 2, {1, 0.5, 0, 1}), Vector::Zero(2), omega, 2.0, NormSpec(2.0, 2));
    const RegularizedSolution s = solveTikhonov(P, Vector::Zero(2), 0.3);
    CHECK(s.x.norm() == 0.0);
    CHECK(s.eta.norm() == 0.0);
  }
}

TEST_CASE("Hilbert case matches the normal equations") {
  const Matrix A = mat(2, 2, {1, 0, 0, 0.1});
  const ProblemSpec P = quadratic(A, vec({1, 0.1}));
  const RegularizedSolution s = solveTikhonov(P, vec({1, 0.1}), 0.01);
  CHECK(s.x[0] == doctest::Approx(1.0 / 1.01).epsilon(1e-10));
  // Condition number 50 amplifies the 1e-10 fixed-point tolerance.
  CHECK(s.x[1] == doctest::Approx(0.01 / 0.02).epsilon(1e-8));

  std::mt19937_64 gen(1234);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 5 + 2 * trial;
    Matrix B(n, n);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = normal(gen);
      for (Eigen::Index j = 0; j < n; ++j) B(i, j) = normal(gen) / std::sqrt(double(n));
    }
    const double alpha = 0.1 + 0.05 * trial;
    const Vector oracle =
        (B.transpose() * B + alpha * Matrix::Identity(n, n)).ldlt().solve(B.transpose() * y);
    const RegularizedSolution sol = solveTikhonov(quadratic(B, y), y, alpha);
    CHECK((sol.x - oracle).norm() <= 1e-8);
  }
}

TEST_CASE("Regularized solution invariants across penalties and norms") {
  const Matrix A = mat(3, 3, {1, 0.2, 0, 0.1, 0.5, 0.1, 0, 0.3, 0.25});
  const Vector y = vec({0.7, -0.2, 0.4});
  for (const PenaltySpec& omega : {PenaltySpec::squaredL2(), PenaltySpec::powerNorm(1.5),
                                   PenaltySpec::l1(), PenaltySpec::elasticNet(0.5)}) {
    for (double p : {1.5, 2.0, 3.0}) {
      for (double q : {1.5, 2.0, 3.0}) {
        const ProblemSpec P(A, y, omega, p, NormSpec(q, 3));
        const double alpha = 0.05;
        const RegularizedSolution s = solveTikhonov(P, y, alpha);
        const NormSpec& Y = P.ySpace();
        CHECK(Y.dualNorm(s.eta) ==
              doctest::Approx(std::pow(s.residualNorm, p - 1) / alpha).epsilon(1e-10));
        CHECK(subgradientCheck(omega, s.x, s.xi, 1e-6).member);
        // Coordinate perturbations do not decrease the objective.
        const double f0 = P.tikhonovObjective(s.x, y, alpha);
        for (Eigen::Index i = 0; i < 3; ++i) {
          for (double h : {1e-3, -1e-3}) {
            Vector z = s.x;
            z[i] += h;
            CHECK(P.tikhonovObjective(z, y, alpha) > f0);
          }
        }
      }
    }
  }
}

TEST_CASE("residual grows with alpha in the quadratic case") {
  const Matrix A = Vector::LinSpaced(5, 1.0, 0.05).asDiagonal();
  const Vector y = Vector::LinSpaced(5, 0.3, 1.0);
  const ProblemSpec P = quadratic(A, y);
  double previous = 0.0;
  for (double alpha = 1e-4; alpha <= 10.0; alpha *= 3.0) {
    const double res = solveTikhonov(P, y, alpha).residualNorm;
    CHECK(res >= previous);
    previous = res;
  }
}

TEST_CASE("Omega-minimizing solutions") {
  SUBCASE("minimum norm") {
    const ExactSolution e = omegaMinSolution(quadratic(mat(1, 2, {1, 1}), vec({2})));
    CHECK(e.x[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(e.x[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(e.xiDagger.has_value());
  }
  SUBCASE("unique solution") {
    for (const PenaltySpec& omega : {PenaltySpec::squaredL2(), PenaltySpec::l1()}) {
      const ProblemSpec P(Matrix::Identity(2, 2), vec({3, 4}), omega, 2.0, NormSpec(2.0, 2));
      const ExactSolution e = omegaMinSolution(P);
      CHECK((e.x - vec({3, 4})).norm() <= 1e-8);
    }
  }
  SUBCASE("minimum l1 on a line, cross-checked by grid search") {
    const ProblemSpec P(mat(1, 2, {1, 2}), vec({2}), PenaltySpec::l1(), 2.0, NormSpec(2.0, 1));
    const ExactSolution e = omegaMinSolution(P);
    CHECK(e.x[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
    CHECK(e.x[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(e.penaltyValue == doctest::Approx(1.0).epsilon(1e-7));
    double best = INFINITY;
    for (int k = -40000; k <= 40000; ++k) {
      const double x1 = k * 1e-4;
      best = std::min(best, std::abs(x1) + std::abs((2.0 - x1) / 2.0));
    }
    CHECK(e.penaltyValue <= best + 1e-8);
  }
  SUBCASE("inconsistent equation is rejected") {
    CHECK_THROWS_AS(omegaMinSolution(quadratic(mat(2, 1, {1, 1}), vec({1, 2}))),
                    AssumptionViolation);
  }
}

TEST_CASE("Bregman distances") {
  const PenaltySpec q = PenaltySpec::squaredL2();
  CHECK(bregman(q, vec({1, 0}), vec({0, 0}), vec({0, 0})) == doctest::Approx(0.5));
  CHECK(bregman(PenaltySpec::l1(), vec({2, 0}), vec({1, 0}), vec({1, 0})) ==
        doctest::Approx(0.0).scale(1.0));
  CHECK(bregman(q, vec({0.3, 2}), vec({0.3, 2}), vec({0.3, 2})) == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(bregman(PenaltySpec::l1(), vec({1, 0}), vec({0, 1}), vec({2, 1})), std::domain_error);

  // Skewed distance for the scalar example: x_dagger = 2, x_1 = 1, xi = 1.
  const ProblemSpec P = quadratic(Matrix::Identity(1, 1), vec({2}));
  const ExactSolution exact = omegaMinSolution(P);
  const RegularizedSolution s = solveTikhonov(P, vec({2}), 1.0);
  CHECK(skewedBregman(s, exact, P.penalty()) == doctest::Approx(0.5).epsilon(1e-9));

  // Quadratic identity in a larger instance.
  const Matrix A = Vector::LinSpaced(6, 1.0, 0.1).asDiagonal();
  const Vector xd = Vector::LinSpaced(6, -1.0, 1.0);
  const ProblemSpec P6 = quadratic(A, A * xd);
  const ExactSolution e6 = omegaMinSolution(P6);
  const RegularizedSolution s6 = solveTikhonov(P6, A * xd + Vector::Constant(6, 1e-2), 1e-2);
  // For Omega = 1/2||.||^2 both distances equal 1/2||x_dagger - x_alpha||^2 up to the
  // mismatch between each subgradient and its base point, which enters linearly.
  const double half = 0.5 * (e6.x - s6.x).squaredNorm();
  const double skewedExpected = half + (s6.x - s6.xi).dot(e6.x - s6.x);
  CHECK(skewedBregman(s6, e6, P6.penalty()) == doctest::Approx(skewedExpected).epsilon(1e-12));
  CHECK(skewedBregman(s6, e6, P6.penalty()) == doctest::Approx(half).epsilon(1e-5));
  const auto standard = standardBregman(s6, e6, P6.penalty());
  REQUIRE(standard.has_value());
  REQUIRE(e6.xiDagger.has_value());
  const double standardExpected = half + (e6.x - *e6.xiDagger).dot(s6.x - e6.x);
  CHECK(*standard == doctest::Approx(standardExpected).epsilon(1e-12));
}
