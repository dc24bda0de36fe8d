#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vsclab/experiments.hpp"

using namespace vsclab;

namespace {

ProblemSpec diagProblem(int n) {
  Vector sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = std::ldexp(1.0, -(i + 1));
  const Matrix A = sigma.asDiagonal();
  return ProblemSpec(A, A * sigma.cwiseSqrt(), PenaltySpec::squaredL2(), 2.0, NormSpec(2.0, n));
}

std::vector<RateRecord> syntheticRecords(const std::vector<double>& deltas, double kappa) {
  std::vector<RateRecord> out;
  for (double d : deltas) {
    RateRecord r;
    r.delta = d;
    r.bSkewed = 3.0 * std::pow(d, kappa);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("noise has the requested norm") {
  Matrix A(3, 3);
  A << 2, 0.1, 0, 0.3, 1, 0.2, 0, 0.4, 0.5;
  const Vector y = Vector::LinSpaced(3, 1.0, 2.0);
  for (const NormSpec& Y : {NormSpec(2.0, 3), NormSpec(1.5, Vector::LinSpaced(3, 1.0, 3.0)),
                            NormSpec(3.0, 3)}) {
    for (NoiseMode mode : {NoiseMode::RandomUnit, NoiseMode::TopSingular}) {
      for (std::uint64_t seed : {0u, 1u, 7u}) {
        for (double delta : {1e-4, 1e-2, 0.5}) {
          const Vector yd = makeNoise(y, delta, mode, seed, A, Y);
          CHECK(std::abs(Y.norm(yd - y) - delta) <= 1e-12 * std::max(1.0, y.norm()));
        }
      }
    }
  }
  CHECK(makeNoise(y, 0.0, NoiseMode::RandomUnit, 3, A, NormSpec(2.0, 3)) == y);
  CHECK_THROWS(makeNoise(y, -1.0, NoiseMode::RandomUnit, 3, A, NormSpec(2.0, 3)));
}

TEST_CASE("noise is deterministic in the seed") {
  const Matrix A = Matrix::Identity(4, 4);
  const Vector y = Vector::Ones(4);
  const NormSpec Y(2.0, 4);
  const Vector a = makeNoise(y, 0.1, NoiseMode::RandomUnit, 5, A, Y);
  const Vector b = makeNoise(y, 0.1, NoiseMode::RandomUnit, 5, A, Y);
  const Vector c = makeNoise(y, 0.1, NoiseMode::RandomUnit, 6, A, Y);
  CHECK(a == b);
  CHECK((a - c).norm() > 1e-6);
}

TEST_CASE("top singular noise follows the leading left singular vector") {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 0.1;
  const Vector y = Vector::Zero(2);
  const NormSpec Y(2.0, 2);
  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    const Vector u = makeNoise(y, 1.0, NoiseMode::TopSingular, seed, A, Y);
    CHECK(std::abs(std::abs(u[0]) - 1.0) <= 1e-14);
    CHECK(std::abs(u[1]) <= 1e-14);
    CHECK(u[0] == (seed % 2 == 0 ? 1.0 : -1.0));
  }
  CHECK(parseNoiseMode("topSingular") == NoiseMode::TopSingular);
  CHECK(noiseModeName(NoiseMode::RandomUnit) == "randomUnit");
  CHECK_THROWS_AS(parseNoiseMode("gaussian"), ConfigError);
}

TEST_CASE("bound constants") {
  CHECK(lowerConstant(2.0, 1.0) == doctest::Approx(9.0));
  CHECK(lowerConstant(1.5, 0.5) == doctest::Approx(8.0));
  // (2*3*1+1)^(1/1) + 1 + 7/1
  CHECK(upperConstant(2.0, 1.0, 1.0) == doctest::Approx(15.0));
  // k = 2*2.5*2+1 = 11: 11^2 + 1 + 11/0.5
  CHECK(upperConstant(1.5, 0.5, 2.0) == doctest::Approx(121.0 + 1.0 + 22.0));
}

TEST_CASE("rate exponent fit") {
  const std::vector<double> deltas = logGrid(1e-4, 1e-1, 5);
  const RateFit lin = fitRateExponent(syntheticRecords(deltas, 1.0));
  CHECK(lin.kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lin.logIntercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(lin.rmsResidual <= 1e-12);
  CHECK(lin.used == deltas.size());
  CHECK(fitRateExponent(syntheticRecords(deltas, 2.0 / 3.0)).kappa ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const RateFit zero = fitRateExponent(syntheticRecords(deltas, 40.0));
  CHECK(zero.degenerate);
  CHECK(zero.regime.find("benchmark") != std::string::npos);
  CHECK_THROWS(fitRateExponent(syntheticRecords({1e-2, 1e-1}, 1.0)));
}

TEST_CASE("constant removal on synthetic profiles") {
  const std::vector<double> r = logGrid(1e-2, 1e2, 10);
  SUBCASE("power law gives a constant ratio") {
    std::vector<double> d;
    for (double x : r) d.push_back(std::pow(x, -2.0));
    const DistanceProfile prof = DistanceProfile::fromTable(r, d);
    const double c = std::pow(10.0, 0.3);
    // Deltas whose preimages are nodes r_i with c r_i also a node.
    std::vector<double> deltas;
    for (std::size_t i = 0; i + 3 < r.size(); i += 2) deltas.push_back(d[i] / r[i]);
    const ConstantRemovalReport rep = removeConstantCheck(prof, c, deltas);
    REQUIRE(rep.entries.size() == deltas.size());
    for (const auto& e : rep.entries) {
      CHECK_FALSE(e.skipped);
      CHECK(std::abs(e.ratio - c * c) <= 1e-10);
    }
    CHECK(rep.bounded);
    CHECK(std::abs(rep.maxRatio - rep.minRatio) <= 1e-10);
  }
  SUBCASE("exponential gives a growing ratio") {
    std::vector<double> d;
    for (double x : r) d.push_back(std::exp(-x));
    const DistanceProfile prof = DistanceProfile::fromTable(r, d);
    std::vector<double> deltas;
    for (std::size_t i = 0; i + 6 < r.size() && d[i + 3] > 1e-200; i += 3) {
      deltas.push_back(d[i] / r[i]);
    }
    const ConstantRemovalReport rep = removeConstantCheck(prof, 2.0, deltas);
    CHECK_FALSE(rep.bounded);
    CHECK(rep.maxRatio > 2.0 * rep.minRatio);
  }
  SUBCASE("c = 1 gives ratio one") {
    const DistanceProfile prof = DistanceProfile::fromTable({1, 2, 4}, {1.0, 0.25, 0.0625});
    const ConstantRemovalReport rep = removeConstantCheck(prof, 1.0, {0.5, 0.1, 0.03});
    for (const auto& e : rep.entries) CHECK(e.ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS(removeConstantCheck(prof, 0.5, {0.1}));
  }
}

TEST_CASE("noise-free identity on the quadratic diagonal problem") {
  const ProblemSpec P = diagProblem(8);
  const ExactSolution e = omegaMinSolution(P);
  for (double alpha : {1e-1, 1e-2, 1e-3}) {
    const RegularizedSolution sol = solveTikhonov(P, P.yExact(), alpha);
    const double b = skewedBregman(sol, e, P.penalty());
    const double d = distanceD(P, e, P.ySpace().dualNorm(sol.eta));
    CHECK(std::abs(d - b) <= 1e-5 * std::max(1.0, b));
  }
}

TEST_CASE("benchmark source condition gives an O(delta) rate") {
  Matrix A(3, 5);
  A << 1, 0.2, 0, 0.5, -0.3, 0, 1, 0.4, 0.1, 0.2, 0.3, 0, 1, -0.2, 0.6;
  const Vector omega = Eigen::Vector3d(0.4, -0.3, 0.5);
  const ProblemSpec P(A, A * (A.transpose() * omega), PenaltySpec::squaredL2(), 2.0,
                      NormSpec(2.0, 3));
  const ExactSolution e = omegaMinSolution(P);
  // Quadratic case with x_dagger = A^T omega and alpha = delta / ||omega||: B <= ||omega|| delta.
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    for (std::uint64_t seed : {0u, 1u}) {
      const Vector yd = makeNoise(P.yExact(), delta, NoiseMode::RandomUnit, seed, A, P.ySpace());
      const RegularizedSolution sol = solveTikhonov(P, yd, delta / omega.norm(), delta);
      const double b = skewedBregman(sol, e, P.penalty());
      CHECK(b / delta <= omega.norm() * (1 + 1e-6));
    }
  }
}

TEST_CASE("sweep records on the diagonal problem") {
  const ProblemSpec P = diagProblem(4);
  const ExactSolution e = omegaMinSolution(P);
  const DistanceProfile prof = buildProfile(P, e, 1e-2, 1e2, 5);
  const ClippedGrid grid = clipDeltaGrid(logGrid(1e-4, 1e-1, 3), prof);
  REQUIRE_FALSE(grid.kept.empty());
  SweepOptions opt;
  opt.modes = {NoiseMode::RandomUnit, NoiseMode::TopSingular};
  opt.seeds = {0, 1};
  const SweepResult res = runSweep(P, e, prof, grid.kept, opt);
  CHECK(res.failures.empty());
  CHECK(res.records.size() == grid.kept.size() * 4);
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const RateRecord& r = res.records[i];
    CHECK(r.satisfied());
    CHECK(r.rInv == doctest::Approx(invertPhi(prof, r.delta)));
    if (i > 0) CHECK(res.records[i - 1].delta <= r.delta);
  }

  std::ostringstream a, b;
  writeRatesCsv(res.records, a);
  writeRatesCsv(runSweep(P, e, prof, grid.kept, opt).records, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind(std::string(kRatesCsvHeader) + "\n", 0) == 0);

  const ClippedGrid all = clipDeltaGrid({1e-6, 1e3}, prof);
  CHECK(all.kept.size() + all.dropped.size() == 2);
  CHECK(std::find(all.dropped.begin(), all.dropped.end(), 1e3) != all.dropped.end());
}
