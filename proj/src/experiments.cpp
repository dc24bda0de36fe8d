#include "vsclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <tuple>

#include <Eigen/SVD>

#include "vsclab/parallel.hpp"

namespace vsclab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Skewed Bregman values at or below this are rounding noise of an exact recovery.
constexpr double kRoundingFloor = 1e-12;

// Uniform on [-1, 1) from raw engine bits, independent of the standard library.
double symmetricUnit(std::mt19937_64& gen) {
  return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

std::string noiseModeName(NoiseMode mode) {
  return mode == NoiseMode::RandomUnit ? "randomUnit" : "topSingular";
}

NoiseMode parseNoiseMode(const std::string& name) {
  if (name == "randomUnit") return NoiseMode::RandomUnit;
  if (name == "topSingular") return NoiseMode::TopSingular;
  throw ConfigError("unknown noise mode '" + name + "' (expected randomUnit or topSingular)");
}

Vector makeNoise(const Vector& yExact, double delta, NoiseMode mode, std::uint64_t seed,
                 const Matrix& A, const NormSpec& ySpace) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("noise level must be >= 0");
  if (yExact.size() != ySpace.dim()) throw StructuralError("data dimension does not match the Y norm");
  if (delta == 0.0) return yExact;
  const Eigen::Index m = yExact.size();

  Vector u(m);
  if (mode == NoiseMode::RandomUnit) {
    std::mt19937_64 gen(seed);
    do {
      for (Eigen::Index i = 0; i < m; ++i) u[i] = symmetricUnit(gen);
    } while (u.lpNorm<Eigen::Infinity>() == 0.0);
  } else {
    if (A.rows() != m) throw StructuralError("operator rows must match the data dimension");
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
    u = svd.matrixU().col(0);
    Eigen::Index lead = 0;
    u.cwiseAbs().maxCoeff(&lead);
    if (u[lead] < 0.0) u = -u;
    if (seed % 2 == 1) u = -u;
  }
  u /= ySpace.norm(u);

  // Re-scale the realized perturbation a few times to absorb rounding in the sum.
  Vector y = yExact + delta * u;
  double err = std::abs(ySpace.norm(y - yExact) - delta);
  for (int k = 0; k < 3 && err > 0.0; ++k) {
    const Vector e = y - yExact;
    const Vector trial = yExact + e * (delta / ySpace.norm(e));
    const double trialErr = std::abs(ySpace.norm(trial - yExact) - delta);
    if (trialErr >= err) break;
    y = trial;
    err = trialErr;
  }
  return y;
}

double lowerConstant(double p, double c1) { return 1.0 / c1 + 4.0 * p; }

double upperConstant(double p, double c1, double c2) {
  const double k = 2.0 * (1.0 + p) * c2 + 1.0;
  return std::pow(k, 1.0 / (p - 1.0)) + 1.0 + k / c1;
}

ClippedGrid clipDeltaGrid(const std::vector<double>& deltas, const DistanceProfile& profile) {
  ClippedGrid out;
  if (profile.positiveCount() == 0) {
    out.dropped = deltas;
    return out;
  }
  const auto [tMin, tMax] = profile.phiRange();
  for (double d : deltas) {
    if (d >= tMin && d <= tMax) {
      out.kept.push_back(d);
    } else {
      out.dropped.push_back(d);
    }
  }
  return out;
}

SweepResult runSweep(const ProblemSpec& problem, const ExactSolution& exact,
                     const DistanceProfile& profile, const std::vector<double>& deltas,
                     const SweepOptions& options) {
  const IndexFunction phi = rateFunctionFromProfile(profile);
  const double p = problem.p();
  const double c = lowerConstant(p, options.c1);
  const double cUb = upperConstant(p, options.c1, options.c2);

  struct Task {
    double delta;
    std::uint64_t seed;
    NoiseMode mode;
  };
  std::vector<Task> tasks;
  for (double delta : deltas) {
    for (std::uint64_t seed : options.seeds) {
      for (NoiseMode mode : options.modes) tasks.push_back({delta, seed, mode});
    }
  }

  std::vector<std::optional<RateRecord>> slots(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallelFor(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      RateRecord rec;
      rec.delta = task.delta;
      rec.noiseSeed = task.seed;
      rec.noiseMode = task.mode;
      const Vector y = makeNoise(problem.yExact(), task.delta, task.mode, task.seed, problem.A(),
                                 problem.ySpace());
      rec.alpha = chooseAlpha(task.delta, p, phi, options.c1, options.c2);
      const RegularizedSolution sol = solveTikhonov(problem, y, rec.alpha, task.delta);
      rec.bSkewed = skewedBregman(sol, exact, problem.penalty());
      rec.etaDualNorm = problem.ySpace().dualNorm(sol.eta);
      rec.phiDelta = phi(task.delta);
      rec.rInv = invertPhi(profile, task.delta);
      rec.lowerBound = distanceD(problem, exact, c * rec.rInv);
      rec.dOfEta = distanceD(problem, exact, rec.etaDualNorm);
      rec.residualNorm = sol.residualNorm;
      rec.upperConstant = cUb;
      rec.okLower = rec.lowerBound <= rec.bSkewed + 1e-8;
      rec.okEta = rec.etaDualNorm <= c * rec.rInv * (1.0 + 1e-6);
      rec.okDoEta = rec.dOfEta <= rec.bSkewed + 1e-8;
      rec.okUpper = rec.bSkewed <= cUb * rec.phiDelta;
      slots[i] = rec;
    } catch (const std::exception& e) {
      errors[i] = "delta=" + fmt17(task.delta) + " seed=" + std::to_string(task.seed) +
                  " mode=" + noiseModeName(task.mode) + ": " + e.what();
    }
  });

  SweepResult result;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (slots[i]) {
      result.records.push_back(*slots[i]);
    } else {
      result.failures.push_back(errors[i]);
    }
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const RateRecord& a, const RateRecord& b) {
                     return std::make_tuple(a.delta, a.noiseSeed, static_cast<int>(a.noiseMode)) <
                            std::make_tuple(b.delta, b.noiseSeed, static_cast<int>(b.noiseMode));
                   });
  return result;
}

RateFit fitRateExponent(const std::vector<RateRecord>& records) {
  std::vector<double> lx;
  std::vector<double> ly;
  bool allZero = !records.empty();
  for (const RateRecord& r : records) {
    if (r.bSkewed > kRoundingFloor) allZero = false;
    if (r.bSkewed > kRoundingFloor && r.delta > 0.0) {
      lx.push_back(std::log(r.delta));
      ly.push_back(std::log(r.bSkewed));
    }
  }
  RateFit fit;
  if (allZero) {
    fit.degenerate = true;
    fit.regime = "benchmark/exact regime";
    return fit;
  }
  if (lx.size() < 3) {
    throw std::invalid_argument("rate fit needs at least 3 records with positive B");
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("rate fit needs at least two distinct deltas");
  fit.kappa = sxy / sxx;
  fit.logIntercept = my - fit.kappa * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double res = ly[i] - (fit.logIntercept + fit.kappa * lx[i]);
    ss += res * res;
  }
  fit.rmsResidual = std::sqrt(ss / n);
  fit.used = lx.size();
  fit.regime = "power law";
  return fit;
}

ConstantRemovalReport removeConstantCheck(const DistanceProfile& profile, double c,
                                          const std::vector<double>& deltas) {
  if (!(c >= 1.0)) throw std::invalid_argument("constant-removal check needs c >= 1");
  ConstantRemovalReport report;
  std::vector<double> sorted = deltas;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double delta : sorted) {
    ConstantRemovalEntry entry;
    entry.delta = delta;
    try {
      entry.rInv = invertPhi(profile, delta);
      const double dNear = profile.interpolate(entry.rInv);
      const double dFar = profile.interpolate(c * entry.rInv);
      if (!(dFar > 0.0)) {
        entry.skipped = true;
        entry.diagnostic = "D(c r) vanishes (benchmark regime)";
      } else {
        entry.ratio = dNear / dFar;
      }
    } catch (const RangeError& e) {
      entry.skipped = true;
      entry.diagnostic = e.what();
    }
    report.entries.push_back(entry);
  }

  std::vector<double> ratios;
  for (const auto& e : report.entries) {
    if (!e.skipped) ratios.push_back(e.ratio);
  }
  if (ratios.empty()) return report;
  report.minRatio = *std::min_element(ratios.begin(), ratios.end());
  report.maxRatio = *std::max_element(ratios.begin(), ratios.end());
  bool strictlyIncreasing = ratios.size() > 1;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    strictlyIncreasing = strictlyIncreasing && ratios[i] > ratios[i - 1];
  }
  report.bounded = !(strictlyIncreasing && ratios.back() > 2.0 * ratios.front());
  return report;
}

const char* const kRatesCsvHeader =
    "delta,alpha,seed,mode,B_skewed,eta_dual_norm,phi_delta,lower_bound,d_of_eta,residual,"
    "upper_const,ok_lower,ok_eta,ok_doeta,ok_upper";

void writeRatesCsv(const std::vector<RateRecord>& records, std::ostream& out) {
  out << kRatesCsvHeader << '\n';
  for (const RateRecord& r : records) {
    out << fmt17(r.delta) << ',' << fmt17(r.alpha) << ',' << r.noiseSeed << ','
        << noiseModeName(r.noiseMode) << ',' << fmt17(r.bSkewed) << ',' << fmt17(r.etaDualNorm)
        << ',' << fmt17(r.phiDelta) << ',' << fmt17(r.lowerBound) << ',' << fmt17(r.dOfEta) << ','
        << fmt17(r.residualNorm) << ',' << fmt17(r.upperConstant) << ',' << r.okLower << ','
        << r.okEta << ',' << r.okDoEta << ',' << r.okUpper << '\n';
  }
}

}  // namespace vsclab
