#include "vsclab/rate_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vsclab/parallel.hpp"

namespace vsclab {

namespace {

constexpr double kMonotoneSlack = 1e-7;
constexpr double kConvexSlack = 1e-7;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Pool-adjacent-violators projection onto nonincreasing sequences.
std::vector<double> isotonicNonincreasing(const std::vector<double>& v) {
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double x : v) {
    level.push_back(x);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] < level.back()) {
      const std::size_t c = count[count.size() - 2] + count.back();
      const double merged =
          (level[level.size() - 2] * count[count.size() - 2] + level.back() * count.back()) / c;
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = c;
    }
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t b = 0; b < level.size(); ++b) out.insert(out.end(), count[b], level[b]);
  return out;
}

}  // namespace

DistanceSample evaluateDistance(const ProblemSpec& problem, const ExactSolution& exact, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("distance function argument must be a finite r >= 0");
  }
  const Vector b = problem.A() * exact.x;
  const SaddleProblem saddle = normPenaltySaddle(problem, b, r);
  EngineOptions options;
  options.tol = problem.solver().innerTol;
  options.maxIter = problem.solver().maxIter;
  options.checkEvery = 10;
  SolveReport report = primalDualMinimize(saddle, Vector::Zero(problem.xDim()), options);

  DistanceSample sample;
  sample.r = r;
  sample.d = std::max(0.0, exact.penaltyValue - report.objectiveValue);
  sample.upper = exact.penaltyValue - report.dualObjective;
  sample.converged = report.converged;
  sample.residual = report.certificateResidual;
  sample.iterations = report.iterations;
  sample.minimizer = std::move(report.minimizer);
  return sample;
}

double distanceD(const ProblemSpec& problem, const ExactSolution& exact, double r) {
  DistanceSample s = evaluateDistance(problem, exact, r);
  if (!s.converged) {
    SolveReport report;
    report.minimizer = s.minimizer;
    report.certificateResidual = s.residual;
    report.iterations = s.iterations;
    throw UnconvergedSolve("inner solve for D(" + fmt17(r) + ") did not converge (gap " +
                               fmt17(s.residual) + ")",
                           std::move(report));
  }
  return s.d;
}

// ---------------------------------------------------------------------------
// DistanceProfile

DistanceProfile DistanceProfile::fromTable(std::vector<double> r, std::vector<double> d,
                                           std::vector<bool> converged,
                                           std::vector<double> residual) {
  DistanceProfile profile;
  if (converged.empty()) converged.assign(r.size(), true);
  if (residual.empty()) residual.assign(r.size(), 0.0);
  profile.r_ = std::move(r);
  profile.d_ = std::move(d);
  profile.converged_ = std::move(converged);
  profile.residual_ = std::move(residual);
  profile.certify();
  return profile;
}

DistanceProfile DistanceProfile::fromSamples(std::vector<DistanceSample> samples) {
  DistanceProfile profile;
  for (auto& s : samples) {
    if (!s.converged) {
      throw ProfileInvariantError("inner solve for D(" + fmt17(s.r) +
                                  ") did not converge (gap " + fmt17(s.residual) + ")");
    }
    profile.r_.push_back(s.r);
    profile.d_.push_back(s.d);
    profile.converged_.push_back(s.converged);
    profile.residual_.push_back(s.residual);
    profile.minimizers_.push_back(std::move(s.minimizer));
  }
  profile.certify();
  return profile;
}

void DistanceProfile::certify() {
  const std::size_t n = r_.size();
  if (n == 0) throw ProfileInvariantError("distance profile is empty");
  if (d_.size() != n || converged_.size() != n || residual_.size() != n) {
    throw ProfileInvariantError("distance profile columns have different lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r_[i] > 0.0) || !std::isfinite(r_[i])) {
      throw ProfileInvariantError("profile grid must consist of positive finite r");
    }
    if (i > 0 && !(r_[i] > r_[i - 1])) {
      throw ProfileInvariantError("profile grid must be strictly increasing");
    }
    if (!std::isfinite(d_[i]) || d_[i] < -kMonotoneSlack) {
      throw ProfileInvariantError("D(" + fmt17(r_[i]) + ") = " + fmt17(d_[i]) +
                                  " is not a finite nonnegative value");
    }
    d_[i] = std::max(d_[i], 0.0);
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rise = d_[i + 1] - d_[i];
    if (rise > kMonotoneSlack) {
      throw ProfileInvariantError("D is not nonincreasing: D(" + fmt17(r_[i + 1]) + ") exceeds D(" +
                                  fmt17(r_[i]) + ") by " + fmt17(rise));
    }
  }
  d_ = isotonicNonincreasing(d_);

  if (convexityDefect() > kConvexSlack) {
    throw ProfileInvariantError("D violates discrete convexity by " + fmt17(convexityDefect()));
  }
  const bool allZero = std::all_of(d_.begin(), d_.end(), [](double v) { return v == 0.0; });
  if (n > 1 && !allZero && !(d_.back() < d_.front())) {
    throw ProfileInvariantError("D does not decay along the grid");
  }

  const double maxResidual = *std::max_element(residual_.begin(), residual_.end());
  zeroFloor_ = 10.0 * maxResidual * std::max(1.0, d_.front());
  positiveCount_ = 0;
  while (positiveCount_ < n && d_[positiveCount_] > zeroFloor_) ++positiveCount_;
  for (std::size_t i = positiveCount_; i < n; ++i) d_[i] = 0.0;
}

double DistanceProfile::monotonicityDefect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < d_.size(); ++i) worst = std::max(worst, d_[i + 1] - d_[i]);
  return worst;
}

double DistanceProfile::convexityDefect() const {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < d_.size(); ++i) {
    const double h0 = r_[i] - r_[i - 1];
    const double h1 = r_[i + 1] - r_[i];
    const double chord = (h1 * d_[i - 1] + h0 * d_[i + 1]) / (h0 + h1);
    worst = std::max(worst, d_[i] - chord);
  }
  return worst;
}

double DistanceProfile::interpolate(double r) const {
  const double lo = r_.front();
  const double hi = r_.back();
  if (r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12)) {
    throw RangeError("r = " + fmt17(r) + " lies outside the profile grid [" + fmt17(lo) + ", " +
                     fmt17(hi) + "]; extend rGrid");
  }
  r = std::clamp(r, lo, hi);
  const auto it = std::lower_bound(r_.begin(), r_.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - r_.begin());
  if (r_[k] == r) return d_[k];
  const std::size_t i = k - 1;
  const double w = (r - r_[i]) / (r_[i + 1] - r_[i]);
  return (1.0 - w) * d_[i] + w * d_[i + 1];
}

std::pair<double, double> DistanceProfile::phiRange() const {
  if (positiveCount_ == 0) {
    throw BenchmarkRegime("benchmark regime: D vanishes on the whole grid, Phi undefined");
  }
  const double tMax = d_.front() / r_.front();
  if (reachesZero()) return {0.0, tMax};
  const std::size_t last = positiveCount_ - 1;
  return {d_[last] / r_[last], tMax};
}

std::vector<double> logGrid(double lo, double hi, double pointsPerDecade) {
  if (!(lo > 0.0) || !(hi >= lo) || !(pointsPerDecade > 0.0)) {
    throw std::invalid_argument("log grid needs 0 < lo <= hi and positive density");
  }
  if (hi == lo) return {lo};
  const double decades = std::log10(hi / lo);
  const int intervals = std::max(1, static_cast<int>(std::ceil(decades * pointsPerDecade - 1e-9)));
  std::vector<double> grid(intervals + 1);
  for (int k = 0; k <= intervals; ++k) {
    grid[k] = lo * std::pow(10.0, decades * k / intervals);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

DistanceProfile buildProfile(const ProblemSpec& problem, const ExactSolution& exact, double rMin,
                             double rMax, double pointsPerDecade) {
  if (!(rMin > 0.0) || !(rMax >= rMin)) {
    throw std::invalid_argument("profile range must satisfy 0 < rMin <= rMax");
  }
  const std::vector<double> grid = logGrid(rMin, rMax, pointsPerDecade);
  std::vector<DistanceSample> samples(grid.size());
  parallelFor(grid.size(), [&](std::size_t i) { samples[i] = evaluateDistance(problem, exact, grid[i]); });
  return DistanceProfile::fromSamples(std::move(samples));
}

double phiOfR(const DistanceProfile& profile, double r) {
  const double d = profile.interpolate(r);
  if (!(d > 0.0)) {
    throw BenchmarkRegime("benchmark regime: D(" + fmt17(r) + ") = 0, Phi undefined");
  }
  return d / r;
}

double invertPhi(const DistanceProfile& profile, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("invertPhi needs t > 0");
  const auto [tMin, tMax] = profile.phiRange();
  if (t > tMax * (1.0 + 1e-12) || t < tMin * (1.0 - 1e-12)) {
    throw RangeError("Phi^{-1}(" + fmt17(t) + ") is outside the covered range [" + fmt17(tMin) +
                     ", " + fmt17(tMax) + "]; extend rGrid");
  }
  t = std::min(t, tMax);
  const auto& r = profile.rGrid();
  const auto& d = profile.dValues();
  // Phi strictly decreases over the positive nodes and, if present, the first zero node.
  const std::size_t last = profile.reachesZero() ? profile.positiveCount()
                                                 : profile.positiveCount() - 1;
  auto phiAt = [&](std::size_t i) { return d[i] / r[i]; };
  if (last == 0 || phiAt(0) <= t) return r[0];
  if (phiAt(last) >= t) return r[last];
  std::size_t lo = 0;
  std::size_t hi = last;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (phiAt(mid) >= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (phiAt(lo) == t) return r[lo];
  // On a segment D = a + b r, so Phi = a / r + b.
  const double b = (d[hi] - d[lo]) / (r[hi] - r[lo]);
  const double a = d[lo] - b * r[lo];
  return std::clamp(a / (t - b), r[lo], r[hi]);
}

void writeProfileCsv(const DistanceProfile& profile, std::ostream& out) {
  out << "r,D,converged,residual\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << fmt17(profile.rGrid()[i]) << ',' << fmt17(profile.dValues()[i]) << ','
        << (profile.converged()[i] ? 1 : 0) << ',' << fmt17(profile.residuals()[i]) << '\n';
  }
}

DistanceProfile readProfileCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("profile CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,D,converged,residual") {
    throw ConfigError("profile CSV header must be 'r,D,converged,residual', got '" + line + "'");
  }
  std::vector<double> r, d, residual;
  std::vector<bool> converged;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(ss, c, ',')) {
        throw ConfigError("profile CSV line " + std::to_string(lineNo) + " has fewer than 4 fields");
      }
    }
    try {
      r.push_back(std::stod(cell[0]));
      d.push_back(std::stod(cell[1]));
      converged.push_back(cell[2] == "1" || cell[2] == "true");
      residual.push_back(std::stod(cell[3]));
    } catch (const std::exception&) {
      throw ConfigError("profile CSV line " + std::to_string(lineNo) + " is not numeric");
    }
  }
  return DistanceProfile::fromTable(std::move(r), std::move(d), std::move(converged),
                                    std::move(residual));
}

// ---------------------------------------------------------------------------
// Index functions

IndexFunction::IndexFunction(std::function<double(double)> eval, Provenance provenance,
                             std::string description)
    : eval_(std::move(eval)), provenance_(provenance), description_(std::move(description)) {}

double IndexFunction::operator()(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("index functions are defined for t >= 0 only");
  if (t == 0.0) return 0.0;
  return eval_(t);
}

IndexFunction IndexFunction::power(double scale, double kappa) {
  if (!(scale > 0.0) || !(kappa > 0.0)) {
    throw ConfigError("power index function needs positive scale and exponent");
  }
  return {[scale, kappa](double t) { return scale * std::pow(t, kappa); }, Provenance::Power,
          "power(" + fmt17(scale) + ", " + fmt17(kappa) + ")"};
}

IndexFunction IndexFunction::logarithmic(double scale, double kappa) {
  if (!(scale > 0.0) || !(kappa > 0.0)) {
    throw ConfigError("logarithmic index function needs positive scale and exponent");
  }
  return {[scale, kappa](double t) { return scale * std::pow(1.0 + std::log1p(1.0 / t), -kappa); },
          Provenance::Logarithmic, "log(" + fmt17(scale) + ", " + fmt17(kappa) + ")"};
}

IndexFunction IndexFunction::table(std::vector<double> t, std::vector<double> values) {
  if (t.empty() || t.size() != values.size()) {
    throw ConfigError("index-function table needs equally many t and phi values (at least one)");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(t[i]) || !std::isfinite(values[i])) {
      throw ConfigError("index-function table entries must be positive and finite");
    }
    if (i > 0) {
      if (!(t[i] > t[i - 1])) throw ConfigError("index-function table t must be strictly increasing");
      if (values[i] < values[i - 1]) {
        throw ConfigError("index-function table is not monotone at t = " + fmt17(t[i]));
      }
      if (values[i] * t[i - 1] > values[i - 1] * t[i]) {
        throw ConfigError("index-function table has increasing phi(t)/t at t = " + fmt17(t[i]));
      }
    }
  }
  auto eval = [t, values](double s) {
    if (s >= t.back()) return values.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double t0 = k == 0 ? 0.0 : t[k - 1];
    const double v0 = k == 0 ? 0.0 : values[k - 1];
    return v0 + (values[k] - v0) * (s - t0) / (t[k] - t0);
  };
  return {eval, Provenance::Table, "table(" + std::to_string(t.size()) + " nodes)"};
}

IndexFunctionCheck validateIndexFunction(const IndexFunction& phi, const std::vector<double>& grid,
                                         double slack) {
  IndexFunctionCheck check;
  check.zeroAtOrigin = phi(0.0) == 0.0;
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = phi(grid[i]);
  bool finitePositive = true;
  for (double v : values) finitePositive = finitePositive && std::isfinite(v) && v >= 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double v0 = values[i];
    const double v1 = values[i + 1];
    const double scale = std::max(std::abs(v0), std::numeric_limits<double>::min());
    check.increaseDefect = std::max(check.increaseDefect, (v0 - v1) / scale);
    const double q0 = v0 / grid[i];
    const double q1 = v1 / grid[i + 1];
    const double qScale = std::max(std::abs(q0), std::numeric_limits<double>::min());
    check.ratioDefect = std::max(check.ratioDefect, (q1 - q0) / qScale);
  }
  check.strictNearZero = grid.size() < 2 || (values[0] > 0.0 && values[1] > values[0]);
  check.valid = finitePositive && check.zeroAtOrigin && check.strictNearZero &&
                check.increaseDefect <= slack && check.ratioDefect <= slack;
  return check;
}

IndexFunction rateFunctionFromProfile(const DistanceProfile& profile) {
  auto shared = std::make_shared<const DistanceProfile>(profile);
  if (shared->positiveCount() == 0) {
    // D already vanishes at the first node: the linear benchmark rate holds.
    const double r0 = shared->rGrid().front();
    return {[r0](double t) { return r0 * t; }, IndexFunction::Provenance::FromDistanceProfile,
            "fromProfile(benchmark, slope " + fmt17(r0) + ")"};
  }
  const auto [tMin, tMax] = shared->phiRange();
  const double rFirst = shared->rGrid().front();
  const double dFirst = shared->dValues().front();
  const double rLast = shared->rGrid()[shared->positiveCount() - 1];
  auto eval = [shared, tMin, tMax, rFirst, dFirst, rLast](double t) {
    if (t > tMax) return rFirst * t + dFirst;
    if (t < tMin) return 2.0 * rLast * t;
    // D(r) = r t at r = Phi^{-1}(t); this form avoids cancellation near D = 0.
    return 2.0 * t * invertPhi(*shared, t);
  };
  return {eval, IndexFunction::Provenance::FromDistanceProfile,
          "fromProfile(" + std::to_string(shared->size()) + " nodes)"};
}

double chooseAlpha(double delta, double p, const IndexFunction& phi, double c1, double c2) {
  if (!(delta > 0.0)) throw std::invalid_argument("chooseAlpha needs delta > 0");
  if (!(c1 > 0.0) || !(c2 >= c1)) throw std::invalid_argument("chooseAlpha needs 0 < c1 <= c2");
  const double phiDelta = phi(delta);
  if (!(phiDelta > 0.0)) {
    throw std::domain_error("chooseAlpha: phi(" + fmt17(delta) + ") must be positive");
  }
  return std::sqrt(c1 * c2) * std::pow(delta, p) / phiDelta;
}

// ---------------------------------------------------------------------------
// Variational source condition check

VscReport checkVSC(const ProblemSpec& problem, const ExactSolution& exact,
                   const IndexFunction& phi, double tol, const VscOptions& options) {
  const Matrix& A = problem.A();
  const NormSpec& Y = problem.ySpace();
  const PenaltySpec& omega = problem.penalty();
  const Vector& xd = exact.x;
  const Vector axd = A * xd;
  const Eigen::Index n = xd.size();

  VscReport report;
  report.minimumGap = std::numeric_limits<double>::infinity();
  auto gap = [&](const Vector& x) {
    ++report.evaluations;
    return omega.value(x) - exact.penaltyValue + phi(Y.norm(A * x - axd));
  };

  struct Candidate {
    double value;
    Vector x;
  };
  std::vector<Candidate> candidates;
  auto consider = [&](const Vector& x) {
    const double g = gap(x);
    if (std::isfinite(g)) candidates.push_back({g, x});
  };

  consider(xd);
  consider(Vector::Zero(n));
  for (double lambda : {0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.01, 1.1, 1.5, 2.0}) consider(lambda * xd);
  for (const Vector& x : options.extraProbes) {
    if (x.size() == n) consider(x);
  }

  // Maximizers of Omega(x_dagger) - Omega(x) - rho ||A x - A x_dagger|| are the
  // sharpest competitors for slopes rho, both on a fixed grid and at the
  // secant slopes phi(t)/t of the function under test.
  std::vector<double> slopes = logGrid(1e-3, 1e4, 3);
  for (double t : logGrid(1e-8, 10.0, 2)) {
    const double rho = phi(t) / t;
    if (std::isfinite(rho) && rho > 0.0) slopes.push_back(rho);
  }
  std::vector<Vector> maximizers(slopes.size());
  parallelFor(slopes.size(), [&](std::size_t i) {
    const SaddleProblem saddle = normPenaltySaddle(problem, axd, slopes[i]);
    EngineOptions opts;
    opts.tol = problem.solver().innerTol;
    opts.maxIter = std::min(problem.solver().maxIter, 20000);
    opts.checkEvery = 10;
    maximizers[i] = primalDualMinimize(saddle, Vector::Zero(n), opts).minimizer;
  });
  for (const Vector& x : maximizers) consider(x);

  std::mt19937_64 gen(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto randomDirection = [&]() {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = unit(gen);
    const double nd = d.norm();
    return nd > 0.0 ? Vector(d / nd) : Vector(Vector::Unit(n, 0));
  };
  const double reach = std::max(1.0, xd.lpNorm<Eigen::Infinity>());
  for (double scale : {1e-6, 1e-4, 1e-2, 1.0}) {
    for (int k = 0; k < 8; ++k) consider(xd + scale * reach * randomDirection());
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });

  // Compass search from the most promising starts.
  std::vector<Vector> directions;
  for (Eigen::Index i = 0; i < n; ++i) directions.push_back(Vector::Unit(n, i));
  for (int k = 0; k < 4; ++k) directions.push_back(randomDirection());

  const std::size_t starts = std::min<std::size_t>(candidates.size(), options.localStarts);
  for (std::size_t s = 0; s < starts; ++s) {
    Vector x = candidates[s].x;
    double value = candidates[s].value;
    double step = 0.05 * std::max(x.lpNorm<Eigen::Infinity>(), 1e-3 * reach);
    const double minStep = 1e-12 * reach;
    int budget = options.localBudget;
    while (step > minStep && budget > 0) {
      double bestValue = value;
      Vector bestX;
      for (const Vector& d : directions) {
        for (double sign : {1.0, -1.0}) {
          Vector trial = x + (sign * step) * d;
          const double g = gap(trial);
          --budget;
          if (g < bestValue) {
            bestValue = g;
            bestX = std::move(trial);
          }
        }
      }
      if (bestX.size() == n) {
        x = std::move(bestX);
        value = bestValue;
      } else {
        step *= 0.5;
      }
    }
    candidates.push_back({value, x});
  }

  for (const Candidate& c : candidates) {
    if (c.value < report.minimumGap) {
      report.minimumGap = c.value;
      report.witness = c.x;
    }
  }
  report.witnessDistance = Y.norm(A * report.witness - axd);
  report.pass = report.minimumGap >= -tol;
  return report;
}

}  // namespace vsclab
