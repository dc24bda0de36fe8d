#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vsclab/errors.hpp"
#include "vsclab/regularization.hpp"

namespace vsclab {

/// Raised by Phi-queries where the distance function has already reached zero.
class BenchmarkRegime : public RangeError {
 public:
  using RangeError::RangeError;
};

/// One evaluation of D(r) = Omega(x_dagger) - min_x { Omega(x) + r ||A x - A x_dagger|| }.
struct DistanceSample {
  double r = 0.0;
  /// Lower estimate from the best primal value, clipped at zero.
  double d = 0.0;
  /// Upper estimate from the best dual value.
  double upper = 0.0;
  bool converged = false;
  /// Relative primal-dual gap of the inner solve.
  double residual = 0.0;
  int iterations = 0;
  /// Maximizer of the sup defining D(r).
  Vector minimizer;
};

DistanceSample evaluateDistance(const ProblemSpec& problem, const ExactSolution& exact, double r);

/// D(r); throws UnconvergedSolve when the inner solve is not certified.
double distanceD(const ProblemSpec& problem, const ExactSolution& exact, double r);

/// Sampled distance function, certified nonincreasing and discretely convex.
/// Interpolation is piecewise linear in r, i.e. the chord of the convex D,
/// which never falls below D between nodes.
class DistanceProfile {
 public:
  /// Certifies a table; small monotonicity violations (< 1e-7) are repaired by
  /// isotonic regression, anything larger throws ProfileInvariantError.
  static DistanceProfile fromTable(std::vector<double> r, std::vector<double> d,
                                   std::vector<bool> converged = {},
                                   std::vector<double> residual = {});
  static DistanceProfile fromSamples(std::vector<DistanceSample> samples);

  std::size_t size() const { return r_.size(); }
  const std::vector<double>& rGrid() const { return r_; }
  const std::vector<double>& dValues() const { return d_; }
  const std::vector<bool>& converged() const { return converged_; }
  const std::vector<double>& residuals() const { return residual_; }
  /// Inner maximizers per node; empty for imported tables.
  const std::vector<Vector>& minimizers() const { return minimizers_; }

  /// Values at or below this floor are solver noise and are stored as zero.
  double zeroFloor() const { return zeroFloor_; }
  /// Number of leading nodes with D above the zero floor.
  std::size_t positiveCount() const { return positiveCount_; }
  bool reachesZero() const { return positiveCount_ < r_.size(); }

  /// Interpolated D on [rGrid.front(), rGrid.back()]; throws RangeError outside.
  double interpolate(double r) const;
  /// Covered Phi values: [Phi(r_last_positive), Phi(r_first)], with lower end 0
  /// when the profile reaches zero inside the grid.
  std::pair<double, double> phiRange() const;

  /// Largest remaining monotonicity and convexity defects (after repair).
  double monotonicityDefect() const;
  double convexityDefect() const;

 private:
  DistanceProfile() = default;
  void certify();

  std::vector<double> r_;
  std::vector<double> d_;
  std::vector<bool> converged_;
  std::vector<double> residual_;
  std::vector<Vector> minimizers_;
  double zeroFloor_ = 0.0;
  std::size_t positiveCount_ = 0;
};

/// Log-uniform grid with both endpoints and at least `pointsPerDecade` nodes per decade.
std::vector<double> logGrid(double lo, double hi, double pointsPerDecade);

DistanceProfile buildProfile(const ProblemSpec& problem, const ExactSolution& exact, double rMin,
                             double rMax, double pointsPerDecade);

/// Phi(r) = D(r) / r from the interpolated profile.
double phiOfR(const DistanceProfile& profile, double r);

/// Inverse of Phi on the covered range; throws RangeError("extend rGrid") outside it.
double invertPhi(const DistanceProfile& profile, double t);

void writeProfileCsv(const DistanceProfile& profile, std::ostream& out);
DistanceProfile readProfileCsv(std::istream& in);

/// Continuous, increasing rate function with phi(0) = 0.
class IndexFunction {
 public:
  enum class Provenance { FromDistanceProfile, Power, Logarithmic, Table, Custom };

  IndexFunction(std::function<double(double)> eval, Provenance provenance,
                std::string description);

  static IndexFunction power(double scale, double kappa);
  /// scale * (1 + ln(1 + 1/t))^(-kappa).
  static IndexFunction logarithmic(double scale, double kappa);
  /// Piecewise linear through (0, 0) and the nodes, constant after the last node.
  /// Throws ConfigError unless values are positive, nondecreasing and value/t nonincreasing.
  static IndexFunction table(std::vector<double> t, std::vector<double> values);

  double operator()(double t) const;
  Provenance provenance() const { return provenance_; }
  const std::string& description() const { return description_; }

 private:
  std::function<double(double)> eval_;
  Provenance provenance_;
  std::string description_;
};

struct IndexFunctionCheck {
  bool valid = false;
  /// Largest relative decrease of phi between consecutive grid points.
  double increaseDefect = 0.0;
  /// Largest relative increase of phi(t)/t between consecutive grid points.
  double ratioDefect = 0.0;
  bool zeroAtOrigin = false;
  bool strictNearZero = false;
};

/// Checks phi(0) = 0, monotonicity, strict increase on the first grid cells
/// and that phi(t)/t is nonincreasing, each with relative slack.
IndexFunctionCheck validateIndexFunction(const IndexFunction& phi, const std::vector<double>& grid,
                                         double slack = 1e-9);

/// phi(t) = 2 D(Phi^{-1}(t)) on the covered range. Above it phi continues as
/// r_first t + D(r_first); below it (only for profiles that stay positive)
/// phi(t)/t is frozen at its boundary value.
IndexFunction rateFunctionFromProfile(const DistanceProfile& profile);

struct VscOptions {
  /// Additional candidate points (e.g. the profile's inner maximizers).
  std::vector<Vector> extraProbes;
  /// Starts refined by local pattern search.
  int localStarts = 8;
  int localBudget = 4000;
  std::uint64_t seed = 0xc0ffeeULL;
};

struct VscReport {
  double minimumGap = 0.0;
  Vector witness;
  /// ||A witness - A x_dagger||.
  double witnessDistance = 0.0;
  bool pass = false;
  int evaluations = 0;
};

/// Adversarial search for the minimum of  Omega(x) - Omega(x_dagger) + phi(||A x - A x_dagger||).
VscReport checkVSC(const ProblemSpec& problem, const ExactSolution& exact,
                   const IndexFunction& phi, double tol, const VscOptions& options = {});

/// sqrt(c1 c2) delta^p / phi(delta), the geometric midpoint of the admissible band.
double chooseAlpha(double delta, double p, const IndexFunction& phi, double c1, double c2);

}  // namespace vsclab
