#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vsclab/rate_calculus.hpp"

namespace vsclab {

enum class NoiseMode { RandomUnit, TopSingular };

std::string noiseModeName(NoiseMode mode);
/// Accepts "randomUnit" and "topSingular"; throws ConfigError otherwise.
NoiseMode parseNoiseMode(const std::string& name);

/// y_exact + delta u with ||u||_Y = 1. RandomUnit draws u from a seeded
/// symmetric distribution, TopSingular uses the leading left singular vector
/// of A with the sign chosen by the seed's parity.
Vector makeNoise(const Vector& yExact, double delta, NoiseMode mode, std::uint64_t seed,
                 const Matrix& A, const NormSpec& ySpace);

/// Lower-bound constant c = 1/c1 + 4p.
double lowerConstant(double p, double c1);
/// C_ub = (2(1+p)c2+1)^(1/(p-1)) + 1 + (2(1+p)c2+1)/c1.
double upperConstant(double p, double c1, double c2);

struct RateRecord {
  double delta = 0.0;
  double alpha = 0.0;
  std::uint64_t noiseSeed = 0;
  NoiseMode noiseMode = NoiseMode::RandomUnit;
  double bSkewed = 0.0;
  double etaDualNorm = 0.0;
  double phiDelta = 0.0;
  /// Phi^{-1}(delta).
  double rInv = 0.0;
  /// D(c Phi^{-1}(delta)).
  double lowerBound = 0.0;
  /// D(||eta||).
  double dOfEta = 0.0;
  double residualNorm = 0.0;
  double upperConstant = 0.0;
  bool okLower = false;
  bool okEta = false;
  bool okDoEta = false;
  bool okUpper = false;

  bool satisfied() const { return okLower && okEta && okDoEta && okUpper; }
};

struct SweepOptions {
  double c1 = 1.0;
  double c2 = 1.0;
  std::vector<NoiseMode> modes{NoiseMode::RandomUnit};
  std::vector<std::uint64_t> seeds{0};
};

struct SweepResult {
  /// Sorted by (delta, seed, mode).
  std::vector<RateRecord> records;
  /// One diagnostic per aborted record.
  std::vector<std::string> failures;
};

/// Drops the deltas whose Phi-preimage is not covered by the profile.
struct ClippedGrid {
  std::vector<double> kept;
  std::vector<double> dropped;
};
ClippedGrid clipDeltaGrid(const std::vector<double>& deltas, const DistanceProfile& profile);

SweepResult runSweep(const ProblemSpec& problem, const ExactSolution& exact,
                     const DistanceProfile& profile, const std::vector<double>& deltas,
                     const SweepOptions& options);

struct RateFit {
  double kappa = 0.0;
  double logIntercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double rmsResidual = 0.0;
  std::size_t used = 0;
  /// Set when every B vanishes; kappa is then meaningless.
  bool degenerate = false;
  std::string regime;
};

/// Least-squares slope of log B_skewed against log delta over records with
/// B > 1e-12; smaller values count as exact recovery.
RateFit fitRateExponent(const std::vector<RateRecord>& records);

struct ConstantRemovalEntry {
  double delta = 0.0;
  double rInv = 0.0;
  double ratio = 0.0;
  bool skipped = false;
  std::string diagnostic;
};

struct ConstantRemovalReport {
  std::vector<ConstantRemovalEntry> entries;
  double minRatio = 0.0;
  double maxRatio = 0.0;
  /// False when the ratio grows strictly along decreasing delta by more than a factor 2.
  bool bounded = true;
};

/// Ratio D(Phi^{-1}(delta)) / D(c Phi^{-1}(delta)) per delta.
ConstantRemovalReport removeConstantCheck(const DistanceProfile& profile, double c,
                                          const std::vector<double>& deltas);

extern const char* const kRatesCsvHeader;
void writeRatesCsv(const std::vector<RateRecord>& records, std::ostream& out);

}  // namespace vsclab
