// Command-line front end: solve, dprofile, rates, vsc-check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vsclab/config.hpp"
#include "vsclab/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace vsclab;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kSolverFailure = 2, kInequalityFailure = 3 };

struct Context {
  RunConfig config;
  fs::path outDir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void writeFile(const Context& ctx, const std::string& name,
               const std::function<void(std::ostream&)>& body) {
  fs::create_directories(ctx.outDir);
  const fs::path path = ctx.outDir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw ConfigError("failed while writing '" + path.string() + "'");
  if (!ctx.quiet) std::cout << "wrote " << path.string() << '\n';
}

DistanceProfile profileFor(const Context& ctx, const ExactSolution& exact,
                           const std::string& cachedPath) {
  if (!cachedPath.empty()) {
    std::ifstream in(cachedPath);
    if (!in) throw ConfigError("cannot read profile '" + cachedPath + "'");
    return readProfileCsv(in);
  }
  const ProfileGrid& g = ctx.config.profile;
  return buildProfile(ctx.config.problem, exact, g.rMin, g.rMax, g.pointsPerDecade);
}

int cmdSolve(const Context& ctx, double delta, std::optional<double> alphaOpt,
             const std::string& modeName) {
  const ProblemSpec& problem = ctx.config.problem;
  if (!(delta >= 0.0)) throw ConfigError("--delta: must be >= 0");
  const NoiseMode mode = parseNoiseMode(modeName);
  const std::uint64_t seed = ctx.seed.value_or(0);
  const ExactSolution exact = omegaMinSolution(problem);

  double alpha = 1e-8;
  if (alphaOpt) {
    if (!(*alphaOpt > 0.0)) throw ConfigError("--alpha: must be positive");
    alpha = *alphaOpt;
  } else if (delta > 0.0) {
    const DistanceProfile profile = profileFor(ctx, exact, "");
    alpha = chooseAlpha(delta, problem.p(), rateFunctionFromProfile(profile), ctx.config.sweep.c1,
                        ctx.config.sweep.c2);
  }
  const Vector y = makeNoise(problem.yExact(), delta, mode, seed, problem.A(), problem.ySpace());
  const RegularizedSolution sol = solveTikhonov(problem, y, alpha, delta);
  const double bSkewed = skewedBregman(sol, exact, problem.penalty());
  const double etaNorm = problem.ySpace().dualNorm(sol.eta);

  if (!ctx.quiet) {
    std::cout << "problem        " << problem.name() << " (" << problem.penalty().name() << ", p="
              << fmt(problem.p()) << ", q=" << fmt(problem.ySpace().exponent()) << ")\n"
              << "delta          " << fmt(delta) << "  (" << modeName << ", seed " << seed << ")\n"
              << "alpha          " << fmt(alpha) << '\n'
              << "residual       " << fmt(sol.residualNorm) << '\n'
              << "optimality     " << fmt(sol.optimalityGap) << " after " << sol.report.iterations
              << " iterations\n"
              << "||eta||_*      " << fmt(etaNorm) << '\n'
              << "Omega(x)       " << fmt(problem.penalty().value(sol.x)) << '\n'
              << "B_skewed       " << fmt(bSkewed) << '\n'
              << "||x - x_dag||  " << fmt((sol.x - exact.x).norm()) << '\n';
  }
  writeFile(ctx, "solve.csv", [&](std::ostream& out) {
    out << "delta,alpha,seed,mode,residual_norm,optimality_gap,eta_dual_norm,penalty_value,B_skewed";
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) out << ",x_" << i + 1;
    out << '\n'
        << fmt(delta, "%.17g") << ',' << fmt(alpha, "%.17g") << ',' << seed << ',' << modeName << ','
        << fmt(sol.residualNorm, "%.17g") << ',' << fmt(sol.optimalityGap, "%.17g") << ','
        << fmt(etaNorm, "%.17g") << ',' << fmt(problem.penalty().value(sol.x), "%.17g") << ','
        << fmt(bSkewed, "%.17g");
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) out << ',' << fmt(sol.x[i], "%.17g");
    out << '\n';
  });
  return kOk;
}

int cmdDProfile(const Context& ctx) {
  const ProblemSpec& problem = ctx.config.problem;
  const ExactSolution exact = omegaMinSolution(problem);
  const DistanceProfile profile = profileFor(ctx, exact, "");

  PlotSeries dSeries{"D(r)", profile.rGrid(), profile.dValues(), "#1f77b4",
                     profile.size() == 1};
  PlotSeries phiSeries{"Phi(r) = D(r)/r", {}, {}, "#d62728", profile.size() == 1};
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile.dValues()[i] > 0.0) {
      phiSeries.x.push_back(profile.rGrid()[i]);
      phiSeries.y.push_back(profile.dValues()[i] / profile.rGrid()[i]);
    }
  }
  if (!ctx.quiet) {
    std::cout << "problem          " << problem.name() << '\n'
              << "nodes            " << profile.size() << " on [" << fmt(profile.rGrid().front())
              << ", " << fmt(profile.rGrid().back()) << "]\n"
              << "D(r_min)         " << fmt(profile.dValues().front()) << "  (Omega(x_dag) = "
              << fmt(exact.penaltyValue) << ")\n"
              << "positive nodes   " << profile.positiveCount()
              << (profile.reachesZero() ? "  (D reaches zero inside the grid)" : "") << '\n'
              << "monotone defect  " << fmt(profile.monotonicityDefect()) << '\n'
              << "convex defect    " << fmt(profile.convexityDefect()) << '\n';
    if (profile.positiveCount() > 0) {
      const auto [tMin, tMax] = profile.phiRange();
      std::cout << "Phi range        [" << fmt(tMin) << ", " << fmt(tMax) << "]\n";
    }
  }
  writeFile(ctx, "dprofile.csv", [&](std::ostream& out) { writeProfileCsv(profile, out); });
  writeFile(ctx, "dprofile.svg", [&](std::ostream& out) {
    writeLogLogSvg(out, "Distance function: " + problem.name(), "r", "value",
                   {dSeries, phiSeries});
  });
  return kOk;
}

int cmdRates(const Context& ctx, const std::string& cachedProfile) {
  const ProblemSpec& problem = ctx.config.problem;
  const SweepConfig& sweep = ctx.config.sweep;
  const ExactSolution exact = omegaMinSolution(problem);
  const DistanceProfile profile = profileFor(ctx, exact, cachedProfile);

  const ClippedGrid grid =
      clipDeltaGrid(logGrid(sweep.deltaMin, sweep.deltaMax, sweep.pointsPerDecade), profile);
  if (grid.kept.empty()) {
    throw RangeError("no delta of the sweep lies in the Phi-range covered by the profile; extend rGrid");
  }
  if (!grid.dropped.empty()) {
    std::cerr << "warning: " << grid.dropped.size()
              << " delta value(s) outside the covered Phi-range were skipped (extend rGrid to include them)\n";
  }
  SweepOptions options;
  options.c1 = sweep.c1;
  options.c2 = sweep.c2;
  options.modes = sweep.modes;
  options.seeds = ctx.seed ? std::vector<std::uint64_t>{*ctx.seed} : sweep.seeds;
  const SweepResult result = runSweep(problem, exact, profile, grid.kept, options);

  writeFile(ctx, "rates.csv", [&](std::ostream& out) { writeRatesCsv(result.records, out); });
  PlotSeries bSeries{"B_skewed", {}, {}, "#1f77b4", true};
  PlotSeries upper{"C_ub phi(delta)", {}, {}, "#d62728", false};
  PlotSeries lower{"D(c Phi^-1(delta))", {}, {}, "#2ca02c", false};
  for (const RateRecord& r : result.records) {
    bSeries.x.push_back(r.delta);
    bSeries.y.push_back(r.bSkewed);
    if (upper.x.empty() || upper.x.back() != r.delta) {
      upper.x.push_back(r.delta);
      upper.y.push_back(r.upperConstant * r.phiDelta);
      lower.x.push_back(r.delta);
      lower.y.push_back(r.lowerBound);
    }
  }
  writeFile(ctx, "rates.svg", [&](std::ostream& out) {
    writeLogLogSvg(out, "Rate sandwich: " + problem.name(), "delta", "value",
                   {upper, bSeries, lower});
  });

  std::size_t violated = 0;
  for (const RateRecord& r : result.records) {
    if (!r.satisfied()) ++violated;
  }
  if (!ctx.quiet) {
    std::cout << "records          " << result.records.size() << " (" << grid.kept.size()
              << " deltas)\n"
              << "violations       " << violated << '\n';
    if (result.records.size() >= 3) {
      const RateFit fit = fitRateExponent(result.records);
      if (fit.degenerate) {
        std::cout << "rate exponent    " << fit.regime << '\n';
      } else {
        std::cout << "rate exponent    " << fmt(fit.kappa, "%.4f") << " (rms "
                  << fmt(fit.rmsResidual, "%.2g") << ")\n";
      }
    }
  }
  for (const std::string& f : result.failures) std::cerr << "error: " << f << '\n';
  if (!result.failures.empty()) return kSolverFailure;
  if (violated > 0) {
    for (const RateRecord& r : result.records) {
      if (r.satisfied()) continue;
      std::cerr << "violated: delta=" << fmt(r.delta) << " seed=" << r.noiseSeed << " mode="
                << noiseModeName(r.noiseMode) << (r.okLower ? "" : " lower") << (r.okEta ? "" : " eta")
                << (r.okDoEta ? "" : " d_of_eta") << (r.okUpper ? "" : " upper") << '\n';
    }
    return kInequalityFailure;
  }
  return kOk;
}

std::pair<double, double> twoNumbers(const std::string& spec, const std::string& body) {
  const auto colon = body.find(':');
  if (colon == std::string::npos) throw ConfigError("--phi '" + spec + "': expected kind:C:kappa");
  try {
    std::size_t used = 0;
    const double a = std::stod(body.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing");
    const std::string rest = body.substr(colon + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing");
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("--phi '" + spec + "': malformed numbers");
  }
}

IndexFunction tableFromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--phi table: cannot read '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,phi") throw ConfigError("--phi table: header must be 't,phi'");
  std::vector<double> t;
  std::vector<double> v;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      t.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("--phi table: malformed row '" + line + "'");
    }
  }
  return IndexFunction::table(std::move(t), std::move(v));
}

int cmdVscCheck(const Context& ctx, const std::string& phiSpec, const std::string& cachedProfile,
                double tol) {
  const ProblemSpec& problem = ctx.config.problem;
  if (!(tol >= 0.0)) throw ConfigError("--tol: must be >= 0");

  // Parse the phi-spec before any expensive work so malformed input fails fast.
  std::optional<IndexFunction> phi;
  const bool fromProfile = phiSpec == "fromProfile";
  if (phiSpec.rfind("power:", 0) == 0) {
    const auto [c, k] = twoNumbers(phiSpec, phiSpec.substr(6));
    phi = IndexFunction::power(c, k);
  } else if (phiSpec.rfind("log:", 0) == 0) {
    const auto [c, k] = twoNumbers(phiSpec, phiSpec.substr(4));
    phi = IndexFunction::logarithmic(c, k);
  } else if (phiSpec.rfind("table:", 0) == 0) {
    phi = tableFromFile(phiSpec.substr(6));
  } else if (!fromProfile) {
    throw ConfigError("--phi '" + phiSpec +
                      "': expected fromProfile, power:C:k, log:C:k or table:path");
  }

  const ExactSolution exact = omegaMinSolution(problem);
  VscOptions options;
  if (ctx.seed) options.seed = *ctx.seed;
  if (fromProfile) {
    const DistanceProfile profile = profileFor(ctx, exact, cachedProfile);
    phi = rateFunctionFromProfile(profile);
    options.extraProbes = profile.minimizers();
  }
  const IndexFunctionCheck check = validateIndexFunction(*phi, logGrid(1e-10, 1e3, 10));
  if (!check.valid) {
    throw ConfigError("--phi '" + phiSpec + "' is not an index function (increase defect " +
                      fmt(check.increaseDefect) + ", ratio defect " + fmt(check.ratioDefect) + ")");
  }

  const VscReport report = checkVSC(problem, exact, *phi, tol, options);
  if (!ctx.quiet) {
    std::cout << "phi              " << phi->description() << '\n'
              << "minimum gap      " << fmt(report.minimumGap, "%.6e") << " (tol " << fmt(tol) << ")\n"
              << "witness distance " << fmt(report.witnessDistance, "%.6e") << '\n'
              << "evaluations      " << report.evaluations << '\n'
              << "witness          [";
    for (Eigen::Index i = 0; i < report.witness.size(); ++i) {
      std::cout << (i ? ", " : "") << fmt(report.witness[i]);
    }
    std::cout << "]\n";
  }
  std::cout << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? kOk : kInequalityFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov regularization rate laboratory"};
  app.require_subcommand(1);
  std::string configPath;
  std::string outDir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", configPath, "Run configuration (JSON)")->required();
  app.add_option("--out", outDir, "Output directory (overrides the config)");
  app.add_option("--seed", seed, "Noise / search seed");
  app.add_flag("--quiet", quiet, "Suppress the human-readable summary");

  auto* solve = app.add_subcommand("solve", "Solve one Tikhonov problem");
  double delta = 0.0;
  std::optional<double> alpha;
  std::string mode = "randomUnit";
  solve->add_option("--delta", delta, "Noise level");
  solve->add_option("--alpha", alpha, "Regularization parameter (default: a priori choice)");
  solve->add_option("--mode", mode, "Noise mode: randomUnit or topSingular");

  auto* dprofile = app.add_subcommand("dprofile", "Sample the distance function D(r)");

  auto* rates = app.add_subcommand("rates", "Run the delta sweep and check the rate bounds");
  std::string cachedProfile;
  rates->add_option("--profile", cachedProfile, "Use a cached profile CSV instead of sampling");

  auto* vsc = app.add_subcommand("vsc-check", "Check a variational source condition");
  std::string phiSpec = "fromProfile";
  double tol = 1e-6;
  vsc->add_option("--phi", phiSpec, "fromProfile | power:C:k | log:C:k | table:path");
  vsc->add_option("--profile", cachedProfile, "Use a cached profile CSV for fromProfile");
  vsc->add_option("--tol", tol, "Allowed negative gap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    Context ctx{loadRunConfig(configPath), {}, seed, quiet};
    ctx.outDir = outDir.empty() ? fs::path(ctx.config.output) : fs::path(outDir);
    if (*solve) return cmdSolve(ctx, delta, alpha, mode);
    if (*dprofile) return cmdDProfile(ctx);
    if (*rates) return cmdRates(ctx, cachedProfile);
    return cmdVscCheck(ctx, phiSpec, cachedProfile, tol);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const AssumptionViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ProfileInvariantError& e) {
    std::cerr << "profile invariant violated: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
}
