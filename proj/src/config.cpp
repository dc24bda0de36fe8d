#include "vsclab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vsclab {

namespace {

using nlohmann::json;

void rejectUnknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + "." + item.key() + ": unknown key");
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + ": missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + ": must be finite");
  return d;
}

double numberOr(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

double positive(const json& obj, const std::string& key, const std::string& where, double fallback) {
  const double v = numberOr(obj, key, where, fallback);
  if (!(v > 0.0)) throw ConfigError(where + "." + key + ": must be positive");
  return v;
}

Vector vectorOf(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field + ": expected a nonempty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(field + ": expected a nonempty array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    if (!std::isfinite(out[static_cast<Eigen::Index>(i)])) throw ConfigError(field + ": entries must be finite");
  }
  return out;
}

Matrix matrixOf(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field + ": expected a nonempty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Matrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = vectorOf(v[static_cast<std::size_t>(i)], field);
    if (cols < 0) {
      cols = row.size();
      out.resize(rows, cols);
    } else if (row.size() != cols) {
      throw ConfigError(field + ": rows have different lengths");
    }
    out.row(i) = row.transpose();
  }
  return out;
}

PenaltySpec penaltyOf(const json& obj) {
  const std::string where = "problem.penalty";
  rejectUnknown(obj, where, {"kind", "s", "mu", "weights"});
  if (!obj.contains("kind") || !obj.at("kind").is_string()) {
    throw ConfigError(where + ".kind: expected a string");
  }
  const std::string kind = obj.at("kind").get<std::string>();
  Vector weights;
  if (obj.contains("weights")) weights = vectorOf(obj.at("weights"), where + ".weights");
  try {
    switch (parsePenaltyKind(kind)) {
      case PenaltyKind::SquaredL2:
        return PenaltySpec::squaredL2(weights);
      case PenaltyKind::PowerNorm:
        return PenaltySpec::powerNorm(number(obj, "s", where), weights);
      case PenaltyKind::L1:
        return PenaltySpec::l1(weights);
      case PenaltyKind::ElasticNet:
        return PenaltySpec::elasticNet(number(obj, "mu", where), weights);
    }
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ".kind: unsupported");
}

SolverSettings solverOf(const json& root) {
  SolverSettings s;
  if (!root.contains("solver")) return s;
  const json& obj = root.at("solver");
  rejectUnknown(obj, "solver", {"tikhonov_tol", "inner_tol", "max_iter"});
  s.tikhonovTol = positive(obj, "tikhonov_tol", "solver", s.tikhonovTol);
  s.innerTol = positive(obj, "inner_tol", "solver", s.innerTol);
  const double maxIter = positive(obj, "max_iter", "solver", s.maxIter);
  if (maxIter != std::floor(maxIter) || maxIter > 1e9) {
    throw ConfigError("solver.max_iter: must be a positive integer");
  }
  s.maxIter = static_cast<int>(maxIter);
  return s;
}

ProblemSpec problemOf(const json& root) {
  if (!root.contains("problem")) throw ConfigError("problem: missing");
  const json& obj = root.at("problem");
  const std::string where = "problem";
  rejectUnknown(obj, where, {"name", "A", "y_exact", "p", "q", "weights", "penalty"});
  if (!obj.contains("A")) throw ConfigError("problem.A: missing");
  if (!obj.contains("y_exact")) throw ConfigError("problem.y_exact: missing");
  if (!obj.contains("penalty")) throw ConfigError("problem.penalty: missing");
  const Matrix A = matrixOf(obj.at("A"), "problem.A");
  const Vector y = vectorOf(obj.at("y_exact"), "problem.y_exact");
  const double p = number(obj, "p", where);
  if (!(p > 1.0)) throw ConfigError("problem.p: must be > 1");
  const double q = numberOr(obj, "q", where, 2.0);
  if (!(q > 1.0)) throw ConfigError("problem.q: must be > 1");
  std::string name = "problem";
  if (obj.contains("name")) {
    if (!obj.at("name").is_string()) throw ConfigError("problem.name: expected a string");
    name = obj.at("name").get<std::string>();
  }
  PenaltySpec penalty = penaltyOf(obj.at("penalty"));
  try {
    NormSpec ySpace = obj.contains("weights")
                          ? NormSpec(q, vectorOf(obj.at("weights"), "problem.weights"))
                          : NormSpec(q, A.rows());
    return ProblemSpec(A, y, std::move(penalty), p, std::move(ySpace), solverOf(root), name);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

ProfileGrid profileOf(const json& root) {
  ProfileGrid g;
  if (!root.contains("profile")) return g;
  const json& obj = root.at("profile");
  rejectUnknown(obj, "profile", {"r_min", "r_max", "points_per_decade"});
  g.rMin = positive(obj, "r_min", "profile", g.rMin);
  g.rMax = positive(obj, "r_max", "profile", g.rMax);
  g.pointsPerDecade = positive(obj, "points_per_decade", "profile", g.pointsPerDecade);
  if (g.rMax < g.rMin) throw ConfigError("profile.r_max: must not be below profile.r_min");
  return g;
}

SweepConfig sweepOf(const json& root) {
  SweepConfig s;
  if (!root.contains("sweep")) return s;
  const json& obj = root.at("sweep");
  const std::string where = "sweep";
  rejectUnknown(obj, where,
                {"delta_min", "delta_max", "points_per_decade", "seeds", "mode", "c1", "c2"});
  s.deltaMin = positive(obj, "delta_min", where, s.deltaMin);
  s.deltaMax = positive(obj, "delta_max", where, s.deltaMax);
  if (s.deltaMax < s.deltaMin) throw ConfigError("sweep.delta_max: must not be below sweep.delta_min");
  s.pointsPerDecade = positive(obj, "points_per_decade", where, s.pointsPerDecade);
  s.c1 = positive(obj, "c1", where, s.c1);
  s.c2 = positive(obj, "c2", where, s.c2);
  if (s.c2 < s.c1) throw ConfigError("sweep.c2: must not be below sweep.c1");
  if (obj.contains("seeds")) {
    const json& seeds = obj.at("seeds");
    if (!seeds.is_array() || seeds.empty()) throw ConfigError("sweep.seeds: expected a nonempty array");
    s.seeds.clear();
    for (const json& v : seeds) {
      if (!v.is_number_unsigned()) throw ConfigError("sweep.seeds: entries must be nonnegative integers");
      s.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (obj.contains("mode")) {
    if (!obj.at("mode").is_string()) throw ConfigError("sweep.mode: expected a string");
    const std::string mode = obj.at("mode").get<std::string>();
    if (mode == "both") {
      s.modes = {NoiseMode::RandomUnit, NoiseMode::TopSingular};
    } else {
      try {
        s.modes = {parseNoiseMode(mode)};
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("sweep.mode: ") + e.what());
      }
    }
  }
  return s;
}

}  // namespace

RunConfig parseRunConfig(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  rejectUnknown(root, "config", {"problem", "profile", "sweep", "solver", "output"});
  RunConfig cfg{problemOf(root), profileOf(root), sweepOf(root), "out"};
  if (root.contains("output")) {
    if (!root.at("output").is_string()) throw ConfigError("output: expected a directory path string");
    cfg.output = root.at("output").get<std::string>();
  }
  return cfg;
}

RunConfig loadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parseRunConfig(buffer.str());
}

}  // namespace vsclab
