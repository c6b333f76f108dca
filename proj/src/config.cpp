#include "fedcontract/config.hpp"

#include <cmath>
#include <fstream>

#include "fedcontract/errors.hpp"

namespace fedcontract {
namespace {

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

const Json& require(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  if (!j.contains(key)) throw ConfigError(at(path, key), "missing required field");
  return j.at(key);
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::uint64_t as_count(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

const Json* optional(const Json& j, const char* key) {
  return j.contains(key) ? &j.at(key) : nullptr;
}

std::vector<double> number_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], at(path, i)));
  return out;
}

TypeProfile parse_profile(const Json& j, const std::string& path) {
  const double c = as_number(require(j, path, "c"), at(path, "c"));
  if (!(c > 0.0)) throw ConfigError(at(path, "c"), "must be positive");
  const auto& types_json = require(j, path, "types");
  const auto types_path = at(path, "types");
  if (!types_json.is_array() || types_json.empty())
    throw ConfigError(types_path, "expected a non-empty array");
  std::vector<ClientType> types;
  double beta_sum = 0.0;
  for (std::size_t i = 0; i < types_json.size(); ++i) {
    const auto p = at(types_path, i);
    const double theta = as_number(require(types_json[i], p, "theta"), at(p, "theta"));
    const double beta = as_number(require(types_json[i], p, "beta"), at(p, "beta"));
    if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError(at(p, "theta"), "must lie in (0,1]");
    if (i > 0 && !(theta > types.back().theta))
      throw ConfigError(at(p, "theta"), "thetas must be strictly increasing");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError(at(p, "beta"), "must lie in [0,1]");
    if (const auto* idx = optional(types_json[i], "index"); idx && as_count(*idx, at(p, "index")) != i + 1)
      throw ConfigError(at(p, "index"), "type indices must run 1..I in order");
    beta_sum += beta;
    types.push_back({i + 1, theta, beta});
  }
  if (std::abs(beta_sum - 1.0) > 1e-9) throw ConfigError(types_path, "betas must sum to 1");
  return TypeProfile(std::move(types), c);
}

RevenueCurve parse_curve(const Json& j, const std::string& path) {
  const auto& kind_json = require(j, path, "kind");
  if (!kind_json.is_string()) throw ConfigError(at(path, "kind"), "expected a string");
  const auto kind = kind_json.get<std::string>();
  try {
    if (kind == "exponential")
      return RevenueCurve::exponential(as_number(require(j, path, "a"), at(path, "a")),
                                       as_number(require(j, path, "b"), at(path, "b")));
    if (kind == "table") {
      const auto& pts = require(j, path, "points");
      const auto pts_path = at(path, "points");
      if (!pts.is_array() || pts.empty()) throw ConfigError(pts_path, "expected a non-empty array");
      std::vector<RevenueCurve::Knot> knots;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto p = at(pts_path, i);
        knots.emplace_back(as_number(require(pts[i], p, "M"), at(p, "M")),
                           as_number(require(pts[i], p, "G"), at(p, "G")));
      }
      return RevenueCurve::table(std::move(knots));
    }
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(at(path, "kind"), "must be 'exponential' or 'table'");
}

}  // namespace

RoundMode ExperimentConfig::round_mode() const {
  return mode == "analytic" ? RoundMode::analytic : RoundMode::stochastic;
}

PassSource ExperimentConfig::pass_source() const {
  return mode == "ml" ? PassSource::ml : PassSource::analytic;
}

SchemeConfig ExperimentConfig::scheme_config() const {
  return SchemeConfig{profile,  curve,       benchmarks, task,          training,
                      calibration, population, seeds,      c_sweep,       pass_source(),
                      tolerance};
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  const auto version = as_count(require(j, "", "schema_version"), "schema_version");
  if (version != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version));

  ExperimentConfig cfg{.profile = parse_profile(require(j, "", "profile"), "profile"),
                       .curve = parse_curve(require(j, "", "revenue_curve"), "revenue_curve"),
                       .benchmarks = number_list(require(j, "", "benchmarks"), "benchmarks")};
  if (cfg.benchmarks.size() != cfg.profile.size())
    throw ConfigError("benchmarks", "needs one entry per client type");
  for (std::size_t i = 0; i < cfg.benchmarks.size(); ++i)
    if (!(cfg.benchmarks[i] >= 0.0 && cfg.benchmarks[i] <= 1.0))
      throw ConfigError(at("benchmarks", i), "must lie in [0,1]");
  if (!cfg.curve.increasing_convex_on(cfg.benchmarks))
    throw ConfigError("revenue_curve", "must be increasing and convex on the benchmarks");
  try {
    for (double m : cfg.benchmarks) (void)cfg.curve(m);
  } catch (const DomainError& e) {
    throw ConfigError("benchmarks", e.what());
  }

  if (const auto* v = optional(j, "population")) {
    cfg.population = as_count(*v, "population");
    if (cfg.population == 0) throw ConfigError("population", "must be positive");
  }
  if (const auto* v = optional(j, "seeds")) {
    if (!v->is_array() || v->empty()) throw ConfigError("seeds", "expected a non-empty array");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < v->size(); ++i) cfg.seeds.push_back(as_count((*v)[i], at("seeds", i)));
  }
  if (const auto* v = optional(j, "mode")) {
    if (!v->is_string()) throw ConfigError("mode", "expected a string");
    cfg.mode = v->get<std::string>();
    if (cfg.mode != "analytic" && cfg.mode != "stochastic" && cfg.mode != "ml")
      throw ConfigError("mode", "must be analytic, stochastic or ml");
  }
  if (const auto* v = optional(j, "schemes")) {
    if (!v->is_array() || v->empty()) throw ConfigError("schemes", "expected a non-empty array");
    cfg.schemes.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto s = as_count((*v)[i], at("schemes", i));
      if (s < 1 || s > kSchemeCount) throw ConfigError(at("schemes", i), "must be 1, 2 or 3");
      cfg.schemes.push_back(static_cast<int>(s));
    }
  }
  if (const auto* v = optional(j, "c_sweep")) {
    cfg.c_sweep = number_list(*v, "c_sweep");
    if (cfg.c_sweep.empty()) throw ConfigError("c_sweep", "expected a non-empty array");
    for (std::size_t i = 0; i < cfg.c_sweep.size(); ++i)
      if (!(cfg.c_sweep[i] > 0.0)) throw ConfigError(at("c_sweep", i), "must be positive");
  } else {
    cfg.c_sweep = {cfg.profile.unit_cost()};
  }
  if (const auto* v = optional(j, "output_dir")) {
    if (!v->is_string()) throw ConfigError("output_dir", "expected a string");
    cfg.output_dir = v->get<std::string>();
  }
  if (const auto* v = optional(j, "tolerance")) {
    cfg.tolerance = as_number(*v, "tolerance");
    if (!(cfg.tolerance >= 0.0)) throw ConfigError("tolerance", "must be non-negative");
  }

  if (const auto* t = optional(j, "task")) {
    if (const auto* v = optional(*t, "dimension")) cfg.task.dimension = as_count(*v, "task.dimension");
    if (const auto* v = optional(*t, "classes")) cfg.task.classes = as_count(*v, "task.classes");
    if (const auto* v = optional(*t, "test_size")) cfg.task.test_size = as_count(*v, "task.test_size");
    if (const auto* v = optional(*t, "seed")) cfg.task.seed = as_count(*v, "task.seed");
    if (const auto* v = optional(*t, "hidden")) {
      if (!v->is_array() || v->size() > 1) throw ConfigError("task.hidden", "at most one hidden layer");
      cfg.task.hidden.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        cfg.task.hidden.push_back(as_count((*v)[i], at("task.hidden", i)));
        if (cfg.task.hidden.back() == 0) throw ConfigError(at("task.hidden", i), "must be positive");
      }
    }
    if (cfg.task.dimension == 0) throw ConfigError("task.dimension", "must be positive");
    if (cfg.task.classes < 2) throw ConfigError("task.classes", "must be at least 2");
    if (cfg.task.test_size == 0) throw ConfigError("task.test_size", "must be positive");
  }
  if (const auto* t = optional(j, "training")) {
    if (const auto* v = optional(*t, "max_epochs")) cfg.training.max_epochs = as_count(*v, "training.max_epochs");
    if (const auto* v = optional(*t, "points_per_client")) {
      cfg.training.points_per_client = as_count(*v, "training.points_per_client");
      if (cfg.training.points_per_client == 0)
        throw ConfigError("training.points_per_client", "must be positive");
    }
    if (const auto* v = optional(*t, "learning_rate")) {
      cfg.training.options.learning_rate = as_number(*v, "training.learning_rate");
      if (!(cfg.training.options.learning_rate > 0.0))
        throw ConfigError("training.learning_rate", "must be positive");
    }
    if (const auto* v = optional(*t, "batch_size")) {
      cfg.training.options.batch_size = as_count(*v, "training.batch_size");
      if (cfg.training.options.batch_size == 0) throw ConfigError("training.batch_size", "must be positive");
    }
  }
  if (const auto* t = optional(j, "calibration")) {
    if (const auto* v = optional(*t, "radius_steps")) {
      cfg.calibration.radius_steps = as_count(*v, "calibration.radius_steps");
      if (cfg.calibration.radius_steps < 2) throw ConfigError("calibration.radius_steps", "must be at least 2");
    }
    if (const auto* v = optional(*t, "samples")) {
      cfg.calibration.samples = as_count(*v, "calibration.samples");
      if (cfg.calibration.samples == 0) throw ConfigError("calibration.samples", "must be positive");
    }
    if (const auto* v = optional(*t, "tolerance")) cfg.calibration.tolerance = as_number(*v, "calibration.tolerance");
    if (const auto* v = optional(*t, "max_iterations"))
      cfg.calibration.max_iterations = as_count(*v, "calibration.max_iterations");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

Json to_json(const ExperimentConfig& cfg) {
  return {{"schema_version", kConfigSchemaVersion},
          {"profile", to_json(cfg.profile)},
          {"revenue_curve", to_json(cfg.curve)},
          {"benchmarks", cfg.benchmarks},
          {"population", cfg.population},
          {"seeds", cfg.seeds},
          {"mode", cfg.mode},
          {"schemes", cfg.schemes},
          {"c_sweep", cfg.c_sweep},
          {"output_dir", cfg.output_dir},
          {"tolerance", cfg.tolerance},
          {"task",
           {{"dimension", cfg.task.dimension},
            {"classes", cfg.task.classes},
            {"test_size", cfg.task.test_size},
            {"seed", cfg.task.seed},
            {"hidden", cfg.task.hidden}}},
          {"training",
           {{"max_epochs", cfg.training.max_epochs},
            {"points_per_client", cfg.training.points_per_client},
            {"learning_rate", cfg.training.options.learning_rate},
            {"batch_size", cfg.training.options.batch_size}}},
          {"calibration",
           {{"radius_steps", cfg.calibration.radius_steps},
            {"samples", cfg.calibration.samples},
            {"tolerance", cfg.calibration.tolerance},
            {"max_iterations", cfg.calibration.max_iterations}}}};
}

}  // namespace fedcontract
