#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedcontract/contract.hpp"
#include "fedcontract/fed_learning.hpp"
#include "fedcontract/json_io.hpp"
#include "fedcontract/population.hpp"

namespace fedcontract {

inline constexpr int kConfigSchemaVersion = 1;

/// A validation failure tied to the offending field, e.g. "profile.types[2].theta".
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

struct ExperimentConfig {
  TypeProfile profile;
  RevenueCurve curve;
  std::vector<double> benchmarks;
  std::size_t population = 10000;
  std::vector<std::uint64_t> seeds{1};
  std::string mode = "analytic";  // analytic | stochastic | ml
  std::vector<int> schemes{1, 2, 3};
  std::vector<double> c_sweep{};  // defaults to {profile c}
  std::string output_dir = "out";
  TaskSpec task{};
  TrainingSpec training{};
  CalibrationOptions calibration{};
  double tolerance = kDefaultTolerance;

  /// analytic → analytic; stochastic and ml → stochastic.
  RoundMode round_mode() const;
  /// ml → ml; analytic and stochastic → analytic.
  PassSource pass_source() const;
  SchemeConfig scheme_config() const;
};

/// Parses and validates; every failure is a ConfigError naming the field.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Full normalized form including defaults.
Json to_json(const ExperimentConfig& config);

}  // namespace fedcontract
