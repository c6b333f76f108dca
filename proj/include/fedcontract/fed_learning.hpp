#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fedcontract/contract.hpp"
#include "fedcontract/coverage.hpp"
#include "fedcontract/model.hpp"

namespace fedcontract {

struct TaskSpec {
  std::size_t dimension = 2;
  std::size_t classes = 2;
  std::size_t test_size = 2000;
  std::uint64_t seed = 7;
  std::vector<std::size_t> hidden;  // empty: logistic regression
};

/// Synthetic classification task on [0,1]^d. The label of x is the argmax of
/// K unit directions, evenly spread in angle and rotated by a seeded offset,
/// dotted with x − centre; the first two coordinates decide the label. Two
/// classes give a half-space split through the cube centre.
class SyntheticTask {
public:
  explicit SyntheticTask(const TaskSpec& spec);

  std::size_t dimension() const noexcept { return spec_.dimension; }
  std::size_t classes() const noexcept { return spec_.classes; }
  const TaskSpec& spec() const noexcept { return spec_; }
  Architecture architecture() const { return {spec_.dimension, spec_.hidden, spec_.classes}; }

  std::size_t label(std::span<const double> x) const;
  LabeledCloud label_all(PointCloud points) const;
  /// Uniform over the whole cube.
  const LabeledCloud& test_set() const noexcept { return test_set_; }

private:
  TaskSpec spec_;
  std::vector<double> directions_;  // classes × 2
  LabeledCloud test_set_;
};

struct CalibrationOptions {
  std::size_t radius_steps = 32;
  std::size_t samples = 2048;
  double tolerance = 0.02;
  std::size_t max_iterations = 40;
};

struct ClientDataset {
  LabeledCloud data;
  double target_theta = 0.0;
  double measured_theta = 0.0;
  double side = 1.0;  // sub-cube [0, side]^d
};

/// Coverage-controlled client data: n_points uniform draws u_k in the unit
/// cube, scaled to side·u_k with the side found by bisection so that the
/// measured coverage quality is within `tolerance` of the target. Throws
/// CalibrationError naming the closest achievable quality otherwise.
ClientDataset generate_client_dataset(const SyntheticTask& task, double target_theta,
                                      std::size_t n_points, std::uint64_t seed,
                                      const CalibrationOptions& options = {});

/// Accuracy on the task's uniform test set.
double server_test(const ModelVector& model, const SyntheticTask& task);

enum class PassSource {
  ml,        // server_test(model) ≥ M
  analytic,  // realize_success(θ, e)
};
std::string_view to_string(PassSource source);
PassSource parse_pass_source(std::string_view text);

struct TrainingSpec {
  std::size_t max_epochs = 50;
  std::size_t points_per_client = 200;
  TrainOptions options;
};

struct SchemeConfig {
  TypeProfile profile;
  RevenueCurve curve;
  std::vector<double> benchmarks;
  TaskSpec task;
  TrainingSpec training;
  CalibrationOptions calibration;
  std::size_t population = 30;
  std::vector<std::uint64_t> seeds;
  std::vector<double> c_sweep;
  PassSource pass_source = PassSource::ml;
  double tolerance = kDefaultTolerance;
};

/// Scheme 1: contract menu, reward-proportional weights.
/// Scheme 2: contract menu, uniform weights.
/// Scheme 3: one flat item (β-weighted mean fee, reward and benchmark) for
/// every participant of the contract schemes, uniform weights.
inline constexpr int kSchemeCount = 3;

struct SchemeRow {
  std::uint64_t seed = 0;
  double c = 0.0;
  int scheme = 1;
  double accuracy = 0.0;
  std::size_t participants = 0;
  std::size_t successes = 0;
  double total_fees = 0.0;
  double total_rewards = 0.0;
};

struct ClientDiagnostic {
  std::uint64_t seed = 0;
  double c = 0.0;
  int scheme = 1;  // 1 covers scheme 2 as well: same local models
  std::uint64_t client_id = 0;
  std::size_t type_index = 0;
  double target_theta = 0.0;
  double measured_theta = 0.0;
  double effort = 0.0;
  double local_accuracy = 0.0;
  double server_accuracy = 0.0;
  bool passed = false;
};

struct SchemeMeans {
  double c = 0.0;
  double mean[kSchemeCount] = {0.0, 0.0, 0.0};
  bool scheme1_ge_scheme2 = false;
  bool scheme2_ge_scheme3 = false;
  bool degenerate_equal = false;  // scheme 1 and 2 identical on every seed
};

struct SchemeSummary {
  std::vector<SchemeMeans> per_c;
  bool ordering_holds = false;      // S1 ≥ S2 ≥ S3 at every c
  bool cost_direction_holds = true; // S1 at smallest c ≥ S1 at largest c
};

struct SchemeReport {
  std::vector<SchemeRow> rows;
  std::vector<ClientDiagnostic> diagnostics;
  SchemeSummary summary;
};

SchemeSummary summarize(std::span<const SchemeRow> rows, std::span<const double> c_sweep);

/// Runs every seed × c × scheme combination for one aggregation round.
SchemeReport run_scheme_comparison(const SchemeConfig& config);

}  // namespace fedcontract
