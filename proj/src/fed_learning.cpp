#include "fedcontract/fed_learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "fedcontract/errors.hpp"
#include "fedcontract/format.hpp"
#include "fedcontract/population.hpp"
#include "fedcontract/random.hpp"

namespace fedcontract {

SyntheticTask::SyntheticTask(const TaskSpec& spec)
    : spec_(spec), test_set_{PointCloud(spec.dimension == 0 ? 1 : spec.dimension), {}} {
  if (spec.dimension == 0) throw DomainError("task dimension must be positive");
  if (spec.classes < 2) throw DomainError("task needs at least two classes");
  Stream stream(spec.seed, StreamPurpose::task);
  const double offset = 2.0 * std::numbers::pi * stream.uniform();
  for (std::size_t k = 0; k < spec.classes; ++k) {
    const double angle = offset + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                      static_cast<double>(spec.classes);
    directions_.push_back(std::cos(angle));
    directions_.push_back(std::sin(angle));
  }
  std::vector<double> coords(spec.test_size * spec.dimension);
  for (double& v : coords) v = stream.uniform();
  test_set_ = label_all(PointCloud(spec.dimension, std::move(coords)));
}

std::size_t SyntheticTask::label(std::span<const double> x) const {
  if (x.size() != spec_.dimension) throw ContractError("point dimension does not match the task");
  const double x0 = x[0] - 0.5;
  const double x1 = spec_.dimension > 1 ? x[1] - 0.5 : 0.0;
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t k = 0; k < spec_.classes; ++k) {
    const double score = directions_[2 * k] * x0 + directions_[2 * k + 1] * x1;
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

LabeledCloud SyntheticTask::label_all(PointCloud points) const {
  LabeledCloud out{std::move(points), {}};
  out.labels.reserve(out.points.size());
  for (std::size_t i = 0; i < out.points.size(); ++i) out.labels.push_back(label(out.points.point(i)));
  return out;
}

ClientDataset generate_client_dataset(const SyntheticTask& task, double target_theta,
                                      std::size_t n_points, std::uint64_t seed,
                                      const CalibrationOptions& options) {
  if (!(target_theta > 0.0 && target_theta <= 1.0))
    throw DomainError("target theta " + format_double(target_theta) + " outside (0,1]");
  if (n_points == 0) throw DomainError("client dataset needs at least one point");

  const std::size_t d = task.dimension();
  std::vector<double> base(n_points * d);
  Stream stream(seed, StreamPurpose::dataset);
  for (double& v : base) v = stream.uniform();
  const std::uint64_t coverage_seed = derive_seed(seed, StreamPurpose::dataset, 1);

  auto scaled = [&](double side) {
    std::vector<double> coords(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) coords[k] = std::min(1.0, side * base[k]);
    return PointCloud(d, std::move(coords));
  };
  auto quality = [&](double side) {
    return coverage_quality(scaled(side), options.radius_steps, options.samples, coverage_seed);
  };

  const double theta_hi = quality(1.0);
  double best_side = 1.0, best_theta = theta_hi;
  auto consider = [&](double side, double theta) {
    if (std::abs(theta - target_theta) < std::abs(best_theta - target_theta)) {
      best_side = side;
      best_theta = theta;
    }
  };

  double lo = 1e-3, hi = 1.0;
  const double theta_lo = quality(lo);
  consider(lo, theta_lo);
  if (target_theta <= theta_hi && target_theta >= theta_lo) {
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      if (std::abs(best_theta - target_theta) <= options.tolerance / 4.0) break;
      const double mid = 0.5 * (lo + hi);
      const double theta = quality(mid);
      consider(mid, theta);
      (theta < target_theta ? lo : hi) = mid;
    }
  }
  if (std::abs(best_theta - target_theta) > options.tolerance)
    throw CalibrationError("cannot reach coverage quality " + format_double(target_theta) +
                               " with " + std::to_string(n_points) + " points; closest is " +
                               format_double(best_theta),
                           best_theta);

  ClientDataset out{task.label_all(scaled(best_side)), target_theta, best_theta, best_side};
  return out;
}

double server_test(const ModelVector& model, const SyntheticTask& task) {
  return accuracy(model, task.test_set());
}

std::string_view to_string(PassSource source) {
  return source == PassSource::ml ? "ml" : "analytic";
}

PassSource parse_pass_source(std::string_view text) {
  if (text == "ml") return PassSource::ml;
  if (text == "analytic") return PassSource::analytic;
  throw DomainError("unknown comparison mode '" + std::string(text) + "'");
}

namespace {

struct ClientRun {
  bool participating = false;
  double effort = 0.0;
  double fee = 0.0;
  double reward = 0.0;
  double local_accuracy = 0.0;
  double server_accuracy = 0.0;
  bool passed = false;
  ModelVector model;
};

struct SchemeInputs {
  std::vector<std::size_t> item;  // 1-based item per client, 0 = not participating
  const ContractMenu* menu;
};

// Trains and tests every participating client against its item.
std::vector<ClientRun> run_clients(const SchemeConfig& cfg, const SyntheticTask& task,
                                   const ModelVector& init,
                                   const std::vector<SampledClient>& population,
                                   const std::vector<ClientDataset>& datasets,
                                   const SchemeInputs& in, double c, std::uint64_t seed,
                                   std::size_t c_index) {
  std::vector<ClientRun> runs(population.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(population.size()); ++s) {
    const auto k = static_cast<std::size_t>(s);
    auto& run = runs[k];
    if (in.item[k] == 0) continue;
    const auto& item = in.menu->items[in.item[k] - 1];
    const double theta = population[k].type.theta;
    const std::uint64_t id = population[k].id;
    run.participating = true;
    run.fee = item.fee;
    run.reward = item.reward;
    run.effort = best_response_effort(theta, item.reward, c).effort;
    run.model = local_train(init, datasets[k].data, run.effort, cfg.training.max_epochs,
                            derive_seed(seed, StreamPurpose::training, id), cfg.training.options);
    run.local_accuracy = accuracy(run.model, datasets[k].data);
    run.server_accuracy = server_test(run.model, task);
    run.passed = cfg.pass_source == PassSource::ml
                     ? run.server_accuracy >= item.benchmark
                     : realize_success(theta, run.effort,
                                       derive_seed(derive_seed(seed, StreamPurpose::success, id),
                                                   StreamPurpose::success, c_index));
  }
  return runs;
}

SchemeRow aggregate_scheme(const std::vector<ClientRun>& runs,
                           const std::vector<SampledClient>& population, const ModelVector& init,
                           const SyntheticTask& task, bool reward_weighted) {
  SchemeRow row;
  std::vector<PassedModel> passed;
  std::vector<const ModelVector*> models;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    if (!run.participating) continue;
    ++row.participants;
    row.total_fees += run.fee;
    if (!run.passed) continue;
    ++row.successes;
    row.total_rewards += run.reward;
    passed.push_back({population[k].id, reward_weighted ? run.reward : 1.0});
    models.push_back(&run.model);
  }
  if (passed.empty()) {
    row.accuracy = server_test(init, task);
    return row;
  }
  const auto weights = aggregation_weights(passed);
  std::vector<WeightedModel> weighted;
  for (std::size_t m = 0; m < passed.size(); ++m)
    weighted.push_back({models[m], weights.at(passed[m].id)});
  row.accuracy = server_test(aggregate(weighted), task);
  return row;
}

ContractMenu flat_menu(const TypeProfile& profile, const ContractMenu& menu) {
  ContractItem flat{1, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < menu.size(); ++i) {
    flat.fee += profile[i].beta * menu.items[i].fee;
    flat.reward += profile[i].beta * menu.items[i].reward;
    flat.benchmark += profile[i].beta * menu.items[i].benchmark;
  }
  return ContractMenu{{flat}};
}

}  // namespace

SchemeSummary summarize(std::span<const SchemeRow> rows, std::span<const double> c_sweep) {
  SchemeSummary summary;
  summary.ordering_holds = !c_sweep.empty();
  for (double c : c_sweep) {
    SchemeMeans means;
    means.c = c;
    std::size_t counts[kSchemeCount] = {0, 0, 0};
    std::map<std::uint64_t, double> s1, s2;
    for (const auto& r : rows) {
      if (r.c != c || r.scheme < 1 || r.scheme > kSchemeCount) continue;
      means.mean[r.scheme - 1] += r.accuracy;
      ++counts[r.scheme - 1];
      if (r.scheme == 1) s1[r.seed] = r.accuracy;
      if (r.scheme == 2) s2[r.seed] = r.accuracy;
    }
    for (int s = 0; s < kSchemeCount; ++s)
      if (counts[s]) means.mean[s] /= static_cast<double>(counts[s]);
    means.scheme1_ge_scheme2 = means.mean[0] >= means.mean[1];
    means.scheme2_ge_scheme3 = means.mean[1] >= means.mean[2];
    means.degenerate_equal = !s1.empty() && s1 == s2;
    summary.ordering_holds =
        summary.ordering_holds && means.scheme1_ge_scheme2 && means.scheme2_ge_scheme3;
    summary.per_c.push_back(means);
  }
  if (summary.per_c.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(
        summary.per_c.begin(), summary.per_c.end(),
        [](const SchemeMeans& a, const SchemeMeans& b) { return a.c < b.c; });
    summary.cost_direction_holds = lo->mean[0] >= hi->mean[0];
  }
  return summary;
}

SchemeReport run_scheme_comparison(const SchemeConfig& cfg) {
  cfg.profile.validate();
  if (cfg.benchmarks.size() != cfg.profile.size())
    throw ContractError("benchmark list length mismatch");
  if (cfg.seeds.empty() || cfg.c_sweep.empty())
    throw DomainError("scheme comparison needs at least one seed and one c value");
  for (double c : cfg.c_sweep)
    if (!(c > 0.0)) throw DomainError("c values must be positive");

  const SyntheticTask task(cfg.task);
  const ModelVector init =
      cfg.task.hidden.empty() ? ModelVector::zeros(task.architecture())
                              : ModelVector::random(task.architecture(), cfg.task.seed, 0.1);
  SchemeReport report;

  for (std::uint64_t seed : cfg.seeds) {
    const auto population = sample_population(cfg.profile, cfg.population, seed);
    std::vector<ClientDataset> datasets;
    datasets.reserve(population.size());
    for (std::size_t k = 0; k < population.size(); ++k)
      datasets.push_back(generate_client_dataset(
          task, population[k].type.theta, cfg.training.points_per_client,
          derive_seed(seed, StreamPurpose::dataset, population[k].id), cfg.calibration));

    for (std::size_t ci = 0; ci < cfg.c_sweep.size(); ++ci) {
      const double c = cfg.c_sweep[ci];
      const auto profile = cfg.profile.with_unit_cost(c);
      const auto menu = solve_contract(profile, cfg.curve, cfg.benchmarks);

      SchemeInputs contract_in{std::vector<std::size_t>(population.size(), 0), &menu};
      for (std::size_t k = 0; k < population.size(); ++k) {
        const auto choice = choose_contract(population[k].type.theta, menu, c, cfg.tolerance);
        if (!choice.rejected()) contract_in.item[k] = *choice.item;
      }
      const auto flat = flat_menu(profile, menu);
      SchemeInputs flat_in{contract_in.item, &flat};
      for (auto& item : flat_in.item) item = item ? 1 : 0;

      const auto contract_runs =
          run_clients(cfg, task, init, population, datasets, contract_in, c, seed, ci);
      const auto flat_runs = run_clients(cfg, task, init, population, datasets, flat_in, c, seed, ci);

      const std::vector<ClientRun>* per_scheme[kSchemeCount] = {&contract_runs, &contract_runs,
                                                                &flat_runs};
      for (int s = 0; s < kSchemeCount; ++s) {
        auto row = aggregate_scheme(*per_scheme[s], population, init, task, s == 0);
        row.seed = seed;
        row.c = c;
        row.scheme = s + 1;
        report.rows.push_back(row);
      }
      for (int s : {0, 2}) {
        const auto& runs = *per_scheme[s];
        for (std::size_t k = 0; k < runs.size(); ++k) {
          if (!runs[k].participating) continue;
          report.diagnostics.push_back({seed, c, s + 1, population[k].id,
                                        population[k].type.index, datasets[k].target_theta,
                                        datasets[k].measured_theta, runs[k].effort,
                                        runs[k].local_accuracy, runs[k].server_accuracy,
                                        runs[k].passed});
        }
      }
    }
  }
  report.summary = summarize(report.rows, cfg.c_sweep);
  return report;
}

}  // namespace fedcontract
