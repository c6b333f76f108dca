#include "fedcontract/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedcontract/errors.hpp"
#include "fedcontract/random.hpp"

namespace fedcontract {

ContractChoice choose_contract(double theta, const ContractMenu& menu, double unit_cost,
                               double tolerance) {
  if (!(unit_cost > 0.0)) throw DomainError("unit cost c must be positive");
  ContractChoice choice;
  if (menu.items.empty()) return choice;

  std::vector<double> values(menu.size());
  for (std::size_t j = 0; j < menu.size(); ++j)
    values[j] = client_utility_at_best_response(theta, menu.items[j], unit_cost);
  const double best = *std::max_element(values.begin(), values.end());
  if (best < -tolerance) {
    choice.utility = best;
    return choice;
  }
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] >= best - tolerance) choice.maximizers.push_back(j + 1);

  std::size_t pick = choice.maximizers.back() - 1;
  for (std::size_t j = 0; j < pick; ++j) {
    const auto& a = menu.items[j];
    const auto& b = menu.items[pick];
    if (a.fee == b.fee && a.reward == b.reward && a.benchmark == b.benchmark) {
      pick = j;
      break;
    }
  }
  choice.item = pick + 1;
  choice.utility = values[pick];
  choice.effort = best_response_effort(theta, menu.items[pick].reward, unit_cost).effort;
  return choice;
}

std::vector<SampledClient> sample_population(const TypeProfile& profile, std::size_t n,
                                             std::uint64_t seed) {
  if (n == 0) throw DomainError("population size must be positive");
  if (profile.size() == 0) throw DomainError("type profile is empty");
  std::vector<double> cumulative(profile.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) cumulative[i] = acc += profile[i].beta;
  if (!(acc > 0.0)) throw DomainError("type probabilities sum to zero");

  std::vector<SampledClient> clients(n);
  for (std::size_t k = 0; k < n; ++k) {
    Stream stream(seed, StreamPurpose::population, k);
    const double u = stream.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    clients[k] = {k, profile[static_cast<std::size_t>(it - cumulative.begin())]};
  }
  return clients;
}

double success_probability(double theta, double effort) {
  return std::clamp(theta * effort, 0.0, 1.0);
}

bool realize_success(double theta, double effort, std::uint64_t seed) {
  if (effort < 0.0 || effort > 1.0) throw DomainError("effort outside [0,1]");
  Stream stream(seed);
  return stream.uniform() < success_probability(theta, effort);
}

std::map<std::uint64_t, double> aggregation_weights(std::span<const PassedModel> passed) {
  std::map<std::uint64_t, double> weights;
  if (passed.empty()) return weights;
  const bool all_equal = std::all_of(passed.begin(), passed.end(),
                                     [&](const PassedModel& m) { return m.reward == passed[0].reward; });
  if (all_equal) {
    const double w = 1.0 / static_cast<double>(passed.size());
    for (const auto& m : passed) weights[m.id] = w;
    return weights;
  }
  double total = 0.0;
  for (const auto& m : passed) total += m.reward;
  for (const auto& m : passed) weights[m.id] = m.reward / total;
  return weights;
}

std::string_view to_string(RoundMode mode) {
  return mode == RoundMode::analytic ? "analytic" : "stochastic";
}

RoundMode parse_round_mode(std::string_view text) {
  if (text == "analytic") return RoundMode::analytic;
  if (text == "stochastic") return RoundMode::stochastic;
  throw DomainError("unknown round mode '" + std::string(text) + "'");
}

RoundOutcome run_round(const TypeProfile& profile, const ContractMenu& menu,
                       const RevenueCurve& curve, std::size_t n, RoundMode mode,
                       std::uint64_t seed, double tolerance) {
  detail::check_lengths(profile, menu);
  RoundOutcome out;
  out.mode = mode;
  out.menu_feasible = verify_feasibility(profile, menu, tolerance).feasible;

  const auto population = sample_population(profile, n, seed);
  const double c = profile.unit_cost();
  std::vector<double> revenue(menu.size());
  for (std::size_t j = 0; j < menu.size(); ++j) revenue[j] = curve(menu.items[j].benchmark);

  out.clients.resize(n);
  std::vector<std::vector<std::size_t>> tie_items(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
    const auto& sampled = population[static_cast<std::size_t>(k)];
    auto& client = out.clients[static_cast<std::size_t>(k)];
    client.id = sampled.id;
    client.true_type = sampled.type;
    const auto choice = choose_contract(sampled.type.theta, menu, c, tolerance);
    if (choice.rejected()) continue;
    const auto& item = menu.items[*choice.item - 1];
    client.choice = choice.item;
    client.effort = choice.effort;
    client.fee = item.fee;
    client.reward = item.reward;
    client.success_probability = success_probability(sampled.type.theta, choice.effort);
    client.tied = choice.tied();
    if (client.tied) tie_items[static_cast<std::size_t>(k)] = choice.maximizers;
    if (mode == RoundMode::stochastic)
      client.succeeded = realize_success(
          sampled.type.theta, choice.effort,
          derive_seed(seed, StreamPurpose::success, sampled.id));
  }

  // Ledger in client-id order.
  std::vector<PassedModel> passed;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& client = out.clients[k];
    if (!client.choice) continue;
    const std::size_t j = *client.choice - 1;
    const double margin = revenue[j] - client.reward;
    out.fees_collected += client.fee;
    if (mode == RoundMode::stochastic) {
      if (client.succeeded) {
        out.rewards_paid += client.reward;
        out.realized_server_utility += margin;
        passed.push_back({client.id, client.reward});
      } else {
        out.fees_forfeited += client.fee;
      }
    } else {
      const double p = client.success_probability;
      out.rewards_paid += p * client.reward;
      out.fees_forfeited += (1.0 - p) * client.fee;
      out.realized_server_utility += p * margin;
      if (p > 0.0) passed.push_back({client.id, p * client.reward});
    }
    if (client.tied) out.ties.push_back({client.id, client.true_type.index, tie_items[k]});
  }
  out.realized_server_utility += out.fees_collected;
  out.aggregation_weights = aggregation_weights(passed);
  return out;
}

}  // namespace fedcontract
