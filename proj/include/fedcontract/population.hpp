#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedcontract/contract.hpp"

namespace fedcontract {

/// Outcome of a client's self-selection. `item` is the 1-based menu index,
/// empty for REJECT.
struct ContractChoice {
  std::optional<std::size_t> item;
  double effort = 0.0;
  double utility = 0.0;
  /// Every 1-based item whose envelope utility is within tolerance of the
  /// maximum; more than one entry means the choice was a tie.
  std::vector<std::size_t> maximizers;

  bool rejected() const noexcept { return !item.has_value(); }
  bool tied() const noexcept { return maximizers.size() > 1; }
};

/// Best response over the menu by envelope utility (θR_j)²/2c − f_j.
/// REJECT when the best value is below −tolerance. Among near-equal maximizers
/// the highest index is taken, then collapsed to the lowest index of an item
/// identical to it in (f, R, M). Effort is clamp(θR/c, 0, 1).
ContractChoice choose_contract(double theta, const ContractMenu& menu, double unit_cost,
                               double tolerance = kDefaultTolerance);

struct SampledClient {
  std::uint64_t id = 0;
  ClientType type;
};

/// n independent categorical draws from the profile's β; client k's draw
/// depends only on (seed, k).
std::vector<SampledClient> sample_population(const TypeProfile& profile, std::size_t n,
                                             std::uint64_t seed);

/// min(1, θ·e), floored at 0.
double success_probability(double theta, double effort);

/// Bernoulli(min(1, θ·e)) drawn from `seed`.
bool realize_success(double theta, double effort, std::uint64_t seed);

struct PassedModel {
  std::uint64_t id = 0;
  double reward = 0.0;
};

/// w = R / ΣR over the passed models. Exactly 1/n when every reward is equal
/// (including all zero); empty input gives an empty map.
std::map<std::uint64_t, double> aggregation_weights(std::span<const PassedModel> passed);

enum class RoundMode { analytic, stochastic };
std::string_view to_string(RoundMode mode);
RoundMode parse_round_mode(std::string_view text);

struct SimulatedClient {
  std::uint64_t id = 0;
  ClientType true_type;
  std::optional<std::size_t> choice;  // 1-based item, empty = REJECT
  double effort = 0.0;
  double success_probability = 0.0;
  bool succeeded = false;  // realized; always false in analytic mode
  double fee = 0.0;        // fee paid, 0 on REJECT
  double reward = 0.0;     // reward of the chosen item, paid only on success
  bool tied = false;
};

struct TieEvent {
  std::uint64_t client_id = 0;
  std::size_t type_index = 0;
  std::vector<std::size_t> items;
};

/// One round's ledger. In stochastic mode the money fields are realized
/// sums; in analytic mode they are expectations over success (rewards
/// weighted by success probability, forfeits by failure probability).
struct RoundOutcome {
  RoundMode mode = RoundMode::stochastic;
  std::vector<SimulatedClient> clients;
  double fees_collected = 0.0;
  double rewards_paid = 0.0;
  double fees_forfeited = 0.0;
  double realized_server_utility = 0.0;
  std::map<std::uint64_t, double> aggregation_weights;
  std::vector<TieEvent> ties;
  bool menu_feasible = true;
};

/// sample_population → choose_contract → success → ledger → weights.
/// Analytic mode credits each accepting client f + p·(G(M) − R) with
/// p = success_probability and weights models by p·R.
RoundOutcome run_round(const TypeProfile& profile, const ContractMenu& menu,
                       const RevenueCurve& curve, std::size_t n, RoundMode mode,
                       std::uint64_t seed, double tolerance = kDefaultTolerance);

}  // namespace fedcontract
