#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fedcontract/errors.hpp"
#include "fedcontract/population.hpp"
#include "fedcontract/random.hpp"
#include "instances.hpp"

using namespace fedcontract;

namespace {

const ContractMenu kCanonical{{{1, 0.125, 1.0, 0.2}, {2, 1.625, 2.0, 0.4}}};

TypeProfile canonical_profile() {
  return TypeProfile::from_lists(std::vector{0.5, 1.0}, std::vector{0.5, 0.5}, 1.0);
}

RevenueCurve canonical_curve() { return RevenueCurve::table({{0.2, 1.0}, {0.4, 2.0}}); }

}  // namespace

TEST_CASE("choose_contract examples") {
  const auto low = choose_contract(0.5, kCanonical, 1.0);
  CHECK(low.item == 1u);
  CHECK(low.effort == 0.5);
  CHECK(low.utility == 0.0);
  CHECK_FALSE(low.tied());

  // Both items give 0.375: the tight-IC tie goes to the higher item.
  const auto high = choose_contract(1.0, kCanonical, 1.0);
  CHECK(high.item == 2u);
  CHECK(high.effort == 1.0);
  CHECK(high.utility == 0.375);
  CHECK(high.tied());
  CHECK(high.maximizers == std::vector<std::size_t>{1, 2});

  const auto reject = choose_contract(0.1, kCanonical, 1.0);
  CHECK(reject.rejected());
  CHECK(reject.utility == doctest::Approx(0.005 - 0.125));
  CHECK(reject.effort == 0.0);

  CHECK_THROWS_AS(choose_contract(0.5, kCanonical, 0.0), DomainError);
}

TEST_CASE("identical items collapse to the lowest index") {
  const ContractMenu zeros{{{1, 0, 0, 0}, {2, 0, 0, 0}, {3, 0, 0, 0}}};
  const auto pick = choose_contract(0.7, zeros, 1.0);
  CHECK(pick.item == 1u);
  CHECK(pick.effort == 0.0);
  CHECK(pick.utility == 0.0);

  // Pooled top pair: type 3 is indifferent between items 2 and 3.
  const ContractMenu pooled{{{1, 0.0, 1.0, 0.1}, {2, 0.5, 2.0, 0.3}, {3, 0.5, 2.0, 0.3}}};
  CHECK(choose_contract(0.9, pooled, 1.0).item == 2u);
}

TEST_CASE("sample_population") {
  const auto degenerate = TypeProfile::from_lists(std::vector{0.2, 0.5, 0.9}, std::vector{1.0, 0.0, 0.0}, 1.0);
  for (const auto& client : sample_population(degenerate, 100, 3)) CHECK(client.type.index == 1u);

  const auto one = sample_population(degenerate, 1, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == 0u);

  std::vector<double> thetas(10), betas(10, 0.1);
  for (std::size_t i = 0; i < 10; ++i) thetas[i] = 0.1 * double(i + 1);
  const auto uniform = TypeProfile::from_lists(thetas, betas, 1.0);
  const auto clients = sample_population(uniform, 100000, 11);
  std::vector<double> freq(10, 0.0);
  for (const auto& c : clients) freq[c.type.index - 1] += 1.0 / 1e5;
  double chi2 = 0.0;
  for (double f : freq) {
    CHECK(std::abs(f - 0.1) <= 0.01);
    chi2 += std::pow(f * 1e5 - 1e4, 2) / 1e4;
  }
  CHECK(chi2 < 27.9);  // 9 degrees of freedom, p = 0.001

  // Client k's draw does not depend on n.
  const auto prefix = sample_population(uniform, 50, 11);
  for (std::size_t k = 0; k < 50; ++k) CHECK(prefix[k].type.index == clients[k].type.index);
  CHECK_THROWS_AS(sample_population(uniform, 0, 1), DomainError);
}

TEST_CASE("realize_success") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    CHECK_FALSE(realize_success(0.0, 0.7, s));
    CHECK(realize_success(1.0, 1.0, s));
    CHECK(realize_success(0.6, 0.3, s) == realize_success(0.6, 0.3, s));
  }
  int hits = 0;
  for (std::uint64_t s = 0; s < 100000; ++s) hits += realize_success(0.8, 0.5, s);
  CHECK(std::abs(hits / 1e5 - 0.40) <= 0.005);
  CHECK_THROWS_AS(realize_success(0.5, 1.5, 0), DomainError);
}

TEST_CASE("aggregation_weights") {
  const std::vector<PassedModel> single{{7, 5.0}};
  CHECK(aggregation_weights(single).at(7) == 1.0);

  const std::vector<PassedModel> three{{1, 1.0}, {2, 2.0}, {3, 2.0}};
  const auto w = aggregation_weights(three);
  CHECK(w.at(1) == doctest::Approx(0.2));
  CHECK(w.at(2) == doctest::Approx(0.4));
  CHECK(w.at(3) == doctest::Approx(0.4));

  CHECK(aggregation_weights({}).empty());

  const std::vector<PassedModel> zero{{1, 0.0}, {2, 0.0}, {4, 0.0}};
  for (const auto& [id, weight] : aggregation_weights(zero)) CHECK(weight == 1.0 / 3.0);

  Stream s(9);
  std::vector<PassedModel> many;
  for (std::uint64_t k = 0; k < 100; ++k) many.push_back({k, s.uniform()});
  double total = 0.0;
  for (const auto& [id, weight] : aggregation_weights(many)) {
    CHECK(weight >= 0.0);
    total += weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run_round: single degenerate type in analytic mode") {
  const auto p = TypeProfile::from_lists(std::vector{0.6}, std::vector{1.0}, 1.0);
  const auto curve = RevenueCurve::table({{0.0, 1.0}, {1.0, 2.0}});
  const ContractMenu m{{{1, 0.1, 1.2, 0.5}}};
  const auto r = run_round(p, m, curve, 1, RoundMode::analytic, 4);
  const double e = 0.6 * 1.2;
  CHECK(r.realized_server_utility == doctest::Approx(0.1 + 0.6 * e * (1.5 - 1.2)).epsilon(1e-14));
  REQUIRE(r.clients.size() == 1);
  CHECK_FALSE(r.clients[0].succeeded);
  CHECK(r.aggregation_weights.at(0) == 1.0);
}

TEST_CASE("run_round: all-zero menu") {
  const auto inst = testing::random_instance(3, 4);
  ContractMenu zeros;
  for (std::size_t i = 0; i < 4; ++i) zeros.items.push_back({i + 1, 0.0, 0.0, 0.0});
  for (auto mode : {RoundMode::analytic, RoundMode::stochastic}) {
    const auto r = run_round(inst.profile, zeros, inst.curve, 200, mode, 1);
    for (const auto& c : r.clients) {
      CHECK(c.choice == 1u);
      CHECK(c.effort == 0.0);
      CHECK_FALSE(c.succeeded);
    }
    CHECK(r.fees_collected == 0.0);
    CHECK(r.rewards_paid == 0.0);
    CHECK(r.fees_forfeited == 0.0);
    CHECK(r.realized_server_utility == 0.0);
    CHECK(r.aggregation_weights.empty());
    CHECK(r.menu_feasible);
  }
}

TEST_CASE("run_round: canonical instance converges to the clamped expectation") {
  const auto p = canonical_profile();
  const double expected = server_expected_utility_clamped(p, kCanonical, canonical_curve());
  CHECK(expected == doctest::Approx(0.875));
  const auto r = run_round(p, kCanonical, canonical_curve(), 10000, RoundMode::analytic, 2);
  CHECK(std::abs(r.realized_server_utility / 1e4 - expected) <= 0.01 * expected);
  // Every type-2 client sits on the tight-IC boundary.
  for (const auto& t : r.ties) {
    CHECK(t.type_index == 2u);
    CHECK(t.items == std::vector<std::size_t>{1, 2});
  }
}

TEST_CASE("run_round: ledger identities and determinism") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = testing::random_instance(seed, 2 + seed % 8);
    const auto menu = solve_contract(inst.profile, inst.curve, inst.benchmarks);
    const auto mode = seed % 2 ? RoundMode::stochastic : RoundMode::analytic;
    const auto r = run_round(inst.profile, menu, inst.curve, 500, mode, seed);
    CHECK(r.menu_feasible);

    double fees = 0.0, margin = 0.0, paid = 0.0, forfeited = 0.0;
    std::vector<PassedModel> passed;
    for (const auto& c : r.clients) {
      // Truthful apart from logged boundary ties.
      if (!c.tied) CHECK(c.choice == c.true_type.index);
      if (!c.choice) continue;
      const auto& item = menu.items[*c.choice - 1];
      fees += item.fee;
      const double w = mode == RoundMode::analytic ? c.success_probability : (c.succeeded ? 1.0 : 0.0);
      margin += w * (inst.curve(item.benchmark) - item.reward);
      paid += w * item.reward;
      forfeited += (1.0 - w) * item.fee;
      if (w > 0.0) passed.push_back({c.id, w * item.reward});
      if (mode == RoundMode::analytic) CHECK_FALSE(c.succeeded);
    }
    CHECK(r.fees_collected == doctest::Approx(fees).epsilon(1e-12));
    CHECK(r.rewards_paid == doctest::Approx(paid).epsilon(1e-12));
    CHECK(r.fees_forfeited == doctest::Approx(forfeited).epsilon(1e-12));
    CHECK(r.realized_server_utility == doctest::Approx(fees + margin).epsilon(1e-12));
    CHECK(r.aggregation_weights == aggregation_weights(passed));

    const auto again = run_round(inst.profile, menu, inst.curve, 500, mode, seed);
    CHECK(again.realized_server_utility == r.realized_server_utility);
    CHECK(again.aggregation_weights == r.aggregation_weights);
    CHECK(again.ties.size() == r.ties.size());
    for (std::size_t k = 0; k < r.clients.size(); ++k) {
      CHECK(again.clients[k].choice == r.clients[k].choice);
      CHECK(again.clients[k].succeeded == r.clients[k].succeeded);
    }
  }
}

TEST_CASE("run_round flags an infeasible menu") {
  auto menu = kCanonical;
  menu.items[1].fee += 1.0;
  CHECK_FALSE(run_round(canonical_profile(), menu, canonical_curve(), 10, RoundMode::analytic, 1).menu_feasible);
}

TEST_CASE("round mode names") {
  CHECK(parse_round_mode("analytic") == RoundMode::analytic);
  CHECK(to_string(RoundMode::stochastic) == "stochastic");
  CHECK_THROWS_AS(parse_round_mode("ml"), DomainError);
}
