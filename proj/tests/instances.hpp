#pragma once

// Random contract instances shared by the unit and acceptance suites.

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedcontract/contract.hpp"
#include "fedcontract/grid_search.hpp"
#include "fedcontract/random.hpp"

namespace fedcontract::testing {

struct Instance {
  TypeProfile profile;
  RevenueCurve curve;
  std::vector<double> benchmarks;
};

inline std::vector<double> sorted_uniform(Stream& s, std::size_t n, double lo, double hi) {
  std::vector<double> xs(n);
  for (auto& x : xs) x = lo + (hi - lo) * s.uniform();
  std::sort(xs.begin(), xs.end());
  return xs;
}

inline std::vector<double> random_betas(Stream& s, std::size_t n) {
  std::vector<double> b(n);
  double total = 0.0;
  for (auto& x : b) total += x = 0.05 + s.uniform();
  for (auto& x : b) x /= total;
  return b;
}

/// I types with strictly increasing thetas in (0,1], c in [c_lo, c_hi], and a
/// convex increasing curve: exponential or a random convex table.
inline Instance random_instance(std::uint64_t seed, std::size_t types, double c_lo = 0.1,
                                double c_hi = 10.0) {
  Stream s(seed);
  std::vector<double> thetas;
  do {
    thetas = sorted_uniform(s, types, 0.01, 1.0);
  } while (std::adjacent_find(thetas.begin(), thetas.end()) != thetas.end());
  const auto betas = random_betas(s, types);
  const double c = c_lo + (c_hi - c_lo) * s.uniform();
  const auto benchmarks = sorted_uniform(s, types, 0.0, 1.0);

  if (s.uniform() < 0.5) {
    const double a = 0.2 + 1.8 * s.uniform();
    const double b = 0.5 + 2.5 * s.uniform();
    return {TypeProfile::from_lists(thetas, betas, c), RevenueCurve::exponential(a, b), benchmarks};
  }
  // Convex table on a fixed knot grid: positive, non-decreasing slopes.
  std::vector<RevenueCurve::Knot> knots;
  double g = 0.1 + s.uniform(), slope = 0.1 + s.uniform();
  for (int k = 0; k <= 10; ++k) {
    knots.emplace_back(k / 10.0, g);
    slope += 0.5 * s.uniform();
    g += slope / 10.0;
  }
  return {TypeProfile::from_lists(thetas, betas, c), RevenueCurve::table(std::move(knots)), benchmarks};
}

struct TenTypes {
  std::vector<double> theta, effort, benchmark;
  std::vector<double> data_size;
  double beta;
};

inline TenTypes load_ten_types() {
  std::ifstream in(std::string(FEDCONTRACT_FIXTURES) + "/ten_types.json");
  const auto j = nlohmann::json::parse(in);
  return {j.at("theta").get<std::vector<double>>(), j.at("optimal_effort").get<std::vector<double>>(),
          j.at("benchmark").get<std::vector<double>>(), j.at("data_size").get<std::vector<double>>(),
          j.at("beta").get<double>()};
}

/// Profile and revenue table implied by the fixture at unit cost c = 1:
/// G(M_i) = R_i = e_i / θ_i.
inline Instance ten_type_instance() {
  const auto t = load_ten_types();
  std::vector<RevenueCurve::Knot> knots;
  for (std::size_t i = 0; i < t.theta.size(); ++i)
    knots.emplace_back(t.benchmark[i], t.effort[i] / t.theta[i]);
  return {TypeProfile::from_lists(t.theta, std::vector<double>(t.theta.size(), t.beta), 1.0),
          RevenueCurve::table(std::move(knots)), t.benchmark};
}

/// Grid covering [0, 1.25·max] of the closed-form fees and rewards with
/// `points` values per variable, plus the objective slack of two grid steps:
/// each step moves the objective by at most β_i in f_i and by
/// β_i θ_i² (G_i + 2 R_max) / c in R_i.
struct OracleGrid {
  GridSpec grid;
  double slack;
};

inline OracleGrid oracle_grid(const Instance& inst, const ContractMenu& closed_form,
                              std::size_t points = 101) {
  double f_max = 0.0, r_max = 0.0;
  for (const auto& item : closed_form.items) {
    f_max = std::max(f_max, item.fee);
    r_max = std::max(r_max, item.reward);
  }
  const GridAxis fee{0.0, 1.25 * f_max, points}, reward{0.0, 1.25 * r_max, points};
  double per_f = 0.0, per_r = 0.0;
  const double c = inst.profile.unit_cost();
  for (std::size_t i = 0; i < inst.profile.size(); ++i) {
    const auto& t = inst.profile[i];
    per_f += t.beta;
    per_r += t.beta * t.theta * t.theta * (inst.curve(inst.benchmarks[i]) + 2.0 * reward.hi) / c;
  }
  return {GridSpec::uniform(inst.profile.size(), fee, reward),
          2.0 * (fee.step() * per_f + reward.step() * per_r)};
}

}  // namespace fedcontract::testing
