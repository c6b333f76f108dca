#include "fedcontract/contract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedcontract/errors.hpp"
#include "fedcontract/format.hpp"

namespace fedcontract {

TypeProfile::TypeProfile(std::vector<ClientType> types, double unit_cost)
    : types_(std::move(types)), unit_cost_(unit_cost) {
  if (!(unit_cost_ > 0.0)) throw DomainError("unit cost c must be positive");
  for (std::size_t pos = 0; pos < types_.size(); ++pos) {
    const auto& t = types_[pos];
    if (t.index != pos + 1) throw DomainError("client type indices must run 1..I in order");
    if (!(t.theta > 0.0 && t.theta <= 1.0))
      throw DomainError("theta " + format_double(t.theta) + " outside (0,1]");
    if (!(t.beta >= 0.0 && t.beta <= 1.0))
      throw DomainError("beta " + format_double(t.beta) + " outside [0,1]");
  }
}

TypeProfile TypeProfile::from_lists(std::span<const double> thetas, std::span<const double> betas,
                                    double unit_cost) {
  if (thetas.size() != betas.size()) throw ContractError("theta and beta lists differ in length");
  std::vector<ClientType> types;
  types.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) types.push_back({i + 1, thetas[i], betas[i]});
  return TypeProfile(std::move(types), unit_cost);
}

TypeProfile TypeProfile::with_unit_cost(double unit_cost) const {
  return TypeProfile(types_, unit_cost);
}

bool TypeProfile::thetas_strictly_increasing() const noexcept {
  for (std::size_t i = 1; i < types_.size(); ++i)
    if (!(types_[i].theta > types_[i - 1].theta)) return false;
  return true;
}

double TypeProfile::beta_sum() const noexcept {
  double s = 0.0;
  for (const auto& t : types_) s += t.beta;
  return s;
}

void TypeProfile::validate(double beta_tolerance) const {
  if (types_.empty()) throw DomainError("type profile is empty");
  if (!thetas_strictly_increasing()) throw DomainError("thetas must be strictly increasing");
  if (std::abs(beta_sum() - 1.0) > beta_tolerance)
    throw DomainError("betas sum to " + format_double(beta_sum()) + ", expected 1");
}

RevenueCurve RevenueCurve::exponential(double scale, double rate) {
  if (!(scale > 0.0 && rate > 0.0))
    throw DomainError("exponential revenue curve needs a > 0 and b > 0");
  return RevenueCurve(Exponential{scale, rate});
}

RevenueCurve RevenueCurve::table(std::vector<Knot> knots) {
  std::sort(knots.begin(), knots.end());
  if (knots.empty()) throw DomainError("revenue table is empty");
  double prev_slope = 0.0;
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double dm = knots[k].first - knots[k - 1].first;
    if (!(dm > 0.0)) throw DomainError("revenue table has duplicate benchmarks");
    const double slope = (knots[k].second - knots[k - 1].second) / dm;
    if (!(slope > 0.0)) throw DomainError("revenue table is not increasing");
    if (k > 1 && slope < prev_slope) throw DomainError("revenue table is not convex");
    prev_slope = slope;
  }
  return RevenueCurve(std::move(knots));
}

double RevenueCurve::operator()(double benchmark) const {
  if (const auto* e = std::get_if<Exponential>(&form_))
    return e->scale * std::exp(e->rate * benchmark);

  const auto& k = std::get<std::vector<Knot>>(form_);
  auto it = std::lower_bound(k.begin(), k.end(), benchmark,
                             [](const Knot& knot, double m) { return knot.first < m; });
  if (it != k.end() && it->first == benchmark) return it->second;
  if (it == k.begin() || it == k.end())
    throw DomainError("benchmark " + format_double(benchmark) + " outside the revenue table");
  const auto& [m1, g1] = *it;
  const auto& [m0, g0] = *(it - 1);
  return g0 + (g1 - g0) * (benchmark - m0) / (m1 - m0);
}

std::vector<double> RevenueCurve::evaluate(std::span<const double> benchmarks) const {
  std::vector<double> out;
  out.reserve(benchmarks.size());
  for (double m : benchmarks) out.push_back((*this)(m));
  return out;
}

bool RevenueCurve::increasing_convex_on(std::span<const double> benchmarks) const {
  std::vector<double> ms(benchmarks.begin(), benchmarks.end());
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  double prev_slope = -1.0;
  for (std::size_t k = 1; k < ms.size(); ++k) {
    const double slope = ((*this)(ms[k]) - (*this)(ms[k - 1])) / (ms[k] - ms[k - 1]);
    if (!(slope > 0.0)) return false;
    // Chords inside one linear piece agree only up to rounding.
    if (k > 1 && slope < prev_slope - 1e-9 * std::max(1.0, std::abs(prev_slope))) return false;
    prev_slope = slope;
  }
  return true;
}

EffortResponse best_response_effort(double theta, double reward, double unit_cost) {
  if (!(unit_cost > 0.0)) throw DomainError("unit cost c must be positive");
  if (theta < 0.0 || reward < 0.0) throw DomainError("theta and reward must be non-negative");
  const double raw = theta * reward / unit_cost;
  return {std::clamp(raw, 0.0, 1.0), raw};
}

double client_utility(double theta, double effort, const ContractItem& item, double unit_cost) {
  return theta * effort * item.reward - item.fee - unit_cost / 2.0 * effort * effort;
}

double client_utility_at_best_response(double theta, const ContractItem& item, double unit_cost) {
  if (!(unit_cost > 0.0)) throw DomainError("unit cost c must be positive");
  return detail::envelope(theta, item.reward, unit_cost) - item.fee;
}

void detail::check_lengths(const TypeProfile& profile, const ContractMenu& menu) {
  if (profile.size() != menu.size())
    throw ContractError("menu has " + std::to_string(menu.size()) + " items but the profile has " +
                        std::to_string(profile.size()) + " types");
}

double server_expected_utility(const TypeProfile& profile, const ContractMenu& menu,
                               const RevenueCurve& curve) {
  detail::check_lengths(profile, menu);
  const double c = profile.unit_cost();
  double total = 0.0;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    const auto& item = menu.items[i];
    total += detail::server_summand(profile[i].beta, profile[i].theta, item.fee, item.reward,
                                    curve(item.benchmark), c);
  }
  return total;
}

double server_expected_utility_clamped(const TypeProfile& profile, const ContractMenu& menu,
                                       const RevenueCurve& curve) {
  detail::check_lengths(profile, menu);
  const double c = profile.unit_cost();
  double total = 0.0;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    const auto& item = menu.items[i];
    const double theta = profile[i].theta;
    const double effort = best_response_effort(theta, item.reward, c).effort;
    total += profile[i].beta * (item.fee + theta * effort * (curve(item.benchmark) - item.reward));
  }
  return total;
}

std::vector<double> fee_recursion(const TypeProfile& profile, std::span<const double> rewards) {
  if (rewards.size() != profile.size()) throw ContractError("reward list length mismatch");
  const double c = profile.unit_cost();
  std::vector<double> fees(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double theta = profile[i].theta;
    fees[i] = i == 0 ? detail::envelope(theta, rewards[0], c)
                     : detail::envelope(theta, rewards[i], c) -
                           detail::envelope(theta, rewards[i - 1], c) + fees[i - 1];
  }
  return fees;
}

ContractMenu closed_form_contract(const TypeProfile& profile, const RevenueCurve& curve,
                                  std::span<const double> benchmarks) {
  if (benchmarks.size() != profile.size()) throw ContractError("benchmark list length mismatch");
  if (!profile.thetas_strictly_increasing())
    throw DomainError("closed-form contract needs strictly increasing thetas");
  if (!curve.increasing_convex_on(benchmarks))
    throw DomainError("revenue curve is not increasing and convex on the benchmarks");

  const auto rewards = curve.evaluate(benchmarks);
  const auto fees = fee_recursion(profile, rewards);
  ContractMenu menu;
  for (std::size_t i = 0; i < rewards.size(); ++i)
    menu.items.push_back({i + 1, fees[i], rewards[i], benchmarks[i]});
  return menu;
}

ContractMenu solve_contract(const TypeProfile& profile, const RevenueCurve& curve,
                                  std::span<const double> benchmarks) {
  return enforce_monotonicity(closed_form_contract(profile, curve, benchmarks), profile);
}

ContractMenu enforce_monotonicity(const ContractMenu& menu, const TypeProfile& profile) {
  detail::check_lengths(profile, menu);
  const auto& items = menu.items;
  const bool monotone = std::is_sorted(items.begin(), items.end(),
                                       [](const auto& a, const auto& b) { return a.reward < b.reward; });
  if (monotone) return menu;

  // Pool-adjacent-violators with β weights; an all-zero-weight block falls
  // back to the plain mean.
  struct Block {
    double weight, weighted_sum, sum;
    std::size_t count;
    double mean() const { return weight > 0.0 ? weighted_sum / weight : sum / double(count); }
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double b = profile[i].beta;
    const double r = items[i].reward;
    blocks.push_back({b, b * r, r, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      auto& below = blocks.back();
      below.weight += top.weight;
      below.weighted_sum += top.weighted_sum;
      below.sum += top.sum;
      below.count += top.count;
    }
  }
  std::vector<double> rewards;
  rewards.reserve(items.size());
  for (const auto& blk : blocks) rewards.insert(rewards.end(), blk.count, blk.mean());

  const auto fees = fee_recursion(profile, rewards);
  ContractMenu out = menu;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.items[i].reward = rewards[i];
    out.items[i].fee = fees[i];
  }
  return out;
}

FeasibilityReport verify_feasibility(const TypeProfile& profile, const ContractMenu& menu,
                                     double tolerance) {
  detail::check_lengths(profile, menu);
  const std::size_t n = menu.size();
  const double c = profile.unit_cost();
  FeasibilityReport report;
  report.tolerance = tolerance;
  report.ir_slack.resize(n);
  report.ir_binds.resize(n);
  report.ic_slack.assign(n, std::vector<double>(n, 0.0));
  report.ic_binds.assign(n, std::vector<bool>(n, false));

  for (std::size_t i = 0; i < n; ++i) {
    const double theta = profile[i].theta;
    const double own = detail::envelope(theta, menu.items[i].reward, c) - menu.items[i].fee;
    report.ir_slack[i] = own;
    report.ir_binds[i] = std::abs(own) <= tolerance;
    report.feasible = report.feasible && own >= -tolerance;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double other = detail::envelope(theta, menu.items[j].reward, c) - menu.items[j].fee;
      const double slack = own - other;
      report.ic_slack[i][j] = slack;
      report.ic_binds[i][j] = std::abs(slack) <= tolerance;
      report.feasible = report.feasible && slack >= -tolerance;
    }
  }
  return report;
}

std::vector<FeasibilityReport::Violation> FeasibilityReport::violations() const {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < ir_slack.size(); ++i) {
    if (ir_slack[i] < -tolerance) out.push_back({Violation::Kind::ir, i + 1, i + 1, ir_slack[i]});
    for (std::size_t j = 0; j < ic_slack[i].size(); ++j)
      if (j != i && ic_slack[i][j] < -tolerance)
        out.push_back({Violation::Kind::ic, i + 1, j + 1, ic_slack[i][j]});
  }
  return out;
}

}  // namespace fedcontract
