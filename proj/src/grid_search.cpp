#include "fedcontract/grid_search.hpp"

#include <array>
#include <limits>

#include "fedcontract/errors.hpp"

namespace fedcontract {
namespace {

constexpr std::size_t kMax = kMaxGridTypes;

struct Problem {
  std::size_t types;
  double unit_cost;
  double tolerance;
  std::array<double, kMax> theta{}, beta{}, revenue{};
  const GridSpec* grid;
};

struct Candidate {
  double objective = -std::numeric_limits<double>::infinity();
  std::array<std::size_t, kMax> fee_idx{}, reward_idx{};
  bool valid = false;
  std::uint64_t feasible = 0;

  // Higher objective wins; ties go to the smaller (fee..., reward...) key.
  bool beats(const Candidate& other, std::size_t n) const {
    if (!valid) return false;
    if (!other.valid) return true;
    if (objective != other.objective) return objective > other.objective;
    for (std::size_t i = 0; i < n; ++i)
      if (fee_idx[i] != other.fee_idx[i]) return fee_idx[i] < other.fee_idx[i];
    for (std::size_t i = 0; i < n; ++i)
      if (reward_idx[i] != other.reward_idx[i]) return reward_idx[i] < other.reward_idx[i];
    return false;
  }

  void merge(const Candidate& other, std::size_t n) {
    feasible += other.feasible;
    if (other.beats(*this, n)) {
      const auto count = feasible;
      *this = other;
      feasible = count;
    }
  }
};

// Values that depend only on the reward tuple.
struct RewardContext {
  std::array<double, kMax> reward{};
  std::array<std::array<double, kMax>, kMax> env{};  // env[i][j] = (θ_i R_j)²/2c
};

RewardContext make_context(const Problem& p, const std::array<std::size_t, kMax>& ridx) {
  RewardContext ctx;
  for (std::size_t j = 0; j < p.types; ++j) ctx.reward[j] = p.grid->reward[j].value(ridx[j]);
  for (std::size_t i = 0; i < p.types; ++i)
    for (std::size_t j = 0; j < p.types; ++j)
      ctx.env[i][j] = detail::envelope(p.theta[i], ctx.reward[j], p.unit_cost);
  return ctx;
}

// Constraints that involve type k and types below it only.
bool constraints_hold(const Problem& p, const RewardContext& ctx, const std::array<double, kMax>& fee,
                      std::size_t k) {
  const double own_k = ctx.env[k][k] - fee[k];
  if (own_k < -p.tolerance) return false;
  for (std::size_t j = 0; j < k; ++j) {
    if (own_k - (ctx.env[k][j] - fee[j]) < -p.tolerance) return false;
    const double own_j = ctx.env[j][j] - fee[j];
    if (own_j - (ctx.env[j][k] - fee[k]) < -p.tolerance) return false;
  }
  return true;
}

double objective(const Problem& p, const RewardContext& ctx, const std::array<double, kMax>& fee) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.types; ++i)
    total += detail::server_summand(p.beta[i], p.theta[i], fee[i], ctx.reward[i], p.revenue[i],
                                    p.unit_cost);
  return total;
}

void consider(const Problem& p, const RewardContext& ctx, const std::array<double, kMax>& fee,
              const std::array<std::size_t, kMax>& fidx, const std::array<std::size_t, kMax>& ridx,
              Candidate& best) {
  Candidate c;
  c.valid = true;
  c.objective = objective(p, ctx, fee);
  c.fee_idx = fidx;
  c.reward_idx = ridx;
  ++best.feasible;
  if (c.beats(best, p.types)) {
    const auto count = best.feasible;
    best = c;
    best.feasible = count;
  }
}

bool advance(std::array<std::size_t, kMax>& idx, const std::vector<GridAxis>& axes, std::size_t n) {
  for (std::size_t i = n; i-- > 0;) {
    if (++idx[i] < axes[i].points) return true;
    idx[i] = 0;
  }
  return false;
}

Candidate search_serial(const Problem& p) {
  Candidate best;
  const std::size_t n = p.types;
  std::array<std::size_t, kMax> ridx{};
  do {
    const auto ctx = make_context(p, ridx);
    std::array<std::size_t, kMax> fidx{};
    do {
      std::array<double, kMax> fee{};
      for (std::size_t i = 0; i < n; ++i) fee[i] = p.grid->fee[i].value(fidx[i]);
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) ok = constraints_hold(p, ctx, fee, k);
      if (ok) consider(p, ctx, fee, fidx, ridx, best);
    } while (advance(fidx, p.grid->fee, n));
  } while (advance(ridx, p.grid->reward, n));
  return best;
}

void search_fees(const Problem& p, const RewardContext& ctx, const std::array<std::size_t, kMax>& ridx,
                 std::size_t depth, std::array<double, kMax>& fee,
                 std::array<std::size_t, kMax>& fidx, Candidate& best) {
  const auto& axis = p.grid->fee[depth];
  for (std::size_t k = 0; k < axis.points; ++k) {
    fidx[depth] = k;
    fee[depth] = axis.value(k);
    if (!constraints_hold(p, ctx, fee, depth)) continue;
    if (depth + 1 == p.types)
      consider(p, ctx, fee, fidx, ridx, best);
    else
      search_fees(p, ctx, ridx, depth + 1, fee, fidx, best);
  }
}

Candidate search_parallel(const Problem& p) {
  const std::size_t n = p.types;
  std::uint64_t reward_tuples = 1;
  for (std::size_t i = 0; i < n; ++i) reward_tuples *= p.grid->reward[i].points;

  Candidate best;
#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(reward_tuples); ++r) {
      std::array<std::size_t, kMax> ridx{};
      auto rest = static_cast<std::uint64_t>(r);
      for (std::size_t i = n; i-- > 0;) {
        ridx[i] = rest % p.grid->reward[i].points;
        rest /= p.grid->reward[i].points;
      }
      const auto ctx = make_context(p, ridx);
      std::array<double, kMax> fee{};
      std::array<std::size_t, kMax> fidx{};
      search_fees(p, ctx, ridx, 0, fee, fidx, local);
    }
#pragma omp critical
    best.merge(local, n);
  }
  return best;
}

}  // namespace

GridSpec GridSpec::uniform(std::size_t types, GridAxis fee_axis, GridAxis reward_axis) {
  return {std::vector<GridAxis>(types, fee_axis), std::vector<GridAxis>(types, reward_axis)};
}

std::uint64_t GridSpec::tuple_count() const {
  std::uint64_t n = 1;
  for (const auto& a : fee) n *= a.points;
  for (const auto& a : reward) n *= a.points;
  return n;
}

GridSearchResult grid_search_contract(const TypeProfile& profile, const RevenueCurve& curve,
                                      std::span<const double> benchmarks, const GridSpec& grid,
                                      double tolerance, Backend backend) {
  const std::size_t n = profile.size();
  if (n == 0 || n > kMaxGridTypes)
    throw DomainError("grid search supports between 1 and " + std::to_string(kMaxGridTypes) +
                      " types");
  if (benchmarks.size() != n || grid.fee.size() != n || grid.reward.size() != n)
    throw ContractError("grid spec, benchmarks and profile differ in length");
  for (const auto* axes : {&grid.fee, &grid.reward})
    for (const auto& a : *axes)
      if (a.points == 0 || a.hi < a.lo) throw DomainError("grid axis is empty");

  Problem p{n, profile.unit_cost(), tolerance, {}, {}, {}, &grid};
  for (std::size_t i = 0; i < n; ++i) {
    p.theta[i] = profile[i].theta;
    p.beta[i] = profile[i].beta;
    p.revenue[i] = curve(benchmarks[i]);
  }

  const Candidate best = backend == Backend::serial ? search_serial(p) : search_parallel(p);

  GridSearchResult result;
  result.tuples = grid.tuple_count();
  result.feasible_tuples = best.feasible;
  if (!best.valid) return result;
  result.objective = best.objective;
  ContractMenu menu;
  for (std::size_t i = 0; i < n; ++i)
    menu.items.push_back({i + 1, grid.fee[i].value(best.fee_idx[i]),
                          grid.reward[i].value(best.reward_idx[i]), benchmarks[i]});
  result.menu = std::move(menu);
  return result;
}

}  // namespace fedcontract
