#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedcontract/contract.hpp"
#include "fedcontract/random.hpp"

namespace fedcontract {

/// `points` equally spaced values from lo to hi inclusive.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;

  double value(std::size_t k) const {
    return points < 2 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  double step() const { return points < 2 ? 0.0 : (hi - lo) / static_cast<double>(points - 1); }
};

/// One fee axis and one reward axis per type.
struct GridSpec {
  std::vector<GridAxis> fee;
  std::vector<GridAxis> reward;

  /// Same fee axis and reward axis for every one of `types` types.
  static GridSpec uniform(std::size_t types, GridAxis fee_axis, GridAxis reward_axis);
  std::uint64_t tuple_count() const;
};

struct GridSearchResult {
  std::optional<ContractMenu> menu;  // empty: no feasible grid point
  double objective = 0.0;
  std::uint64_t tuples = 0;
  std::uint64_t feasible_tuples = 0;

  bool found() const noexcept { return menu.has_value(); }
};

/// Largest number of types the exhaustive search accepts.
inline constexpr std::size_t kMaxGridTypes = 3;

/// Exhaustive oracle: every grid tuple (f_1..f_I, R_1..R_I) passing the IR and
/// pairwise IC checks is scored with server_expected_utility; the best one
/// wins, ties going to the lexicographically smallest (f_1, …, f_I, R_1, …, R_I).
///
/// The serial backend walks the full grid. The parallel backend splits the
/// reward tuples over threads and skips fee sub-trees that already violate a
/// constraint among the assigned types; both return identical results.
GridSearchResult grid_search_contract(const TypeProfile& profile, const RevenueCurve& curve,
                                      std::span<const double> benchmarks, const GridSpec& grid,
                                      double tolerance = kDefaultTolerance,
                                      Backend backend = Backend::parallel);

}  // namespace fedcontract
