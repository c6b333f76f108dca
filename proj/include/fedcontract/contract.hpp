#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace fedcontract {

/// Absolute slack tolerance for IR/IC checks.
inline constexpr double kDefaultTolerance = 1e-9;

struct ClientType {
  std::size_t index = 0;  // 1-based
  double theta = 0.0;     // data-coverage quality in (0,1]
  double beta = 0.0;      // population probability

  bool operator==(const ClientType&) const = default;
};

/// Ordered client types plus the unit training cost c.
class TypeProfile {
public:
  TypeProfile(std::vector<ClientType> types, double unit_cost);
  /// Types indexed 1..I from parallel theta/beta lists.
  static TypeProfile from_lists(std::span<const double> thetas, std::span<const double> betas,
                                double unit_cost);

  const std::vector<ClientType>& types() const noexcept { return types_; }
  std::size_t size() const noexcept { return types_.size(); }
  double unit_cost() const noexcept { return unit_cost_; }
  const ClientType& operator[](std::size_t pos) const { return types_[pos]; }

  /// Same types, different cost.
  TypeProfile with_unit_cost(double unit_cost) const;

  bool thetas_strictly_increasing() const noexcept;
  double beta_sum() const noexcept;
  /// Throws DomainError unless thetas strictly increase and betas sum to 1.
  void validate(double beta_tolerance = 1e-9) const;

  bool operator==(const TypeProfile&) const = default;

private:
  std::vector<ClientType> types_;
  double unit_cost_;
};

struct ContractItem {
  std::size_t index = 0;  // 1-based
  double fee = 0.0;       // registration fee f
  double reward = 0.0;    // reward R
  double benchmark = 0.0; // generalization accuracy threshold M

  bool operator==(const ContractItem&) const = default;
};

struct ContractMenu {
  std::vector<ContractItem> items;

  std::size_t size() const noexcept { return items.size(); }
  bool operator==(const ContractMenu&) const = default;
};

/// Server revenue G(M) per submitted model: strictly increasing and convex.
class RevenueCurve {
public:
  struct Exponential {
    double scale;  // a
    double rate;   // b
  };
  using Knot = std::pair<double, double>;  // (M, G(M))

  /// G(M) = a·exp(b·M) with a, b > 0.
  static RevenueCurve exponential(double scale, double rate);
  /// Piecewise-linear through the knots. Knots are sorted by M and must be
  /// increasing with non-decreasing slopes; evaluation outside the knot
  /// range is a DomainError.
  static RevenueCurve table(std::vector<Knot> knots);

  double operator()(double benchmark) const;
  std::vector<double> evaluate(std::span<const double> benchmarks) const;

  /// Finite-difference check on the given M values (sorted, deduplicated):
  /// slopes positive and non-decreasing.
  bool increasing_convex_on(std::span<const double> benchmarks) const;

  bool is_table() const noexcept { return std::holds_alternative<std::vector<Knot>>(form_); }
  const Exponential* exponential_form() const noexcept { return std::get_if<Exponential>(&form_); }
  const std::vector<Knot>* knots() const noexcept { return std::get_if<std::vector<Knot>>(&form_); }

private:
  explicit RevenueCurve(std::variant<Exponential, std::vector<Knot>> form) : form_(std::move(form)) {}
  std::variant<Exponential, std::vector<Knot>> form_;
};

struct EffortResponse {
  double effort = 0.0;     // clamped to [0,1]
  double unclamped = 0.0;  // θR/c
};

/// Best-response training willingness ê = θR/c.
EffortResponse best_response_effort(double theta, double reward, double unit_cost);

/// U = θ·e·R − f − (c/2)e².
double client_utility(double theta, double effort, const ContractItem& item, double unit_cost);

/// Envelope utility at the unclamped best response: (θR)²/(2c) − f.
double client_utility_at_best_response(double theta, const ContractItem& item, double unit_cost);

/// Expected server utility Σβ_i (f_i + θ_i²R_i(G(M_i) − R_i)/c), using
/// unclamped best-response efforts. Items pair with types by position.
double server_expected_utility(const TypeProfile& profile, const ContractMenu& menu,
                               const RevenueCurve& curve);

/// Same expectation with the effort clamped into [0,1]:
/// Σβ_i (f_i + θ_i·min(1, θ_iR_i/c)·(G(M_i) − R_i)).
double server_expected_utility_clamped(const TypeProfile& profile, const ContractMenu& menu,
                                       const RevenueCurve& curve);

/// R_i = G(M_i), f_1 = (θ_1R_1)²/2c, f_i = (θ_iR_i)²/2c − (θ_iR_{i−1})²/2c + f_{i−1}.
/// No monotonicity adjustment.
ContractMenu closed_form_contract(const TypeProfile& profile, const RevenueCurve& curve,
                                  std::span<const double> benchmarks);

/// Closed form followed by enforce_monotonicity.
ContractMenu solve_contract(const TypeProfile& profile, const RevenueCurve& curve,
                                  std::span<const double> benchmarks);

/// Rebuilds fees from rewards with the binding-IR / tight-downward-IC recursion.
std::vector<double> fee_recursion(const TypeProfile& profile, std::span<const double> rewards);

/// Irons a non-monotone reward sequence: pools adjacent violators into their
/// β-weighted mean until R is non-decreasing, then recomputes fees with
/// fee_recursion. Menus whose rewards already increase come back unchanged.
ContractMenu enforce_monotonicity(const ContractMenu& menu, const TypeProfile& profile);

struct FeasibilityReport {
  double tolerance = kDefaultTolerance;
  std::vector<double> ir_slack;  // per type
  std::vector<bool> ir_binds;
  // ic_slack[i][j]: type i's envelope utility on its own item minus on item j.
  std::vector<std::vector<double>> ic_slack;
  std::vector<std::vector<bool>> ic_binds;
  bool feasible = true;

  struct Violation {
    enum class Kind { ir, ic } kind;
    std::size_t type;      // 1-based
    std::size_t contract;  // 1-based; equals `type` for IR
    double slack;
  };
  std::vector<Violation> violations() const;
};

/// IR and full pairwise IC slacks in envelope form.
FeasibilityReport verify_feasibility(const TypeProfile& profile, const ContractMenu& menu,
                                     double tolerance = kDefaultTolerance);

namespace detail {

inline double envelope(double theta, double reward, double unit_cost) {
  const double x = theta * reward;
  return x * x / (2.0 * unit_cost);
}

inline double server_summand(double beta, double theta, double fee, double reward, double revenue,
                             double unit_cost) {
  return beta * (fee + theta * theta * reward * (revenue - reward) / unit_cost);
}

void check_lengths(const TypeProfile& profile, const ContractMenu& menu);

}  // namespace detail

}  // namespace fedcontract
