// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fedcontract/cli.hpp"
#include "fedcontract/config.hpp"
#include "fedcontract/coverage.hpp"
#include "fedcontract/fed_learning.hpp"
#include "fedcontract/grid_search.hpp"
#include "fedcontract/population.hpp"
#include "instances.hpp"

namespace fs = std::filesystem;
using namespace fedcontract;
using fedcontract::testing::Instance;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, double secs, const std::string& detail) {
  std::printf("[%s] criterion %d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), secs);
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2 share 1000 instances. Every tenth instance gets shuffled
// benchmarks so that G(M_i) is not monotone in i and pooling kicks in.

struct SolvedInstance {
  Instance inst;
  ContractMenu closed;  // before pooling
  ContractMenu menu;    // after pooling
};

std::vector<SolvedInstance> random_menus() {
  std::vector<SolvedInstance> out;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    auto inst = testing::random_instance(0xACCE55 + k, 2 + k % 9);
    if (k % 10 == 9) {
      Stream s(k);
      for (std::size_t i = inst.benchmarks.size(); i > 1; --i)
        std::swap(inst.benchmarks[i - 1], inst.benchmarks[s.below(i)]);
    }
    auto closed = closed_form_contract(inst.profile, inst.curve, inst.benchmarks);
    auto menu = enforce_monotonicity(closed, inst.profile);
    out.push_back({std::move(inst), std::move(closed), std::move(menu)});
  }
  return out;
}

void criterion_1_and_2() {
  const auto t0 = Clock::now();
  const auto menus = random_menus();
  std::size_t infeasible = 0, bad_binding = 0, pooled = 0;
  double worst = 0.0;
  for (const auto& s : menus) {
    const auto report = verify_feasibility(s.inst.profile, s.menu);
    infeasible += !report.feasible;
    for (double v : report.ir_slack) worst = std::min(worst, v);
    for (const auto& row : report.ic_slack)
      for (double v : row) worst = std::min(worst, v);

    const bool monotone = std::is_sorted(s.closed.items.begin(), s.closed.items.end(),
                                         [](auto& a, auto& b) { return a.reward < b.reward; });
    if (!monotone) {
      ++pooled;
      continue;
    }
    // Binding pattern of the closed form itself.
    const auto pre = verify_feasibility(s.inst.profile, s.closed);
    bool ok = std::abs(pre.ir_slack[0]) <= 1e-9;
    for (std::size_t i = 1; i < s.closed.size(); ++i) ok = ok && std::abs(pre.ic_slack[i][i - 1]) <= 1e-9;
    bad_binding += !ok;
  }
  const double t1 = seconds_since(t0);
  report(1, "closed-form feasibility", infeasible == 0 && worst >= -1e-9 && bad_binding == 0 && t1 < 10.0, t1,
         fmt("%zu instances, %zu pooled, %zu infeasible, worst slack %.3g, %zu with wrong binding pattern",
             menus.size(), pooled, infeasible, worst, bad_binding));

  const auto t2 = Clock::now();
  std::size_t violations = 0;
  for (const auto& s : menus) {
    const auto& m = s.menu.items;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double dt = s.inst.profile[i].theta - s.inst.profile[j].theta;
        const double dr = m[i].reward - m[j].reward;
        const double df = m[i].fee - m[j].fee;
        violations += (dt * dr < 0.0) + (dr * df < 0.0) + (dt * df < 0.0);
      }
  }
  const double t3 = t1 + seconds_since(t2);
  report(2, "co-monotone menus", violations == 0 && t3 < 10.0, t3,
         fmt("%zu co-monotonicity violations over (theta,R), (R,f), (theta,f)", violations));
}

// ---------------------------------------------------------------------------

void criterion_3() {
  const auto t0 = Clock::now();
  std::size_t failed = 0;
  double max_gap = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto inst = testing::random_instance(0x6A1D + k, 2);
    const auto closed = solve_contract(inst.profile, inst.curve, inst.benchmarks);
    const double formula = server_expected_utility(inst.profile, closed, inst.curve);
    const auto og = testing::oracle_grid(inst, closed, 101);
    const auto r = grid_search_contract(inst.profile, inst.curve, inst.benchmarks, og.grid);
    const bool ok = r.found() && r.objective >= formula - og.slack;
    failed += !ok;
    const double gap = r.found() ? r.objective - formula : NAN;
    max_gap = std::max(max_gap, gap);
    std::printf("  instance %2llu: formula %.6f grid %.6f gap %+.6f slack %.6f%s\n",
                static_cast<unsigned long long>(k), formula, r.objective, gap, og.slack, ok ? "" : "  <-- below");
  }
  const double t = seconds_since(t0);
  report(3, "grid oracle cross-check", failed == 0 && t < 60.0, t,
         fmt("50 I=2 instances at 101 points per variable, %zu below formula - slack, largest gap %+.4g",
             failed, max_gap));
}

// ---------------------------------------------------------------------------

void criterion_4() {
  const auto t0 = Clock::now();
  const double mid = coverage_quality(PointCloud(1, {0.5}), 64, 100000, 1);
  const double end = coverage_quality(PointCloud(1, {0.0}), 64, 100000, 1);
  const double t = seconds_since(t0);
  report(4, "coverage oracle", std::abs(mid - 0.75) <= 0.01 && std::abs(end - 0.5) <= 0.01 && t < 5.0, t,
         fmt("midpoint %.4f (oracle 0.75), endpoint %.4f (oracle 0.5)", mid, end));
}

// ---------------------------------------------------------------------------

void criterion_5() {
  const auto t0 = Clock::now();
  const auto inst = testing::ten_type_instance();
  const auto menu = solve_contract(inst.profile, inst.curve, inst.benchmarks);
  const auto r = run_round(inst.profile, menu, inst.curve, 10000, RoundMode::analytic, 1);
  std::size_t lying = 0, flagged = 0, bad_ties = 0;
  for (const auto& c : r.clients) {
    flagged += c.tied;
    if (!c.tied && c.choice != c.true_type.index) ++lying;
  }
  for (const auto& tie : r.ties) {
    // Only the adjacent tight-IC pair (i−1, i) may tie for type i.
    const std::size_t i = tie.type_index;
    const bool adjacent = tie.items == std::vector<std::size_t>{i - 1, i};
    bad_ties += !adjacent;
  }
  const bool logged = r.ties.size() == flagged;
  const double t = seconds_since(t0);
  report(5, "truthful selection", lying == 0 && bad_ties == 0 && logged && t < 5.0, t,
         fmt("10^4 clients, %zu untruthful non-tied, %zu tie events (%zu not adjacent)", lying, r.ties.size(),
             bad_ties));
}

// ---------------------------------------------------------------------------
// Five instances fixed in advance: the two-type canonical instance, the
// ten-type fixture, and three random instances.

void criterion_6() {
  const auto t0 = Clock::now();
  std::vector<Instance> instances;
  instances.push_back({TypeProfile::from_lists(std::vector{0.5, 1.0}, std::vector{0.5, 0.5}, 1.0),
                       RevenueCurve::table({{0.2, 1.0}, {0.4, 2.0}}), {0.2, 0.4}});
  instances.push_back(testing::ten_type_instance());
  for (std::uint64_t k = 0; k < 3; ++k) instances.push_back(testing::random_instance(0xE97 + k, 3 + 2 * k));

  std::string detail;
  std::size_t outside = 0;
  for (const auto& inst : instances) {
    const auto menu = solve_contract(inst.profile, inst.curve, inst.benchmarks);
    const double expected = server_expected_utility_clamped(inst.profile, menu, inst.curve);
    const auto r = run_round(inst.profile, menu, inst.curve, 10000, RoundMode::analytic, 1);
    const double rel = (r.realized_server_utility / 1e4 - expected) / expected;
    outside += std::abs(rel) > 0.01;
    // Standard error of the mean from the spread of per-type values.
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < menu.size(); ++i) {
      const auto& it = menu.items[i];
      const double theta = inst.profile[i].theta;
      const double p = success_probability(theta, best_response_effort(theta, it.reward, inst.profile.unit_cost()).effort);
      const double v = it.fee + p * (inst.curve(it.benchmark) - it.reward);
      m1 += inst.profile[i].beta * v;
      m2 += inst.profile[i].beta * v * v;
    }
    const double se = std::sqrt(std::max(0.0, m2 - m1 * m1) / 1e4);
    detail += fmt("%s%+.2f%% (z=%+.2f)", detail.empty() ? "relative errors " : ", ", 100 * rel,
                  (r.realized_server_utility / 1e4 - expected) / se);
  }
  const double t = seconds_since(t0);
  report(6, "expected-utility convergence", outside == 0 && t < 10.0, t,
         detail + fmt(" (%zu of 5 outside 1%%)", outside));
}

// ---------------------------------------------------------------------------

void criterion_7_and_8() {
  const auto t0 = Clock::now();
  const auto cfg = load_config(fs::path(FEDCONTRACT_CONFIGS) / "compare_default.json");
  const auto sc = cfg.scheme_config();
  const auto rep = run_scheme_comparison(sc);
  const double t = seconds_since(t0);

  std::string means;
  for (const auto& m : rep.summary.per_c)
    means += fmt("%sc=%g: %.4f/%.4f/%.4f", means.empty() ? "" : "; ", m.c, m.mean[0], m.mean[1], m.mean[2]);
  const bool setup = sc.seeds.size() >= 10 && sc.population == 30 && sc.profile.size() == 10 &&
                     sc.task.dimension == 2 && sc.task.classes == 2 && sc.training.max_epochs == 50;
  report(7, "scheme ordering and cost direction",
         setup && rep.summary.ordering_holds && rep.summary.cost_direction_holds && t < 300.0, t,
         fmt("%zu seeds, ", sc.seeds.size()) + means +
             (rep.summary.ordering_holds ? ", S1>=S2>=S3 held" : ", S1>=S2>=S3 did not hold") +
             (rep.summary.cost_direction_holds ? ", c=0.5>=c=2 held" : ", c=0.5>=c=2 did not hold"));

  std::vector<double> thetas;
  for (const auto& d : rep.diagnostics)
    if (d.scheme == 1) thetas.push_back(d.measured_theta);
  std::nth_element(thetas.begin(), thetas.begin() + thetas.size() / 2, thetas.end());
  const double median = thetas[thetas.size() / 2];
  std::size_t below = 0, local_wins = 0;
  for (const auto& d : rep.diagnostics) {
    if (d.scheme != 1 || !(d.measured_theta < median)) continue;
    ++below;
    local_wins += d.local_accuracy > d.server_accuracy;
  }
  const double share = below ? double(local_wins) / double(below) : 0.0;
  report(8, "local-vs-server gap", below > 0 && share >= 0.8, 0.0,
         fmt("%zu of %zu below-median clients (%.1f%%) have local accuracy above server accuracy", local_wins,
             below, 100 * share));
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fedcontract");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

void criterion_9() {
  const auto t0 = Clock::now();
  const auto root = fs::temp_directory_path() / "fedcontract_acceptance";
  fs::remove_all(root);
  const std::string configs = FEDCONTRACT_CONFIGS;
  const auto canonical = configs + "/canonical_i2.json";
  const auto ten_types = configs + "/ten_types.json";

  std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"solve_canonical", {"solve", "--config", canonical}},
      {"solve_ten_types", {"solve", "--config", ten_types}},
      {"simulate_canonical", {"simulate", "--config", canonical}},
      {"simulate_ten_types_stochastic", {"simulate", "--config", ten_types, "--mode", "stochastic"}},
      {"compare_default", {"compare", "--config", configs + "/compare_default.json"}},
  };
  std::size_t files = 0, differing = 0, bad_exit = 0;
  for (auto& [name, args] : runs) {
    for (const char* rep : {"a", "b"}) {
      auto full = args;
      full.push_back("--out");
      full.push_back((root / rep / name).string());
      bad_exit += cli(full) != 0;
    }
  }
  // audit reads the solved menu from the first run.
  for (const char* rep : {"a", "b"})
    bad_exit += cli({"audit", "--config", canonical, "--menu", (root / "a/solve_canonical/menu.json").string(),
                     "--out", (root / rep / "audit").string()}) != 0;

  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto twin = root / "b" / fs::relative(entry.path(), root / "a");
    ++files;
    differing += !fs::exists(twin) || slurp(entry.path()) != slurp(twin);
  }
  fs::remove_all(root);
  const double t = seconds_since(t0);
  report(9, "CLI determinism", files > 0 && differing == 0 && bad_exit == 0, t,
         fmt("%zu output files compared across reruns of solve/audit/simulate/compare, %zu differ, %zu bad exits",
             files, differing, bad_exit));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion_1_and_2, criterion_3, criterion_4, criterion_5,
                                                       criterion_6, criterion_7_and_8, criterion_9};
  for (const auto& run : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion threw: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%s: %d criterion failure(s)\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
  return failures ? 1 : 0;
}
