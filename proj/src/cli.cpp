#include "fedcontract/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <algorithm>
#include <ostream>

#include "fedcontract/config.hpp"
#include "fedcontract/errors.hpp"
#include "fedcontract/format.hpp"

namespace fedcontract::cli {
namespace fs = std::filesystem;
namespace {

struct Options {
  std::string config;
  std::string menu;
  std::string out;
  std::optional<std::uint64_t> seed_override;
  std::string mode;
};

ExperimentConfig load(const Options& opt) {
  auto cfg = load_config(opt.config);
  if (opt.seed_override) cfg.seeds = {*opt.seed_override};
  if (!opt.mode.empty()) {
    if (opt.mode != "analytic" && opt.mode != "stochastic" && opt.mode != "ml")
      throw ConfigError("--mode", "must be analytic, stochastic or ml");
    cfg.mode = opt.mode;
  }
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

fs::path prepare_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void print_report(std::ostream& out, const FeasibilityReport& report) {
  out << (report.feasible ? "feasible" : "INFEASIBLE") << " (tolerance "
      << format_double(report.tolerance) << ")\n";
  for (std::size_t i = 0; i < report.ir_slack.size(); ++i)
    out << "  IR type " << i + 1 << ": slack " << format_double(report.ir_slack[i])
        << (report.ir_binds[i] ? "  [binds]" : "") << '\n';
  for (std::size_t i = 0; i < report.ic_slack.size(); ++i)
    for (std::size_t k = 0; k < report.ic_slack[i].size(); ++k)
      if (k != i && (report.ic_binds[i][k] || report.ic_slack[i][k] < -report.tolerance))
        out << "  IC type " << i + 1 << " vs contract " << k + 1 << ": slack "
            << format_double(report.ic_slack[i][k])
            << (report.ic_binds[i][k] ? "  [binds]" : "  [VIOLATED]") << '\n';
}

int cmd_solve(const Options& opt, std::ostream& out) {
  const auto cfg = load(opt);
  const auto menu = solve_contract(cfg.profile, cfg.curve, cfg.benchmarks);
  const auto report = verify_feasibility(cfg.profile, menu, cfg.tolerance);
  const auto dir = prepare_dir(cfg);
  write_json(dir / "menu.json", to_json(menu));
  write_json(dir / "feasibility.json", to_json(report));
  out << "solved " << menu.size() << "-item menu -> " << (dir / "menu.json").string() << '\n';
  for (const auto& it : menu.items)
    out << "  item " << it.index << ": f=" << format_double(it.fee)
        << " R=" << format_double(it.reward) << " M=" << format_double(it.benchmark) << '\n';
  print_report(out, report);
  return report.feasible ? kSuccess : kInfeasible;
}

int cmd_audit(const Options& opt, std::ostream& out) {
  const auto cfg = load(opt);
  ContractMenu menu;
  {
    std::ifstream in(opt.menu);
    if (!in) throw ConfigError("--menu", "cannot open " + opt.menu);
    try {
      menu = menu_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw ConfigError("--menu", e.what());
    }
  }
  const auto report = verify_feasibility(cfg.profile, menu, cfg.tolerance);
  const auto dir = prepare_dir(cfg);
  write_json(dir / "audit.json", to_json(report));
  print_report(out, report);
  return report.feasible ? kSuccess : kInfeasible;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const auto cfg = load(opt);
  const auto menu = solve_contract(cfg.profile, cfg.curve, cfg.benchmarks);
  const double expected = server_expected_utility_clamped(cfg.profile, menu, cfg.curve);
  const auto dir = prepare_dir(cfg);
  write_json(dir / "menu.json", to_json(menu));
  for (auto seed : cfg.seeds) {
    const auto outcome =
        run_round(cfg.profile, menu, cfg.curve, cfg.population, cfg.round_mode(), seed, cfg.tolerance);
    const auto stem = "seed_" + std::to_string(seed);
    auto j = to_json(outcome);
    j["seed"] = seed;
    j["expected_utility_per_client"] = expected;
    j["realized_utility_per_client"] =
        outcome.realized_server_utility / static_cast<double>(cfg.population);
    write_json(dir / ("round_" + stem + ".json"), j);
    std::ostringstream csv;
    write_clients_csv(csv, outcome);
    write_file(dir / ("clients_" + stem + ".csv"), csv.str());
    out << "seed " << seed << ": realized utility/client "
        << format_double(outcome.realized_server_utility / static_cast<double>(cfg.population))
        << " vs expected " << format_double(expected) << ", ties " << outcome.ties.size() << '\n';
  }
  return kSuccess;
}

int cmd_compare(const Options& opt, std::ostream& out) {
  const auto cfg = load(opt);
  const auto report = run_scheme_comparison(cfg.scheme_config());
  std::vector<SchemeRow> rows;
  for (const auto& r : report.rows)
    if (std::find(cfg.schemes.begin(), cfg.schemes.end(), r.scheme) != cfg.schemes.end())
      rows.push_back(r);

  const auto dir = prepare_dir(cfg);
  std::ostringstream csv, diag;
  write_scheme_csv(csv, rows);
  write_diagnostics_csv(diag, report.diagnostics);
  write_file(dir / "scheme_report.csv", csv.str());
  write_file(dir / "client_diagnostics.csv", diag.str());
  auto summary = to_json(report.summary);
  summary["mode"] = to_string(cfg.pass_source());
  summary["seeds"] = cfg.seeds.size();
  summary["scheme3_note"] = "flat reward, fee and benchmark are beta-weighted means of the menu";
  write_json(dir / "scheme_summary.json", summary);

  out << std::fixed << std::setprecision(4);
  for (const auto& m : report.summary.per_c) {
    out << "c=" << format_double(m.c) << ": scheme1 " << m.mean[0] << "  scheme2 " << m.mean[1]
        << "  scheme3 " << m.mean[2];
    if (m.degenerate_equal) out << "  (scheme1 == scheme2: degenerate weights)";
    out << '\n';
  }
  out << "ordering scheme1 >= scheme2 >= scheme3: "
      << (report.summary.ordering_holds ? "held" : "did not hold") << '\n';
  if (report.summary.per_c.size() >= 2)
    out << "smaller c gives scheme1 accuracy >= larger c: "
        << (report.summary.cost_direction_holds ? "held" : "did not hold") << '\n';
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contract-based incentive mechanism for federated learning"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Experiment config (JSON)")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides config output_dir)");
    sub->add_option("--seed-override", opt.seed_override, "Replace the config seed list");
    sub->add_option("--mode", opt.mode, "analytic | stochastic | ml");
  };
  auto* solve = app.add_subcommand("solve", "Solve the contract menu and audit it");
  auto* audit = app.add_subcommand("audit", "Audit a menu file against a profile");
  auto* simulate = app.add_subcommand("simulate", "Simulate one round per seed");
  auto* compare = app.add_subcommand("compare", "Compare aggregation schemes");
  for (auto* sub : {solve, audit, simulate, compare}) add_common(sub);
  audit->add_option("--menu", opt.menu, "Menu JSON to audit")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt, out);
    if (audit->parsed()) return cmd_audit(opt, out);
    if (simulate->parsed()) return cmd_simulate(opt, out);
    return cmd_compare(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const ContractError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace fedcontract::cli
