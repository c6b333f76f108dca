#include "fedcontract/json_io.hpp"

#include <ostream>

#include "fedcontract/errors.hpp"
#include "fedcontract/format.hpp"

namespace fedcontract {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ContractError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw ContractError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

Json to_json(const TypeProfile& profile) {
  Json types = Json::array();
  for (const auto& t : profile.types())
    types.push_back({{"index", t.index}, {"theta", t.theta}, {"beta", t.beta}});
  return {{"c", profile.unit_cost()}, {"types", std::move(types)}};
}

TypeProfile profile_from_json(const Json& j) {
  std::vector<ClientType> types;
  for (const auto& t : field(j, "types")) {
    const std::size_t index = t.contains("index") ? t.at("index").get<std::size_t>() : types.size() + 1;
    types.push_back({index, number(t, "theta"), number(t, "beta")});
  }
  return TypeProfile(std::move(types), number(j, "c"));
}

Json to_json(const ContractMenu& menu) {
  Json items = Json::array();
  for (const auto& it : menu.items)
    items.push_back({{"index", it.index}, {"f", it.fee}, {"R", it.reward}, {"M", it.benchmark}});
  return {{"items", std::move(items)}};
}

ContractMenu menu_from_json(const Json& j) {
  ContractMenu menu;
  const auto& items = field(j, "items");
  if (!items.is_array()) throw ContractError("field 'items' must be an array");
  for (const auto& it : items) {
    const std::size_t index =
        it.contains("index") ? it.at("index").get<std::size_t>() : menu.items.size() + 1;
    ContractItem item{index, number(it, "f"), number(it, "R"), number(it, "M")};
    if (item.fee < 0.0 || item.reward < 0.0 || item.benchmark < 0.0 || item.benchmark > 1.0)
      throw DomainError("contract item " + std::to_string(index) +
                        " needs f >= 0, R >= 0 and M in [0,1]");
    menu.items.push_back(item);
  }
  return menu;
}

Json to_json(const RevenueCurve& curve) {
  if (const auto* e = curve.exponential_form())
    return {{"kind", "exponential"}, {"a", e->scale}, {"b", e->rate}};
  Json points = Json::array();
  for (const auto& [m, g] : *curve.knots()) points.push_back({{"M", m}, {"G", g}});
  return {{"kind", "table"}, {"points", std::move(points)}};
}

RevenueCurve curve_from_json(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "exponential") return RevenueCurve::exponential(number(j, "a"), number(j, "b"));
  if (kind == "table") {
    std::vector<RevenueCurve::Knot> knots;
    for (const auto& p : field(j, "points")) knots.emplace_back(number(p, "M"), number(p, "G"));
    return RevenueCurve::table(std::move(knots));
  }
  throw ContractError("unknown revenue curve kind '" + kind + "'");
}

Json to_json(const FeasibilityReport& report) {
  Json ir = Json::array(), ic = Json::array(), violations = Json::array();
  for (std::size_t i = 0; i < report.ir_slack.size(); ++i) {
    ir.push_back({{"type", i + 1}, {"slack", report.ir_slack[i]}, {"binds", bool(report.ir_binds[i])}});
    for (std::size_t k = 0; k < report.ic_slack[i].size(); ++k) {
      if (k == i) continue;
      ic.push_back({{"type", i + 1},
                    {"contract", k + 1},
                    {"slack", report.ic_slack[i][k]},
                    {"binds", bool(report.ic_binds[i][k])}});
    }
  }
  for (const auto& v : report.violations())
    violations.push_back({{"constraint", v.kind == FeasibilityReport::Violation::Kind::ir ? "IR" : "IC"},
                          {"type", v.type},
                          {"contract", v.contract},
                          {"slack", v.slack}});
  return {{"feasible", report.feasible},
          {"tolerance", report.tolerance},
          {"ir", std::move(ir)},
          {"ic", std::move(ic)},
          {"violations", std::move(violations)}};
}

Json to_json(const RoundOutcome& outcome) {
  Json weights = Json::array();
  for (const auto& [id, w] : outcome.aggregation_weights) weights.push_back({{"id", id}, {"weight", w}});
  Json ties = Json::array();
  for (const auto& t : outcome.ties)
    ties.push_back({{"id", t.client_id}, {"type", t.type_index}, {"items", t.items}});
  std::size_t accepted = 0, succeeded = 0;
  for (const auto& c : outcome.clients) {
    accepted += c.choice.has_value();
    succeeded += c.succeeded;
  }
  return {{"mode", to_string(outcome.mode)},
          {"clients", outcome.clients.size()},
          {"accepted", accepted},
          {"succeeded", succeeded},
          {"menu_feasible", outcome.menu_feasible},
          {"fees_collected", outcome.fees_collected},
          {"rewards_paid", outcome.rewards_paid},
          {"fees_forfeited", outcome.fees_forfeited},
          {"realized_server_utility", outcome.realized_server_utility},
          {"aggregation_weights", std::move(weights)},
          {"ties", std::move(ties)}};
}

Json to_json(const SchemeSummary& summary) {
  Json per_c = Json::array();
  for (const auto& m : summary.per_c)
    per_c.push_back({{"c", m.c},
                     {"mean_accuracy", {{"scheme1", m.mean[0]}, {"scheme2", m.mean[1]}, {"scheme3", m.mean[2]}}},
                     {"scheme1_ge_scheme2", m.scheme1_ge_scheme2},
                     {"scheme2_ge_scheme3", m.scheme2_ge_scheme3},
                     {"degenerate_equal", m.degenerate_equal}});
  return {{"per_c", std::move(per_c)},
          {"ordering_holds", summary.ordering_holds},
          {"cost_direction_holds", summary.cost_direction_holds}};
}

void write_clients_csv(std::ostream& out, const RoundOutcome& outcome) {
  out << "id,type,choice,effort,succeeded,fee,reward\n";
  for (const auto& c : outcome.clients) {
    out << c.id << ',' << c.true_type.index << ','
        << (c.choice ? std::to_string(*c.choice) : std::string("REJECT")) << ','
        << format_double(c.effort) << ',' << (c.succeeded ? 1 : 0) << ',' << format_double(c.fee)
        << ',' << format_double(c.reward) << '\n';
  }
}

void write_scheme_csv(std::ostream& out, std::span<const SchemeRow> rows) {
  out << "seed,c,scheme,accuracy,participants,successes,total_fees,total_rewards\n";
  for (const auto& r : rows)
    out << r.seed << ',' << format_double(r.c) << ',' << r.scheme << ',' << format_double(r.accuracy)
        << ',' << r.participants << ',' << r.successes << ',' << format_double(r.total_fees) << ','
        << format_double(r.total_rewards) << '\n';
}

void write_diagnostics_csv(std::ostream& out, std::span<const ClientDiagnostic> rows) {
  out << "seed,c,scheme,id,type,target_theta,measured_theta,effort,local_accuracy,server_accuracy,"
         "passed\n";
  for (const auto& r : rows)
    out << r.seed << ',' << format_double(r.c) << ',' << r.scheme << ',' << r.client_id << ','
        << r.type_index << ',' << format_double(r.target_theta) << ','
        << format_double(r.measured_theta) << ',' << format_double(r.effort) << ','
        << format_double(r.local_accuracy) << ',' << format_double(r.server_accuracy) << ','
        << (r.passed ? 1 : 0) << '\n';
}

}  // namespace fedcontract
