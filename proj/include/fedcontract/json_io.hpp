#pragma once

#include <iosfwd>
#include <span>

#include <json.hpp>

#include "fedcontract/contract.hpp"
#include "fedcontract/fed_learning.hpp"
#include "fedcontract/population.hpp"

namespace fedcontract {

using Json = nlohmann::ordered_json;

// Field names follow the domain types: theta, beta, c for profiles; f, R, M
// for contract items.

Json to_json(const TypeProfile& profile);
TypeProfile profile_from_json(const Json& j);

Json to_json(const ContractMenu& menu);
ContractMenu menu_from_json(const Json& j);

Json to_json(const RevenueCurve& curve);
RevenueCurve curve_from_json(const Json& j);

Json to_json(const FeasibilityReport& report);
Json to_json(const RoundOutcome& outcome);
Json to_json(const SchemeSummary& summary);

/// id,type,choice,effort,succeeded,fee,reward; choice is REJECT or the item index.
void write_clients_csv(std::ostream& out, const RoundOutcome& outcome);
/// seed,c,scheme,accuracy,participants,successes,total_fees,total_rewards
void write_scheme_csv(std::ostream& out, std::span<const SchemeRow> rows);
void write_diagnostics_csv(std::ostream& out, std::span<const ClientDiagnostic> rows);

}  // namespace fedcontract
