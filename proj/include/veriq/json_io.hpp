#pragma once

// JSON forms of the configuration and report types.
//
// Query:     {"kind": "count"|"sum"|"avg"|"stddev"|"select",
//             "attr": "income", "predicate": <predicate>}
// Predicate: {"op": "true"}
//            {"op": "eq", "attr": a, "value": v}
//            {"op": "range", "attr": a, "low"?: v, "high"?: v,
//             "low_inclusive"?: bool, "high_inclusive"?: bool}
//            {"op": "gt"|"ge"|"lt"|"le", "attr": a, "value": v}
//            {"op": "and"|"or", "args": [<predicate>, <predicate>, ...]}
// Strategy:  {"kind": "honest"|"sample"|"laplace", "k"?: int, "divisor"?: real}
//
// Malformed documents raise ConfigError.

#include <json.hpp>

#include "veriq/adversary.hpp"
#include "veriq/incentives.hpp"
#include "veriq/queryeng.hpp"
#include "veriq/simlab.hpp"
#include "veriq/verifier.hpp"

namespace veriq {

using json = nlohmann::json;

json to_json(const Predicate& p);
Predicate predicate_from_json(const json& j);

json to_json(const Query& q);
Query query_from_json(const json& j);

json to_json(const GameConfig& c);
GameConfig game_config_from_json(const json& j);

json to_json(const ServerStrategy& s);
ServerStrategy strategy_from_json(const json& j);

json to_json(const EpsilonPolicy& p);
EpsilonPolicy epsilon_policy_from_json(const json& j);

json to_json(const ErrorRates& r);
json to_json(const Verdict& v);
json to_json(const RationalityReport& r);
json to_json(const TrialSummary& s);
json to_json(const QueryResult& r, bool with_tuples = true);

Contract contract_from_json(const json& j);
AuditAccounting accounting_from_string(const std::string& s);
const char* to_string(AuditAccounting a);

}  // namespace veriq
