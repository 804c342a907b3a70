#include "veriq/json_io.hpp"

#include "veriq/error.hpp"

namespace veriq {

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

}  // namespace

json to_json(const Predicate& p) {
  return std::visit(
      [](const auto& n) -> json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, pred_node::True>) {
          return {{"op", "true"}};
        } else if constexpr (std::is_same_v<N, pred_node::Equals>) {
          return {{"op", "eq"}, {"attr", n.attr}, {"value", n.value}};
        } else if constexpr (std::is_same_v<N, pred_node::Range>) {
          json j{{"op", "range"}, {"attr", n.attr}};
          if (n.low) {
            j["low"] = *n.low;
            j["low_inclusive"] = n.low_inclusive;
          }
          if (n.high) {
            j["high"] = *n.high;
            j["high_inclusive"] = n.high_inclusive;
          }
          return j;
        } else {
          const char* op = std::is_same_v<N, pred_node::And> ? "and" : "or";
          return {{"op", op}, {"args", {to_json(*n.left), to_json(*n.right)}}};
        }
      },
      p.node);
}

Predicate predicate_from_json(const json& j) {
  require_object(j, "predicate");
  const auto op = field<std::string>(j, "op");
  if (op == "true") return pred::always();
  if (op == "eq") return pred::eq(field<std::string>(j, "attr"), field<Value>(j, "value"));
  if (op == "gt") return pred::gt(field<std::string>(j, "attr"), field<Value>(j, "value"));
  if (op == "ge") return pred::ge(field<std::string>(j, "attr"), field<Value>(j, "value"));
  if (op == "lt") return pred::lt(field<std::string>(j, "attr"), field<Value>(j, "value"));
  if (op == "le") return pred::le(field<std::string>(j, "attr"), field<Value>(j, "value"));
  if (op == "range") {
    std::optional<Value> low, high;
    if (j.contains("low")) low = field<Value>(j, "low");
    if (j.contains("high")) high = field<Value>(j, "high");
    if (!low && !high) throw ConfigError("range predicate needs low or high");
    return pred::between(field<std::string>(j, "attr"), low, high,
                         field_or(j, "low_inclusive", true),
                         field_or(j, "high_inclusive", true));
  }
  if (op == "and" || op == "or") {
    const json& args = j.contains("args") ? j.at("args") : json();
    if (!args.is_array() || args.size() < 2)
      throw ConfigError("'" + op + "' needs an args array of at least two predicates");
    Predicate acc = predicate_from_json(args[0]);
    for (std::size_t i = 1; i < args.size(); ++i) {
      Predicate next = predicate_from_json(args[i]);
      acc = op == "and" ? pred::all_of(std::move(acc), std::move(next))
                        : pred::any_of(std::move(acc), std::move(next));
    }
    return acc;
  }
  throw ConfigError("unknown predicate op '" + op + "'");
}

json to_json(const Query& q) {
  json j{{"kind", to_string(q.kind)}, {"predicate", to_json(q.predicate)}};
  if (!q.attr.empty()) j["attr"] = q.attr;
  return j;
}

Query query_from_json(const json& j) {
  require_object(j, "query");
  Query q;
  try {
    q.kind = query_kind_from_string(field<std::string>(j, "kind"));
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  }
  q.attr = field_or<std::string>(j, "attr", "");
  q.predicate = j.contains("predicate") ? predicate_from_json(j.at("predicate"))
                                        : pred::always();
  return q;
}

json to_json(const GameConfig& c) {
  return {{"price", c.price},
          {"cost_honest", c.cost_honest},
          {"cost_cheat", c.cost_cheat},
          {"fine", c.fine},
          {"info_honest", c.info_honest},
          {"info_cheat", c.info_cheat},
          {"audit_cost", c.audit_cost},
          {"verify_cost", c.verify_cost},
          {"alpha", c.alpha},
          {"error_rates", {{"p_tn", c.rates.p_tn}, {"p_fn", c.rates.p_fn}}}};
}

GameConfig game_config_from_json(const json& j) {
  require_object(j, "game config");
  GameConfig c;
  c.price = field_or(j, "price", 0.0);
  c.cost_honest = field_or(j, "cost_honest", 0.0);
  c.cost_cheat = field_or(j, "cost_cheat", 0.0);
  c.fine = field_or(j, "fine", 0.0);
  c.info_honest = field_or(j, "info_honest", 0.0);
  c.info_cheat = field_or(j, "info_cheat", 0.0);
  c.audit_cost = field_or(j, "audit_cost", 0.0);
  c.verify_cost = field_or(j, "verify_cost", 0.0);
  c.alpha = field_or(j, "alpha", 0.0);
  if (j.contains("error_rates")) {
    const json& r = j.at("error_rates");
    require_object(r, "error_rates");
    c.rates = ErrorRates::from(field_or(r, "p_tn", 1.0), field_or(r, "p_fn", 0.0));
  }
  return c;
}

json to_json(const ServerStrategy& s) {
  json j{{"kind", strategy_kind(s)}};
  if (const auto* sc = std::get_if<strategy::SampleCheat>(&s)) j["k"] = sc->k;
  if (const auto* lc = std::get_if<strategy::LaplaceCheat>(&s)) j["divisor"] = lc->divisor;
  return j;
}

ServerStrategy strategy_from_json(const json& j) {
  require_object(j, "strategy");
  const auto kind = field<std::string>(j, "kind");
  ServerStrategy s;
  if (kind == "honest") {
    s = strategy::Honest{};
  } else if (kind == "sample") {
    const auto k = field<std::int64_t>(j, "k");
    if (k < 1) throw ConfigError("sample strategy needs k >= 1");
    s = strategy::SampleCheat{static_cast<std::size_t>(k)};
  } else if (kind == "laplace") {
    s = strategy::LaplaceCheat{field<double>(j, "divisor")};
  } else {
    throw ConfigError("unknown strategy kind '" + kind + "'");
  }
  try {
    validate(s);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

json to_json(const EpsilonPolicy& p) {
  return {{"relative", p.relative}, {"absolute_floor", p.absolute_floor}};
}

EpsilonPolicy epsilon_policy_from_json(const json& j) {
  require_object(j, "policy");
  EpsilonPolicy p;
  p.relative = field_or(j, "relative", p.relative);
  p.absolute_floor = field_or(j, "absolute_floor", p.absolute_floor);
  try {
    p.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

json to_json(const ErrorRates& r) {
  return {{"p_tp", r.p_tp}, {"p_tn", r.p_tn}, {"p_fp", r.p_fp}, {"p_fn", r.p_fn}};
}

json to_json(const Verdict& v) {
  json j{{"decision", to_string(v.decision)},
         {"reason", to_string(v.reason)},
         {"direct_evidence", v.direct_evidence}};
  j["estimate"] = v.estimate ? json(*v.estimate) : json(nullptr);
  j["evidence_id"] = v.evidence_id ? json(*v.evidence_id) : json(nullptr);
  return j;
}

json to_json(const RationalityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"margin", c.margin},
                      {"pass", c.pass}});
  return {{"form", r.form == GameForm::TwoCloud ? "two" : "single"},
          {"alpha", r.alpha},
          {"threshold", r.threshold},
          {"all_pass", r.all_pass()},
          {"checks", checks}};
}

json to_json(const TrialSummary& s) {
  return {{"rounds", s.rounds},
          {"mean_payoff",
           {{"owner", s.mean_payoff[0]}, {"s1", s.mean_payoff[1]}, {"s2", s.mean_payoff[2]}}},
          {"std_error",
           {{"owner", s.std_error[0]}, {"s1", s.std_error[1]}, {"s2", s.std_error[2]}}},
          {"verified_rounds", s.verified_rounds},
          {"mismatches", s.mismatches},
          {"escalations", s.escalations},
          {"audits", s.audits},
          {"detections", s.detections},
          {"p_fn", s.p_fn},
          {"p_tn", s.p_tn}};
}

json to_json(const QueryResult& r, bool with_tuples) {
  json j{{"kind", to_string(r.kind)}, {"value", r.value}};
  if (r.is_selection()) {
    json ids = json::array();
    for (const auto& t : r.tuples) ids.push_back(t.id);
    j["ids"] = ids;
    if (with_tuples) {
      json rows = json::array();
      for (const auto& t : r.tuples)
        rows.push_back({{"id", t.id}, {"values", t.values}, {"mac", to_hex(t.mac)}});
      j["tuples"] = rows;
    }
  }
  return j;
}

Contract contract_from_json(const json& j) {
  int n = 0;
  if (j.is_number_integer()) {
    n = j.get<int>();
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "1" || s == "one") n = 1;
    if (s == "2" || s == "two") n = 2;
    if (s == "3" || s == "three") n = 3;
  }
  if (n < 1 || n > 3) throw ConfigError("contract must be 1, 2 or 3");
  return static_cast<Contract>(n);
}

AuditAccounting accounting_from_string(const std::string& s) {
  if (s == "owner_bears") return AuditAccounting::OwnerBears;
  if (s == "cheater_reimburses") return AuditAccounting::CheaterReimburses;
  throw ConfigError("accounting must be owner_bears or cheater_reimburses");
}

const char* to_string(AuditAccounting a) {
  return a == AuditAccounting::OwnerBears ? "owner_bears" : "cheater_reimburses";
}

}  // namespace veriq
