#include "veriq/experiment.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "veriq/census.hpp"
#include "veriq/error.hpp"

namespace veriq {

namespace fs = std::filesystem;

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).string();
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

std::uint64_t get_seed(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0))
    throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

ServerStrategy strategy_field(const json& j, const char* key) {
  return j.contains(key) ? strategy_from_json(j.at(key)) : strategy::Honest{};
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<NamedQuery> queries_from_json(const json& j, const fs::path& base) {
  if (j.is_string()) {
    if (j.get<std::string>() == "census") return census_archetype_queries();
    throw ConfigError("query set must be \"census\", a list or {\"file\": path}");
  }
  if (j.is_object() && j.contains("file")) {
    const std::string path = resolve(base, get<std::string>(j, "file", ""));
    return queries_from_json(read_json_file(path), fs::path(path).parent_path());
  }
  if (!j.is_array() || j.empty()) throw ConfigError("query list must be a non-empty array");
  std::vector<NamedQuery> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& item = j[i];
    if (!item.is_object()) throw ConfigError("query list entries must be objects");
    NamedQuery nq;
    nq.id = get<std::string>(item, "id", "q" + std::to_string(i + 1));
    nq.query = query_from_json(item.contains("query") ? item.at("query") : item);
    out.push_back(std::move(nq));
  }
  return out;
}

ExperimentConfig experiment_from_json(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig cfg;

  int sources = 0;
  if (j.contains("data")) {
    cfg.data.raw_csv = resolve(base, get<std::string>(j, "data", ""));
    ++sources;
  }
  if (j.contains("signed_data")) {
    cfg.data.signed_csv = resolve(base, get<std::string>(j, "signed_data", ""));
    ++sources;
  }
  if (j.contains("generate")) {
    const json& g = j.at("generate");
    if (!g.is_object() || !g.contains("rows") || !g.contains("seed"))
      throw ConfigError("generate needs rows and seed");
    const auto rows = get<std::int64_t>(g, "rows", 0);
    if (rows < 1) throw ConfigError("generate.rows must be >= 1");
    cfg.data.generate_rows = static_cast<std::size_t>(rows);
    cfg.data.generate_seed = get_seed(g, "seed");
    ++sources;
  }
  if (sources != 1)
    throw ConfigError("exactly one of data, signed_data, generate is required");

  if (j.contains("key_hex")) cfg.key_hex = get<std::string>(j, "key_hex", "");
  cfg.key_file = resolve(base, get<std::string>(j, "key_file", ""));
  cfg.queries = queries_from_json(j.contains("queries") ? j.at("queries") : json("census"),
                                  base);
  if (j.contains("game")) cfg.game = game_config_from_json(j.at("game"));
  if (j.contains("policy")) cfg.policy = epsilon_policy_from_json(j.at("policy"));

  if (j.contains("strategies")) {
    const json& s = j.at("strategies");
    if (s.is_string() && s.get<std::string>() == "desk") {
      cfg.strategies = desk_scale_strategies();
    } else {
      if (!s.is_array() || s.empty())
        throw ConfigError("strategies must be a non-empty array or \"desk\"");
      for (const auto& item : s) cfg.strategies.push_back(strategy_from_json(item));
    }
  } else {
    cfg.strategies = desk_scale_strategies();
  }

  if (j.contains("k_grid")) {
    for (auto k : get<std::vector<std::int64_t>>(j, "k_grid", {})) {
      if (k < 1) throw ConfigError("k_grid entries must be >= 1");
      cfg.k_grid.push_back(static_cast<std::size_t>(k));
    }
    if (cfg.k_grid.empty()) throw ConfigError("k_grid must be non-empty");
  } else {
    cfg.k_grid = desk_scale_k_grid();
  }
  if (j.contains("epsilon_grid")) {
    cfg.epsilon_grid = get<std::vector<double>>(j, "epsilon_grid", {});
    if (cfg.epsilon_grid.empty()) throw ConfigError("epsilon_grid must be non-empty");
    for (double e : cfg.epsilon_grid)
      if (!(e >= 0)) throw ConfigError("epsilon_grid entries must be >= 0");
  } else {
    cfg.epsilon_grid = default_epsilon_grid();
  }

  const auto trials = get<std::int64_t>(j, "trials", 100);
  if (trials < 1) throw ConfigError("trials must be >= 1");
  cfg.trials = static_cast<std::size_t>(trials);
  if (j.contains("seed")) cfg.seed = get_seed(j, "seed");
  if (j.contains("workers")) {
    const int w = get<int>(j, "workers", 1);
    if (w < 1) throw ConfigError("workers must be >= 1");
    cfg.workers = w;
  }

  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    if (!s.is_object()) throw ConfigError("simulation must be an object");
    auto& sim = cfg.simulation;
    const auto form = get<std::string>(s, "form", "single");
    if (form == "single") {
      sim.form = GameForm::SingleCloud;
      sim.contract = Contract::Three;
    } else if (form == "two") {
      sim.form = GameForm::TwoCloud;
      sim.contract = Contract::One;
    } else {
      throw ConfigError("simulation.form must be single or two");
    }
    if (s.contains("contract")) sim.contract = contract_from_json(s.at("contract"));
    if ((sim.form == GameForm::SingleCloud) != (sim.contract == Contract::Three))
      throw ConfigError("contract 3 goes with the single-cloud form, 1 and 2 with two-cloud");
    if (s.contains("accounting"))
      sim.accounting = accounting_from_string(get<std::string>(s, "accounting", ""));
    const auto rounds = get<std::int64_t>(s, "rounds", 1000);
    if (rounds < 1) throw ConfigError("simulation.rounds must be >= 1");
    sim.rounds = static_cast<std::size_t>(rounds);
    sim.query_id = get<std::string>(s, "query", "");
    sim.strategy = strategy_field(s, "strategy");
    sim.s1 = strategy_field(s, "s1");
    sim.s2 = strategy_field(s, "s2");
    const auto verifier = get<std::string>(s, "verifier", "sketch");
    if (verifier != "sketch" && verifier != "modeled")
      throw ConfigError("simulation.verifier must be sketch or modeled");
    sim.modeled_verifier = verifier == "modeled";
    const auto vk = get<std::int64_t>(s, "verifier_k", 1000);
    if (vk < 1) throw ConfigError("simulation.verifier_k must be >= 1");
    sim.verifier_k = static_cast<std::size_t>(vk);
    sim.redraw_each_round = get<bool>(s, "redraw_each_round", false);
  }

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    cfg.out_csv = resolve(base, get<std::string>(o, "csv", ""));
    cfg.out_summary = resolve(base, get<std::string>(o, "summary", ""));
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  return experiment_from_json(read_json_file(path), fs::path(path).parent_path());
}

OwnerKey read_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read key file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string hex = ss.str();
  while (!hex.empty() && std::isspace(static_cast<unsigned char>(hex.back()))) hex.pop_back();
  try {
    return OwnerKey::from_hex(hex);
  } catch (const Error& e) {
    throw ConfigError("key file '" + path + "': " + e.what());
  }
}

OwnerKey resolve_key(const ExperimentConfig& cfg) {
  try {
    if (cfg.key_hex) return OwnerKey::from_hex(*cfg.key_hex);
    if (!cfg.key_file.empty()) return read_key_file(cfg.key_file);
    if (const char* env = std::getenv("VERIQ_KEY"); env && *env)
      return OwnerKey::from_hex(env);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("owner key: ") + e.what());
  }
  if (!cfg.seed) throw ConfigError("no key given and no seed to derive one from");
  return OwnerKey::derived(*cfg.seed);
}

SignedRelation load_relation(const ExperimentConfig& cfg, const OwnerKey& key) {
  if (cfg.data.generate_rows) {
    const RawTable t = gen_census_like(*cfg.data.generate_rows, cfg.data.generate_seed);
    return sign_relation(t.schema, t.rows, key);
  }
  if (!cfg.data.signed_csv.empty()) return read_signed_csv(cfg.data.signed_csv, &key);
  const RawTable t = read_raw_csv(cfg.data.raw_csv);
  return sign_relation(t.schema, t.rows, key);
}

const NamedQuery& find_query(const ExperimentConfig& cfg, const std::string& id) {
  if (cfg.queries.empty()) throw ConfigError("no queries configured");
  if (id.empty()) return cfg.queries.front();
  for (const auto& q : cfg.queries)
    if (q.id == id) return q;
  throw ConfigError("unknown query id '" + id + "'");
}

}  // namespace veriq
