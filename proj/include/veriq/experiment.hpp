#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "veriq/json_io.hpp"

namespace veriq {

// Where the relation comes from. Exactly one source is set.
struct DataSource {
  std::string raw_csv;     // signed in memory with the experiment key
  std::string signed_csv;  // macs checked against the key on load
  std::optional<std::size_t> generate_rows;
  std::uint64_t generate_seed = 0;
};

struct SimulationSettings {
  GameForm form = GameForm::SingleCloud;
  Contract contract = Contract::Three;
  AuditAccounting accounting = AuditAccounting::CheaterReimburses;
  std::size_t rounds = 1000;
  std::string query_id;  // empty: the first query
  ServerStrategy strategy = strategy::Honest{};  // single-cloud server
  ServerStrategy s1 = strategy::Honest{};
  ServerStrategy s2 = strategy::Honest{};
  bool modeled_verifier = false;
  std::size_t verifier_k = 1000;
  bool redraw_each_round = false;
};

// A JSON experiment description shared by `simulate` and `roc`. Relative
// paths are resolved against the directory of the config file.
struct ExperimentConfig {
  DataSource data;
  std::optional<std::string> key_hex;
  std::string key_file;
  std::vector<NamedQuery> queries;
  GameConfig game;
  EpsilonPolicy policy;
  std::vector<ServerStrategy> strategies;
  std::vector<std::size_t> k_grid;
  std::vector<double> epsilon_grid;
  std::size_t trials = 100;
  std::optional<std::uint64_t> seed;  // mandatory before a stochastic run
  std::optional<int> workers;
  SimulationSettings simulation;
  std::string out_csv;
  std::string out_summary;
};

ExperimentConfig experiment_from_json(const json& j,
                                      const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::string& path);

// Reads and parses a JSON file; ConfigError on I/O or syntax problems.
json read_json_file(const std::string& path);

// Query list forms: "census", [{"id":..., "query": {...}}, ...] or
// {"file": path} holding either of those.
std::vector<NamedQuery> queries_from_json(const json& j,
                                          const std::filesystem::path& base_dir = {});

// Key precedence: explicit hex, key file, VERIQ_KEY, then a key derived from
// the seed (adequate for synthetic experiments only).
OwnerKey resolve_key(const ExperimentConfig& cfg);
OwnerKey read_key_file(const std::string& path);

SignedRelation load_relation(const ExperimentConfig& cfg, const OwnerKey& key);

const NamedQuery& find_query(const ExperimentConfig& cfg, const std::string& id);

}  // namespace veriq
