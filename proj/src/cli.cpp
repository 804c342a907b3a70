#include "veriq/cli.hpp"

#include <CLI11.hpp>
#include <openssl/rand.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "veriq/census.hpp"
#include "veriq/error.hpp"
#include "veriq/experiment.hpp"
#include "veriq/kernels.hpp"

namespace veriq::cli {

namespace {

std::string num(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, end);
}

// Fixed six significant digits for human-facing estimates.
std::string approx(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
  (void)ec;
  return std::string(buf, end);
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<int> workers;
  bool json = false;
};

void add_json(CLI::App* sub, Common& c) {
  sub->add_flag("--json", c.json, "Machine-readable output");
}
void add_workers(CLI::App* sub, Common& c) {
  sub->add_option("--workers", c.workers, "Worker threads (default: VERIQ_WORKERS)")
      ->check(CLI::PositiveNumber);
}

int resolve_workers(const std::optional<int>& flag, const std::optional<int>& config) {
  if (flag) return *flag;
  if (std::getenv("VERIQ_WORKERS")) return kernels::default_workers();
  if (config) return *config;
  return kernels::default_workers();
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& flag,
                           const std::optional<std::uint64_t>& config) {
  if (flag) return *flag;
  if (config) return *config;
  throw ConfigError("a seed is required (--seed or \"seed\" in the config)");
}

OwnerKey key_from_flags(const std::string& key_file) {
  if (!key_file.empty()) return read_key_file(key_file);
  if (const char* env = std::getenv("VERIQ_KEY"); env && *env) {
    try {
      return OwnerKey::from_hex(env);
    } catch (const Error& e) {
      throw ConfigError(std::string("VERIQ_KEY: ") + e.what());
    }
  }
  throw ConfigError("an owner key is required (--key-file or VERIQ_KEY)");
}

bool looks_signed(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  return header.rfind("id,", 0) == 0 && header.size() >= 4 &&
         header.compare(header.size() - 4, 4, ",mac") == 0;
}

// Signed files keep their macs (checked when a key is available); raw files
// are signed in memory.
SignedRelation load_any(const std::string& path, const std::optional<OwnerKey>& key) {
  if (looks_signed(path)) return read_signed_csv(path, key ? &*key : nullptr);
  const RawTable t = read_raw_csv(path);
  return sign_relation(t.schema, t.rows, key ? *key : OwnerKey::derived(0));
}

std::optional<OwnerKey> optional_key(const std::string& key_file) {
  if (!key_file.empty() || (std::getenv("VERIQ_KEY") && *std::getenv("VERIQ_KEY")))
    return key_from_flags(key_file);
  return std::nullopt;
}

Query load_query(const std::string& query_file, const std::string& census_id) {
  if (!query_file.empty() == !census_id.empty())
    throw ConfigError("give exactly one of --query or --census");
  if (!census_id.empty()) {
    for (const auto& nq : census_archetype_queries())
      if (nq.id == census_id) return nq.query;
    throw ConfigError("unknown census query '" + census_id + "' (q1..q8)");
  }
  const json j = read_json_file(query_file);
  if (j.is_array()) {
    const auto list = queries_from_json(j);
    return list.front().query;
  }
  return query_from_json(j);
}

GameConfig load_game(const std::string& path) {
  const json j = read_json_file(path);
  return game_config_from_json(j.contains("game") ? j.at("game") : j);
}

void print_report(std::ostream& out, const RationalityReport& r) {
  std::size_t width = 0;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  for (const auto& c : r.checks)
    out << "  " << std::left << std::setw(static_cast<int>(width)) << c.name << "  "
        << (c.pass ? "ok  " : "FAIL") << "  margin " << num(c.margin) << '\n';
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

// ---- subcommands ----

int cmd_gen_data(std::ostream& out, std::size_t rows, const Common& c) {
  const std::uint64_t seed = require_seed(c.seed, std::nullopt);
  if (c.out.empty()) throw ConfigError("--out is required");
  const RawTable t = gen_census_like(rows, seed);
  write_raw_csv(c.out, t);
  if (c.json)
    out << json{{"rows", rows}, {"seed", seed}, {"out", c.out}}.dump() << '\n';
  else
    out << "wrote " << rows << " rows to " << c.out << '\n';
  return kExitOk;
}

int cmd_sign(std::ostream& out, const std::string& in_path, const std::string& key_file,
             const std::string& new_key, const Common& c) {
  if (c.out.empty()) throw ConfigError("--out is required");
  std::optional<OwnerKey> key;
  if (!new_key.empty()) {
    std::vector<std::uint8_t> bytes(32);
    if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1)
      throw Error("could not obtain random key bytes");
    std::ofstream f(new_key, std::ios::binary);
    if (!f) throw Error("cannot open '" + new_key + "' for writing");
    f << to_hex(bytes) << '\n';
    key.emplace(std::move(bytes));
  } else {
    key.emplace(key_from_flags(key_file));
  }
  const RawTable t = read_raw_csv(in_path);
  const SignedRelation rel = sign_relation(t.schema, t.rows, *key);
  write_signed_csv(c.out, rel);
  if (c.json)
    out << json{{"rows", rel.size()}, {"out", c.out}}.dump() << '\n';
  else
    out << "signed " << rel.size() << " tuples into " << c.out << '\n';
  return kExitOk;
}

int cmd_query(std::ostream& out, const std::string& data, const std::string& query_file,
              const std::string& census_id, const std::string& key_file, const Common& c) {
  const Query q = load_query(query_file, census_id);
  const SignedRelation rel = load_any(data, optional_key(key_file));
  q.validate(rel.schema());
  const QueryResult r = eval_exact(rel, q);
  if (c.json) {
    out << to_json(r).dump() << '\n';
    return kExitOk;
  }
  if (r.is_selection()) {
    out << r.tuples.size() << " matching tuples\n";
    for (const auto& t : r.tuples) {
      out << t.id;
      for (Value v : t.values) out << ',' << v;
      out << '\n';
    }
  } else {
    out << to_string(r.kind) << ' ' << num(r.value) << '\n';
  }
  return kExitOk;
}

int cmd_verify(std::ostream& out, const std::string& data, const std::string& query_file,
               const std::string& census_id, const std::string& key_file,
               std::optional<double> claim, std::size_t k, double epsilon, double floor,
               const Common& c) {
  const OwnerKey key = key_from_flags(key_file);
  if (query_file.empty() && census_id.empty()) {
    // Integrity check of the whole file.
    const SignedRelation rel = read_signed_csv(data, &key);
    if (c.json)
      out << json{{"tuples", rel.size()}, {"macs", "ok"}}.dump() << '\n';
    else
      out << "all " << rel.size() << " macs verify\n";
    return kExitOk;
  }
  if (!claim) throw ConfigError("--claim is required when verifying a query result");
  const std::uint64_t seed = require_seed(c.seed, std::nullopt);
  const Query q = load_query(query_file, census_id);
  if (!q.is_aggregate())
    throw ConfigError("verify checks aggregate claims; selections are checked by audit");
  const SignedRelation rel = read_signed_csv(data, &key);
  q.validate(rel.schema());
  const EpsilonPolicy policy{epsilon, floor};
  try {
    policy.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  const SampleSketch sketch = draw_sketch(rel, k, seed);
  const Verdict v = local_verify_aggregate(rel.schema(), sketch, q, *claim, policy);
  if (c.json) {
    out << to_json(v).dump() << '\n';
  } else {
    out << to_string(v.decision);
    if (v.estimate) out << " (estimate " << num(*v.estimate) << ", claim " << num(*claim) << ')';
    if (!v.accepted()) out << " reason " << to_string(v.reason);
    out << '\n';
  }
  return kExitOk;
}

int cmd_alpha(std::ostream& out, const std::string& form, int contract_n,
              const std::string& accounting, std::optional<double> alpha,
              const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  GameConfig g = load_game(c.config);
  if (alpha) g.alpha = *alpha;
  const AuditAccounting acc = accounting_from_string(accounting);
  if (form == "single" || form == "two")
    validate(g, form == "single" ? GameForm::SingleCloud : GameForm::TwoCloud);

  if (form == "single") {
    const SingleCloudThreshold t = alpha_threshold_single_cloud(g);
    const RationalityReport rep = check_rationality(g, g.alpha, GameForm::SingleCloud,
                                                    Contract::Three);
    if (c.json) {
      out << json{{"form", "single"},
                  {"contract", 3},
                  {"threshold", t.value},
                  {"feasible", t.feasible},
                  {"report", to_json(rep)}}
                 .dump(2)
          << '\n';
    } else {
      out << num(t.value) << '\n';
      out << "single-cloud threshold on alpha (contract 3)"
          << (t.feasible ? "" : "; above 1, so no alpha deters cheating") << '\n';
      out << "rationality at alpha = " << num(g.alpha) << ":\n";
      print_report(out, rep);
    }
    return kExitOk;
  }

  if (contract_n != 1 && contract_n != 2)
    throw ConfigError("two-cloud contract must be 1 or 2");
  const Contract contract = static_cast<Contract>(contract_n);
  const double threshold = alpha_threshold_two_cloud(g, contract, acc);
  const double closed_form = alpha_threshold_two_cloud(
      g.gain(), effective_two_cloud_fine(g, contract, acc), g.price);
  const double practical = alpha_practical_two_cloud(g.price, g.fine);
  const double uniform = alpha_uniform_two_cloud(g.price, g.fine);
  const RationalityReport rep = check_rationality(g, g.alpha, GameForm::TwoCloud, contract);
  if (c.json) {
    out << json{{"form", "two"},
                {"contract", contract_n},
                {"accounting", to_string(acc)},
                {"threshold", threshold},
                {"closed_form", closed_form},
                {"practical", practical},
                {"uniform", uniform},
                {"report", to_json(rep)}}
               .dump(2)
        << '\n';
  } else {
    out << num(threshold) << '\n';
    out << "two-cloud threshold on alpha (contract " << contract_n << ")\n";
    out << "closed form G/(2F+2P+G): " << num(closed_form) << '\n';
    out << "practical bound with G = P: " << num(practical) << '\n';
    out << "alpha deterring every G <= P: " << num(uniform) << '\n';
    out << "rationality at alpha = " << num(g.alpha) << ":\n";
    print_report(out, rep);
  }
  return kExitOk;
}

int cmd_simulate(std::ostream& out, std::optional<std::size_t> rounds,
                 std::optional<double> alpha, const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_experiment(c.config);
  const std::uint64_t seed = require_seed(c.seed, cfg.seed);
  cfg.seed = seed;
  if (alpha) cfg.game.alpha = *alpha;
  const auto& sim = cfg.simulation;
  const std::string csv = c.out.empty() ? cfg.out_csv : c.out;
  const OwnerKey key = resolve_key(cfg);
  const SignedRelation rel = load_relation(cfg, key);
  const NamedQuery& nq = find_query(cfg, sim.query_id);
  const int workers = resolve_workers(c.workers, cfg.workers);

  SimulationResult result;
  if (sim.form == GameForm::SingleCloud) {
    SingleCloudRun run;
    run.config = cfg.game;
    run.strategy = sim.strategy;
    if (sim.modeled_verifier)
      run.verifier = ModeledVerifier{};
    else
      run.verifier = SketchVerifier{cfg.policy, sim.verifier_k, sim.redraw_each_round};
    run.rounds = rounds.value_or(sim.rounds);
    run.seed = seed;
    run.workers = workers;
    run.keep_rounds = !csv.empty();
    result = run_single_cloud(rel, nq.query, key, run);
  } else {
    TwoCloudRun run;
    run.config = cfg.game;
    run.s1 = sim.s1;
    run.s2 = sim.s2;
    run.contract = sim.contract;
    run.accounting = sim.accounting;
    run.rounds = rounds.value_or(sim.rounds);
    run.seed = seed;
    run.workers = workers;
    run.keep_rounds = !csv.empty();
    result = run_two_cloud(rel, nq.query, key, run);
  }
  if (!csv.empty()) write_rounds_csv(csv, result.rounds);

  json summary = to_json(result.summary);
  summary["query_id"] = nq.id;
  summary["seed"] = seed;
  summary["form"] = sim.form == GameForm::TwoCloud ? "two" : "single";
  summary["contract"] = static_cast<int>(sim.contract);
  if (!cfg.out_summary.empty()) write_json_file(cfg.out_summary, summary);

  if (c.json) {
    out << summary.dump(2) << '\n';
    return kExitOk;
  }
  const auto& s = result.summary;
  out << s.rounds << " rounds, query " << nq.id << ", seed " << seed << '\n';
  const char* names[] = {"owner", "s1", "s2"};
  const std::size_t players = sim.form == GameForm::TwoCloud ? 3 : 2;
  for (std::size_t p = 0; p < players; ++p)
    out << "  " << std::left << std::setw(6) << names[p] << "mean " << approx(s.mean_payoff[p])
        << " +/- " << approx(s.std_error[p]) << '\n';
  out << "  verified " << s.verified_rounds << ", escalations " << s.escalations
      << ", audits " << s.audits << ", detections " << s.detections << '\n';
  if (!csv.empty()) out << "rounds written to " << csv << '\n';
  return kExitOk;
}

int cmd_roc(std::ostream& out, const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_experiment(c.config);
  const std::uint64_t seed = require_seed(c.seed, cfg.seed);
  cfg.seed = seed;
  const std::string csv = c.out.empty() ? cfg.out_csv : c.out;
  if (csv.empty()) throw ConfigError("--out (or outputs.csv in the config) is required");
  const OwnerKey key = resolve_key(cfg);
  const SignedRelation rel = load_relation(cfg, key);

  RocSweepConfig sweep;
  sweep.queries = cfg.queries;
  sweep.k_grid = cfg.k_grid;
  sweep.strategies = cfg.strategies;
  sweep.epsilon_grid = cfg.epsilon_grid;
  sweep.trials = c.trials.value_or(cfg.trials);
  sweep.seed = seed;
  sweep.workers = resolve_workers(c.workers, cfg.workers);
  const auto points = roc_sweep(rel, key, sweep);
  write_roc_csv(csv, points);

  const auto cells = group_roc_cells(points);
  json jcells = json::array();
  for (const auto& cell : cells)
    jcells.push_back({{"query_id", cell.query_id},
                      {"k", cell.k},
                      {"cheat_kind", cell.cheat_kind},
                      {"cheat_param", cell.cheat_param},
                      {"auc", cell.auc}});
  json summary{{"points", points.size()}, {"seed", seed}, {"trials", sweep.trials},
               {"csv", csv}, {"cells", jcells}};
  if (!cfg.out_summary.empty()) write_json_file(cfg.out_summary, summary);

  if (c.json) {
    out << summary.dump(2) << '\n';
    return kExitOk;
  }
  out << points.size() << " points written to " << csv << '\n';
  out << "query     k  cheat       auc\n";
  for (const auto& cell : cells)
    out << std::left << std::setw(6) << cell.query_id << std::right << std::setw(5)
        << cell.k << "  " << std::left << std::setw(8)
        << (cell.cheat_kind + ':' + num(cell.cheat_param)) << "  " << std::fixed
        << std::setprecision(3) << cell.auc << std::defaultfloat << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification and incentive toolkit for outsourced query results", "veriq"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  Common c;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic census-like CSV");
  std::size_t rows = 0;
  gen->add_option("--rows", rows, "Row count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", c.seed, "Random seed")->required();
  gen->add_option("--out", c.out, "Output CSV")->required();
  add_json(gen, c);

  auto* sign = app.add_subcommand("sign", "Attach a mac to every tuple of a CSV");
  std::string in_path, key_file, new_key;
  sign->add_option("--in", in_path, "Raw CSV")->required()->check(CLI::ExistingFile);
  sign->add_option("--out", c.out, "Signed CSV")->required();
  sign->add_option("--key-file", key_file, "Owner key (hex); default VERIQ_KEY");
  sign->add_option("--new-key", new_key, "Generate a fresh random key into this file");
  add_json(sign, c);

  auto* query = app.add_subcommand("query", "Evaluate a query exactly");
  std::string data, query_file, census_id;
  query->add_option("--data", data, "Raw or signed CSV")->required()->check(CLI::ExistingFile);
  query->add_option("--query", query_file, "Query JSON")->check(CLI::ExistingFile);
  query->add_option("--census", census_id, "Built-in census query q1..q8");
  query->add_option("--key-file", key_file, "Check macs with this key");
  add_json(query, c);

  auto* verify = app.add_subcommand(
      "verify", "Check macs, or locally verify a claimed aggregate against a sketch");
  std::optional<double> claim;
  std::size_t k = 1000;
  double epsilon = 0.05, floor = 0;
  verify->add_option("--data", data, "Signed CSV")->required()->check(CLI::ExistingFile);
  verify->add_option("--key-file", key_file, "Owner key (hex); default VERIQ_KEY");
  verify->add_option("--query", query_file, "Query JSON")->check(CLI::ExistingFile);
  verify->add_option("--census", census_id, "Built-in census query q1..q8");
  verify->add_option("--claim", claim, "Claimed aggregate value");
  verify->add_option("--k", k, "Sketch size")->check(CLI::PositiveNumber);
  verify->add_option("--epsilon", epsilon, "Relative tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--floor", floor, "Absolute tolerance for a zero estimate");
  verify->add_option("--seed", c.seed, "Sketch seed");
  add_json(verify, c);

  auto* alpha = app.add_subcommand("alpha", "Deterrence threshold on alpha");
  std::string form;
  int contract = 1;
  std::string accounting = "cheater_reimburses";
  std::optional<double> alpha_value;
  alpha->add_option("form", form, "two | single")
      ->required()
      ->check(CLI::IsMember({"two", "single"}));
  alpha->add_option("--config", c.config, "Game config JSON")->required()->check(CLI::ExistingFile);
  alpha->add_option("--contract", contract, "Two-cloud contract (1 or 2)");
  alpha->add_option("--accounting", accounting, "owner_bears | cheater_reimburses");
  alpha->add_option("--alpha", alpha_value, "Alpha for the rationality report");
  add_json(alpha, c);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run of a game");
  std::optional<std::size_t> rounds;
  simulate->add_option("--config", c.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", c.out, "Per-round CSV");
  simulate->add_option("--seed", c.seed, "Master seed");
  simulate->add_option("--rounds", rounds, "Override the round count");
  simulate->add_option("--alpha", alpha_value, "Override alpha");
  add_workers(simulate, c);
  add_json(simulate, c);

  auto* roc = app.add_subcommand("roc", "Error-rate sweep over epsilon");
  roc->add_option("--config", c.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  roc->add_option("--out", c.out, "RocPoint CSV");
  roc->add_option("--seed", c.seed, "Master seed");
  roc->add_option("--trials", c.trials, "Trials per cell")->check(CLI::PositiveNumber);
  add_workers(roc, c);
  add_json(roc, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_data(out, rows, c);
    if (*sign) return cmd_sign(out, in_path, key_file, new_key, c);
    if (*query) return cmd_query(out, data, query_file, census_id, key_file, c);
    if (*verify)
      return cmd_verify(out, data, query_file, census_id, key_file, claim, k, epsilon,
                        floor, c);
    if (*alpha) return cmd_alpha(out, form, contract, accounting, alpha_value, c);
    if (*simulate) return cmd_simulate(out, rounds, alpha_value, c);
    if (*roc) return cmd_roc(out, c);
  } catch (const ConfigError& e) {
    err << "veriq: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "veriq: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace veriq::cli
