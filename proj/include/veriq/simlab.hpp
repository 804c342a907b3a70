#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "veriq/adversary.hpp"
#include "veriq/census.hpp"
#include "veriq/incentives.hpp"
#include "veriq/verifier.hpp"

namespace veriq {

enum class Player { Owner = 0, S1 = 1, S2 = 2 };
inline constexpr std::size_t kPlayers = 3;

// Per-player flows in one round. Cash transfers (payment, fine,
// audit_transfer) sum to zero across players; the rest are own costs/values.
struct PlayerLedger {
  double payment = 0;         // owner -P, server +P
  double fine = 0;            // server -F, owner +F
  double audit_transfer = 0;  // cheater -C(A), owner +C(A)
  double info_value = 0;
  double compute_cost = 0;
  double audit_cost = 0;
  double verify_cost = 0;

  double cash() const { return payment + fine + audit_transfer; }
  double net() const {
    return cash() + info_value - compute_cost - audit_cost - verify_cost;
  }
};

struct RoundOutcome {
  std::size_t round = 0;
  GameForm form = GameForm::SingleCloud;
  Action s1 = Action::Honest;
  Action s2 = Action::Honest;  // two-cloud only
  int primary = 1;             // two-cloud: server asked first
  bool verified = false;       // single-cloud: owner ran V
  bool duplicated = false;     // two-cloud: query also sent to the other server
  bool mismatch = false;
  std::optional<Decision> verdict;
  bool audit_run = false;
  std::optional<AuditVerdict> audit;  // single-cloud exact audit
  bool flagged_s1 = false;            // caught and fined
  bool flagged_s2 = false;
  std::array<PlayerLedger, kPlayers> ledger{};

  double net(Player p) const { return ledger[static_cast<int>(p)].net(); }
  // Sum of cash transfers over all players; zero for a consistent round.
  double cash_imbalance() const;
};

struct TrialSummary {
  std::size_t rounds = 0;
  std::array<double, kPlayers> mean_payoff{};
  std::array<double, kPlayers> std_error{};
  std::size_t verified_rounds = 0;    // single: V ran; two: duplicated
  std::size_t mismatches = 0;
  std::size_t escalations = 0;
  std::size_t audits = 0;
  std::size_t detections = 0;         // rounds where a cheater was fined
  std::size_t honest_verified = 0, honest_escalated = 0;
  std::size_t cheat_verified = 0, cheat_escalated = 0;
  double p_fn = 0;  // honest_escalated / honest_verified
  double p_tn = 0;  // cheat_escalated / cheat_verified
};

struct SimulationResult {
  TrialSummary summary;
  std::vector<RoundOutcome> rounds;  // empty unless keep_rounds
};

// Local verification backed by a real owner sketch of size k. The sketch is
// drawn once per run unless redraw_each_round is set.
struct SketchVerifier {
  EpsilonPolicy policy;
  std::size_t k = 1000;
  bool redraw_each_round = false;
};
// Verdicts drawn from the configured error rates (p_fn for honest claims,
// p_tn for cheats); audits still run on the actual claim.
struct ModeledVerifier {};
using VerifierModel = std::variant<SketchVerifier, ModeledVerifier>;

struct SingleCloudRun {
  GameConfig config;
  ServerStrategy strategy = strategy::Honest{};
  VerifierModel verifier = SketchVerifier{};
  std::size_t rounds = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  bool keep_rounds = true;
};

struct TwoCloudRun {
  GameConfig config;
  ServerStrategy s1 = strategy::Honest{};
  ServerStrategy s2 = strategy::Honest{};
  Contract contract = Contract::One;
  AuditAccounting accounting = AuditAccounting::CheaterReimburses;
  std::size_t rounds = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  bool keep_rounds = true;
};

// Contract 3 single-cloud game. Round r uses the stream derive(seed, r), so
// the ledger is identical for any worker count.
SimulationResult run_single_cloud(const SignedRelation& relation,
                                  const Query& query, const OwnerKey& key,
                                  const SingleCloudRun& run);

// Two-cloud game under Contract 1 or 2.
SimulationResult run_two_cloud(const SignedRelation& relation,
                               const Query& query, const OwnerKey& key,
                               const TwoCloudRun& run);

TrialSummary summarize(std::span<const RoundOutcome> rounds);

void write_rounds_csv(const std::string& path,
                      std::span<const RoundOutcome> rounds);

// ---- ROC harness ----

struct RocPoint {
  std::string query_id;
  std::size_t k = 0;
  std::string cheat_kind;
  double cheat_param = 0;
  double epsilon = 0;
  double p_fn = 0;
  double p_tn = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kRocCsvHeader =
    "query_id,k,cheat_kind,cheat_param,epsilon,p_fn,p_tn,trials,seed";

struct RocSweepConfig {
  std::vector<NamedQuery> queries;
  std::vector<std::size_t> k_grid;
  std::vector<ServerStrategy> strategies;
  std::vector<double> epsilon_grid;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  int workers = 1;
};

// 21 relative values evenly spaced on [0, 0.5].
std::vector<double> default_epsilon_grid();
std::vector<std::size_t> desk_scale_k_grid();
// Sample cheaters at the desk-scale k values plus Laplace d in {5,10,20,50}.
std::vector<ServerStrategy> desk_scale_strategies();

// One RocPoint per (query, k, strategy, epsilon), in that nesting order.
// For a fixed (query, k, trial) every strategy is checked against the same
// owner sketch, and all cheaters share one random stream.
std::vector<RocPoint> roc_sweep(const SignedRelation& relation,
                                const OwnerKey& key, const RocSweepConfig& cfg);

// Trapezoidal area under (p_fn, p_tn) points anchored at (0,0) and (1,1).
double roc_auc(std::span<const RocPoint> cell);

struct RocCell {
  std::string query_id;
  std::size_t k = 0;
  std::string cheat_kind;
  double cheat_param = 0;
  std::vector<RocPoint> points;
  double auc = 0;
};

std::vector<RocCell> group_roc_cells(std::span<const RocPoint> points);

void write_roc_csv(const std::string& path, std::span<const RocPoint> points);
std::string format_roc_row(const RocPoint& p);

}  // namespace veriq
