#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "veriq/adversary.hpp"
#include "veriq/authstore.hpp"
#include "veriq/incentives.hpp"
#include "veriq/queryeng.hpp"

namespace veriq {

// epsilon is relative to the sketch estimate; absolute_floor only applies
// when the estimate is exactly zero.
struct EpsilonPolicy {
  double relative = 0.05;
  double absolute_floor = 0.0;

  void validate() const;
};

enum class Decision { Accept, Escalate };

enum class EscalationReason {
  None,
  Deviation,          // |claim - estimate| beyond epsilon
  UndefinedEstimate,  // Avg/StdDev with no sketch matches
  MacFailure,         // claimed tuple fails its mac
  PredicateViolation, // claimed tuple does not satisfy the predicate
  TooFewTuples,       // selection smaller than estimate - epsilon
};

const char* to_string(Decision d);
const char* to_string(EscalationReason r);

struct Verdict {
  Decision decision = Decision::Accept;
  std::optional<double> estimate;
  EscalationReason reason = EscalationReason::None;
  // MacFailure / PredicateViolation are proof of cheating on their own.
  bool direct_evidence = false;
  std::optional<TupleId> evidence_id;

  bool accepted() const { return decision == Decision::Accept; }
};

// The acceptance region for aggregates.
bool within_epsilon(double estimate, double claimed, const EpsilonPolicy& policy);
// The acceptance rule for selection sizes.
bool selection_size_ok(double estimated_size, std::size_t claimed_size,
                       const EpsilonPolicy& policy);

Verdict local_verify_aggregate(const Schema& schema, const SampleSketch& sketch,
                               const Query& query, double claimed,
                               const EpsilonPolicy& policy);

Verdict local_verify_selection(const Schema& schema, const SampleSketch& sketch,
                               const Query& query,
                               std::span<const SignedTuple> claimed,
                               const EpsilonPolicy& policy, const OwnerKey& key);

enum class AuditVerdict { Honest, Cheat };
const char* to_string(AuditVerdict v);

// Count/Sum compared exactly, Avg/StdDev within 1e-9 relative, selections as
// id sets.
bool results_equal(const QueryResult& a, const QueryResult& b);

struct AuditOptions {
  // Verify every mac of the retrieved relation first (TamperError on failure).
  bool verify_macs = true;
  // Reuse an already computed exact result.
  const QueryResult* exact = nullptr;
};

AuditVerdict audit_exact(const SignedRelation& relation, const Query& query,
                         const QueryResult& claimed, const OwnerKey& key,
                         const AuditOptions& options = {});

struct CheaterSet {
  bool a = false;
  bool b = false;
  std::vector<std::string> reasons_a;
  std::vector<std::string> reasons_b;

  bool empty() const { return !a && !b; }
};

// Two-cloud "show your work" audit over mismatched responses. Throws
// NoMismatchError when the claims agree. verify_macs may be turned off only
// when every shown tuple is known to come from an already verified relation.
CheaterSet show_work_audit(const Schema& schema, const Query& query,
                           const ServerResponse& a, const ServerResponse& b,
                           const OwnerKey& key, bool verify_macs = true);

// 2 exp(-2 eps^2 / sum c_i^2), unclamped.
double mcdiarmid_bound_raw(double epsilon, std::span<const double> influence);
// Same, clamped to [0, 1] for reporting.
double mcdiarmid_bound(double epsilon, std::span<const double> influence);
// k identical influences c_i.
double mcdiarmid_bound_uniform_raw(std::size_t k, double epsilon, double c_i);

// ln(2/delta) / (2 eps_rel^2): the sample size per (c_tuple / result)^2.
double sample_size_coefficient(double relative_epsilon, double delta);

// Smallest k with 2 exp(-2 eps_abs^2 k / c_tuple^2) <= delta, for mean-type
// statistics whose per-draw influence is c_tuple / k.
std::size_t solve_sample_size_abs(double epsilon_abs, double delta,
                                  double c_tuple);
// epsilon_abs = relative_epsilon * |reference|.
std::size_t solve_sample_size(double relative_epsilon, double reference,
                              double delta, double c_tuple);

struct ErrorRateRun {
  std::size_t trials = 100;
  std::size_t verifier_k = 1000;
  std::uint64_t sketch_seed = 0;  // owner sketch for trial t: derive(sketch_seed, t)
  std::uint64_t cheat_seed = 0;   // cheater stream for trial t: derive(cheat_seed, t)
  double absolute_floor = 0.0;
  int workers = 1;
};

// One ErrorRates per epsilon. Each trial draws a fresh owner sketch, checks
// the honest (exact) claim and one cheating claim against every epsilon.
std::vector<ErrorRates> error_rate_curve(const SignedRelation& relation,
                                         const Query& query,
                                         std::span<const double> epsilons,
                                         const ServerStrategy& cheat,
                                         const ErrorRateRun& run,
                                         const OwnerKey& key,
                                         const GameConfig& config = {});

ErrorRates estimate_error_rates(const SignedRelation& relation,
                                const Query& query, const EpsilonPolicy& policy,
                                std::size_t verifier_k,
                                const ServerStrategy& cheat, std::size_t trials,
                                std::uint64_t seed, const OwnerKey& key,
                                int workers = 1);

}  // namespace veriq
