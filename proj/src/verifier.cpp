#include "veriq/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "veriq/error.hpp"
#include "veriq/kernels.hpp"
#include "veriq/rng.hpp"

namespace veriq {

void EpsilonPolicy::validate() const {
  if (!(relative >= 0) || !std::isfinite(relative))
    throw ParameterError("relative epsilon must be a finite value >= 0");
  if (!(absolute_floor >= 0) || !std::isfinite(absolute_floor))
    throw ParameterError("absolute floor must be a finite value >= 0");
}

const char* to_string(Decision d) {
  return d == Decision::Accept ? "accept" : "escalate";
}

const char* to_string(EscalationReason r) {
  switch (r) {
    case EscalationReason::None: return "none";
    case EscalationReason::Deviation: return "deviation";
    case EscalationReason::UndefinedEstimate: return "undefined_estimate";
    case EscalationReason::MacFailure: return "mac_failure";
    case EscalationReason::PredicateViolation: return "predicate_violation";
    case EscalationReason::TooFewTuples: return "too_few_tuples";
  }
  return "?";
}

const char* to_string(AuditVerdict v) {
  return v == AuditVerdict::Honest ? "honest" : "cheat";
}

bool within_epsilon(double estimate, double claimed,
                    const EpsilonPolicy& policy) {
  if (estimate == 0.0) return std::fabs(claimed) <= policy.absolute_floor;
  return std::fabs(claimed - estimate) <= policy.relative * std::fabs(estimate);
}

bool selection_size_ok(double estimated_size, std::size_t claimed_size,
                       const EpsilonPolicy& policy) {
  const double claimed = static_cast<double>(claimed_size);
  // More tuples than expected cannot be wrong: every one is authenticated.
  if (claimed >= estimated_size) return true;
  return claimed >= estimated_size - policy.relative * estimated_size;
}

Verdict local_verify_aggregate(const Schema& schema, const SampleSketch& sketch,
                               const Query& query, double claimed,
                               const EpsilonPolicy& policy) {
  policy.validate();
  if (!query.is_aggregate())
    throw ParameterError("local_verify_aggregate needs an aggregate query");
  Verdict v;
  v.estimate = estimate_from_sketch(schema, sketch, query);
  if (!v.estimate) {
    v.decision = Decision::Escalate;
    v.reason = EscalationReason::UndefinedEstimate;
    return v;
  }
  if (!within_epsilon(*v.estimate, claimed, policy)) {
    v.decision = Decision::Escalate;
    v.reason = EscalationReason::Deviation;
  }
  return v;
}

namespace {

struct Evidence {
  EscalationReason reason = EscalationReason::None;
  TupleId id = 0;
};

Evidence selection_evidence(const CompiledPredicate& predicate,
                            std::span<const SignedTuple> claimed,
                            const OwnerKey& key) {
  for (const auto& t : claimed) {
    if (!verify_tuple(t, key)) return {EscalationReason::MacFailure, t.id};
    if (!predicate.matches(t.values))
      return {EscalationReason::PredicateViolation, t.id};
  }
  return {};
}

}  // namespace

Verdict local_verify_selection(const Schema& schema, const SampleSketch& sketch,
                               const Query& query,
                               std::span<const SignedTuple> claimed,
                               const EpsilonPolicy& policy, const OwnerKey& key) {
  policy.validate();
  if (query.kind != QueryKind::Select)
    throw ParameterError("local_verify_selection needs a select query");
  Verdict v;
  v.estimate = estimate_from_sketch(schema, sketch, query);
  const CompiledPredicate predicate(query.predicate, schema);
  const Evidence ev = selection_evidence(predicate, claimed, key);
  if (ev.reason != EscalationReason::None) {
    v.decision = Decision::Escalate;
    v.reason = ev.reason;
    v.direct_evidence = true;
    v.evidence_id = ev.id;
    return v;
  }
  if (!selection_size_ok(*v.estimate, claimed.size(), policy)) {
    v.decision = Decision::Escalate;
    v.reason = EscalationReason::TooFewTuples;
  }
  return v;
}

namespace {

bool values_equal(QueryKind kind, double a, double b) {
  if (kind == QueryKind::Avg || kind == QueryKind::StdDev)
    return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
  return a == b;
}

std::vector<TupleId> sorted_ids(std::span<const SignedTuple> tuples) {
  std::vector<TupleId> ids;
  ids.reserve(tuples.size());
  for (const auto& t : tuples) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

bool results_equal(const QueryResult& a, const QueryResult& b) {
  if (a.is_selection() != b.is_selection()) return false;
  if (a.is_selection()) return sorted_ids(a.tuples) == sorted_ids(b.tuples);
  return values_equal(a.kind, a.value, b.value);
}

AuditVerdict audit_exact(const SignedRelation& relation, const Query& query,
                         const QueryResult& claimed, const OwnerKey& key,
                         const AuditOptions& options) {
  if (options.verify_macs) verify_relation(relation, key);
  const QueryResult exact =
      options.exact ? *options.exact : eval_exact(relation, query);
  return results_equal(exact, claimed) ? AuditVerdict::Honest
                                       : AuditVerdict::Cheat;
}

namespace {

struct ShownWork {
  std::size_t authenticated_matches = 0;
  std::vector<std::string> reasons;
};

ShownWork inspect_work(const Schema& schema, const CompiledPredicate& predicate,
                       const Query& query, const ServerResponse& r,
                       const OwnerKey& key, bool verify_macs) {
  ShownWork w;
  const auto& tuples = query.is_aggregate() ? r.work : r.claim.tuples;
  std::unordered_set<TupleId> seen;
  seen.reserve(tuples.size());
  for (const auto& t : tuples) {
    const auto id = [&] { return std::to_string(t.id); };
    if (verify_macs && !verify_tuple(t, key)) {
      w.reasons.push_back("tuple " + id() + " fails mac verification");
      continue;
    }
    if (!seen.insert(t.id).second) {
      w.reasons.push_back("tuple " + id() + " returned more than once");
      continue;
    }
    if (!predicate.matches(t.values)) {
      w.reasons.push_back("tuple " + id() + " does not match the query");
      continue;
    }
    ++w.authenticated_matches;
  }
  if (query.is_aggregate()) {
    const auto recomputed = aggregate_over(schema, tuples, query);
    if (!recomputed || !values_equal(query.kind, r.claim.value, *recomputed))
      w.reasons.push_back(
          "claimed aggregate does not match its own returned tuples");
  }
  return w;
}

}  // namespace

CheaterSet show_work_audit(const Schema& schema, const Query& query,
                           const ServerResponse& a, const ServerResponse& b,
                           const OwnerKey& key, bool verify_macs) {
  if (results_equal(a.claim, b.claim))
    throw NoMismatchError("show-work audit needs mismatched claims");
  const CompiledPredicate predicate(query.predicate, schema);
  auto wa = inspect_work(schema, predicate, query, a, key, verify_macs);
  auto wb = inspect_work(schema, predicate, query, b, key, verify_macs);
  if (wa.authenticated_matches < wb.authenticated_matches)
    wa.reasons.push_back("returned fewer authenticated matching tuples");
  if (wb.authenticated_matches < wa.authenticated_matches)
    wb.reasons.push_back("returned fewer authenticated matching tuples");

  CheaterSet out;
  out.a = !wa.reasons.empty();
  out.b = !wb.reasons.empty();
  out.reasons_a = std::move(wa.reasons);
  out.reasons_b = std::move(wb.reasons);
  return out;
}

double mcdiarmid_bound_raw(double epsilon, std::span<const double> influence) {
  if (influence.empty())
    throw InvalidInfluenceError("McDiarmid bound needs k >= 1 influences");
  if (!(epsilon >= 0)) throw ParameterError("epsilon must be >= 0");
  double sum_sq = 0;
  for (double c : influence) {
    if (!(c > 0)) throw InvalidInfluenceError("every influence c_i must be > 0");
    sum_sq += c * c;
  }
  return 2.0 * std::exp(-2.0 * epsilon * epsilon / sum_sq);
}

double mcdiarmid_bound(double epsilon, std::span<const double> influence) {
  return std::clamp(mcdiarmid_bound_raw(epsilon, influence), 0.0, 1.0);
}

double mcdiarmid_bound_uniform_raw(std::size_t k, double epsilon, double c_i) {
  if (k == 0) throw InvalidInfluenceError("McDiarmid bound needs k >= 1");
  if (!(c_i > 0)) throw InvalidInfluenceError("influence c_i must be > 0");
  if (!(epsilon >= 0)) throw ParameterError("epsilon must be >= 0");
  const double sum_sq = static_cast<double>(k) * c_i * c_i;
  return 2.0 * std::exp(-2.0 * epsilon * epsilon / sum_sq);
}

double sample_size_coefficient(double relative_epsilon, double delta) {
  if (!(relative_epsilon > 0))
    throw UnboundedSampleSizeError("epsilon = 0 needs an unbounded sample");
  if (!(delta > 0 && delta < 1)) throw ParameterError("delta must be in (0, 1)");
  return std::log(2.0 / delta) / (2.0 * relative_epsilon * relative_epsilon);
}

std::size_t solve_sample_size_abs(double epsilon_abs, double delta,
                                  double c_tuple) {
  if (epsilon_abs == 0)
    throw UnboundedSampleSizeError("epsilon = 0 needs an unbounded sample");
  if (!(epsilon_abs > 0)) throw ParameterError("epsilon must be > 0");
  if (!(delta > 0 && delta < 1)) throw ParameterError("delta must be in (0, 1)");
  if (!(c_tuple > 0)) throw InvalidInfluenceError("c_tuple must be > 0");

  const double ratio = c_tuple / epsilon_abs;
  const double x = ratio * ratio * std::log(2.0 / delta) / 2.0;
  if (!(x < 9.0e15))
    throw UnboundedSampleSizeError("required sample size exceeds 2^53");
  auto bound_at = [&](std::size_t k) {
    return 2.0 * std::exp(-2.0 * static_cast<double>(k) / (ratio * ratio));
  };
  std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x)));
  // Settle rounding at the boundary against the bound itself.
  while (k > 1 && bound_at(k - 1) <= delta) --k;
  while (bound_at(k) > delta) ++k;
  return k;
}

std::size_t solve_sample_size(double relative_epsilon, double reference,
                              double delta, double c_tuple) {
  return solve_sample_size_abs(relative_epsilon * std::fabs(reference), delta,
                               c_tuple);
}

std::vector<ErrorRates> error_rate_curve(const SignedRelation& relation,
                                         const Query& query,
                                         std::span<const double> epsilons,
                                         const ServerStrategy& cheat,
                                         const ErrorRateRun& run,
                                         const OwnerKey& key,
                                         const GameConfig& config) {
  if (run.trials == 0) throw ParameterError("trials must be >= 1");
  if (epsilons.empty()) throw ParameterError("epsilon grid must be non-empty");
  for (double e : epsilons) EpsilonPolicy{e, 0.0}.validate();
  query.validate(relation.schema());

  const QueryResult exact = eval_exact(relation, query);
  const CompiledPredicate predicate(query.predicate, relation.schema());
  const bool selection = !query.is_aggregate();
  // The honest claim is the same every trial; inspect it once.
  const Evidence honest_evidence =
      selection ? selection_evidence(predicate, exact.tuples, key) : Evidence{};

  const std::size_t E = epsilons.size();
  // flags[t * 2E + e] honest escalated, flags[t * 2E + E + e] cheat escalated.
  std::vector<std::uint8_t> flags(run.trials * 2 * E, 0);

  kernels::parallel_for(run.trials, run.workers, [&](std::size_t t) {
    const SampleSketch sketch =
        draw_sketch(relation, run.verifier_k, derive_seed(run.sketch_seed, {t}));
    const auto estimate = estimate_from_moments(
        sketch_moments(relation.schema(), sketch, query), sketch.k, sketch.n,
        query.kind);
    StreamRng rng(derive_seed(run.cheat_seed, {t}));
    const ServerResponse resp =
        respond(cheat, relation, query, config, rng, {false, &exact});
    const Evidence cheat_evidence =
        selection ? selection_evidence(predicate, resp.claim.tuples, key)
                  : Evidence{};

    std::uint8_t* row = flags.data() + t * 2 * E;
    for (std::size_t e = 0; e < E; ++e) {
      const EpsilonPolicy policy{epsilons[e], run.absolute_floor};
      if (selection) {
        row[e] = honest_evidence.reason != EscalationReason::None ||
                 !selection_size_ok(*estimate, exact.tuples.size(), policy);
        row[E + e] = cheat_evidence.reason != EscalationReason::None ||
                     !selection_size_ok(*estimate, resp.claim.tuples.size(), policy);
      } else {
        row[e] = !estimate || !within_epsilon(*estimate, exact.value, policy);
        row[E + e] =
            !estimate || !within_epsilon(*estimate, resp.claim.value, policy);
      }
    }
  });

  std::vector<ErrorRates> out(E);
  for (std::size_t e = 0; e < E; ++e) {
    std::size_t fn = 0, tn = 0;
    for (std::size_t t = 0; t < run.trials; ++t) {
      fn += flags[t * 2 * E + e];
      tn += flags[t * 2 * E + E + e];
    }
    const double trials = static_cast<double>(run.trials);
    out[e] = ErrorRates::from(tn / trials, fn / trials);
  }
  return out;
}

ErrorRates estimate_error_rates(const SignedRelation& relation,
                                const Query& query, const EpsilonPolicy& policy,
                                std::size_t verifier_k,
                                const ServerStrategy& cheat, std::size_t trials,
                                std::uint64_t seed, const OwnerKey& key,
                                int workers) {
  policy.validate();
  ErrorRateRun run;
  run.trials = trials;
  run.verifier_k = verifier_k;
  run.sketch_seed = derive_seed(seed, {1});
  run.cheat_seed = derive_seed(seed, {2});
  run.absolute_floor = policy.absolute_floor;
  run.workers = workers;
  const double eps[] = {policy.relative};
  return error_rate_curve(relation, query, eps, cheat, run, key).front();
}

}  // namespace veriq
