#include "veriq/simlab.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "veriq/error.hpp"
#include "veriq/kernels.hpp"
#include "veriq/rng.hpp"

namespace veriq {

double RoundOutcome::cash_imbalance() const {
  double sum = 0;
  for (const auto& l : ledger) sum += l.cash();
  return sum;
}

namespace {

Action label(const ServerStrategy& s) {
  return is_cheating(s) ? Action::Cheat : Action::Honest;
}

double info_of(const GameConfig& c, Action a) {
  return a == Action::Honest ? c.info_honest : c.info_cheat;
}

PlayerLedger& owner(RoundOutcome& o) { return o.ledger[0]; }
PlayerLedger& server(RoundOutcome& o, int which) { return o.ledger[which]; }

void pay(RoundOutcome& o, int which, double price) {
  owner(o).payment -= price;
  server(o, which).payment += price;
}

void fine(RoundOutcome& o, int which, double amount) {
  owner(o).fine += amount;
  server(o, which).fine -= amount;
}

void reimburse_audit(RoundOutcome& o, int which, double amount) {
  owner(o).audit_transfer += amount;
  server(o, which).audit_transfer -= amount;
}

std::vector<RoundOutcome> run_rounds(
    std::size_t rounds, int workers,
    const std::function<RoundOutcome(std::size_t)>& one) {
  std::vector<RoundOutcome> out(rounds);
  kernels::parallel_for(rounds, workers,
                        [&](std::size_t r) { out[r] = one(r); });
  return out;
}

SimulationResult finish(std::vector<RoundOutcome> rounds, bool keep) {
  SimulationResult result;
  result.summary = summarize(rounds);
  if (keep) result.rounds = std::move(rounds);
  return result;
}

}  // namespace

SimulationResult run_single_cloud(const SignedRelation& relation,
                                  const Query& query, const OwnerKey& key,
                                  const SingleCloudRun& run) {
  validate(run.config, GameForm::SingleCloud);
  validate(run.strategy);
  if (run.rounds == 0) throw ParameterError("rounds must be >= 1");
  // The owner's retrieval for audits: every mac checked once up front.
  verify_relation(relation, key);
  const QueryResult exact = eval_exact(relation, query);
  const GameConfig& c = run.config;
  const Action action = label(run.strategy);

  const auto* sketch_v = std::get_if<SketchVerifier>(&run.verifier);
  std::optional<SampleSketch> fixed_sketch;
  if (sketch_v) {
    sketch_v->policy.validate();
    if (!sketch_v->redraw_each_round)
      fixed_sketch = draw_sketch(relation, sketch_v->k,
                                 derive_seed(run.seed, {0x736b65746368}));
  }

  auto one = [&](std::size_t r) {
    RoundOutcome o;
    o.round = r;
    o.form = GameForm::SingleCloud;
    o.s1 = action;
    StreamRng rng(derive_seed(run.seed, {r}));
    const ServerResponse resp =
        respond(run.strategy, relation, query, c, rng, {false, &exact});
    owner(o).info_value = info_of(c, action);
    server(o, 1).compute_cost = resp.compute_cost;

    o.verified = std::bernoulli_distribution(c.alpha)(rng);
    if (!o.verified) {
      pay(o, 1, c.price);
      return o;
    }
    owner(o).verify_cost = c.verify_cost;

    bool escalate = false;
    if (sketch_v) {
      std::optional<SampleSketch> fresh;
      if (!fixed_sketch)
        fresh = draw_sketch(relation, sketch_v->k,
                            derive_seed(run.seed, {r, 0x736b65746368}));
      const SampleSketch& sketch = fixed_sketch ? *fixed_sketch : *fresh;
      const Verdict v =
          query.is_aggregate()
              ? local_verify_aggregate(relation.schema(), sketch, query,
                                       resp.claim.value, sketch_v->policy)
              : local_verify_selection(relation.schema(), sketch, query,
                                       resp.claim.tuples, sketch_v->policy, key);
      escalate = !v.accepted();
    } else {
      const double p = action == Action::Cheat ? c.rates.p_tn : c.rates.p_fn;
      escalate = std::bernoulli_distribution(p)(rng);
    }
    o.verdict = escalate ? Decision::Escalate : Decision::Accept;
    if (!escalate) {
      pay(o, 1, c.price);
      return o;
    }

    o.audit_run = true;
    owner(o).audit_cost = c.audit_cost;
    o.audit = audit_exact(relation, query, resp.claim, key, {false, &exact});
    if (*o.audit == AuditVerdict::Honest) {
      // The owner covers the audit for an honest server and still pays.
      pay(o, 1, c.price);
    } else {
      o.flagged_s1 = true;
      fine(o, 1, c.fine);
      reimburse_audit(o, 1, c.audit_cost);
    }
    return o;
  };

  return finish(run_rounds(run.rounds, run.workers, one), run.keep_rounds);
}

SimulationResult run_two_cloud(const SignedRelation& relation,
                               const Query& query, const OwnerKey& key,
                               const TwoCloudRun& run) {
  if (run.contract == Contract::Three)
    throw ConfigError("contract 3 belongs to the single-cloud game");
  validate(run.config, GameForm::TwoCloud);
  validate(run.s1);
  validate(run.s2);
  if (run.rounds == 0) throw ParameterError("rounds must be >= 1");
  verify_relation(relation, key);
  const QueryResult exact = eval_exact(relation, query);
  const GameConfig& c = run.config;
  const std::array<const ServerStrategy*, 3> strategies{nullptr, &run.s1,
                                                        &run.s2};
  const bool show_work = run.contract == Contract::Two;

  auto one = [&](std::size_t r) {
    RoundOutcome o;
    o.round = r;
    o.form = GameForm::TwoCloud;
    o.s1 = label(run.s1);
    o.s2 = label(run.s2);
    const std::array<Action, 3> actions{Action::Honest, o.s1, o.s2};
    StreamRng rng(derive_seed(run.seed, {r}));
    o.primary = std::bernoulli_distribution(0.5)(rng) ? 2 : 1;
    o.duplicated = std::bernoulli_distribution(c.alpha)(rng);
    const int first = o.primary;
    const int second = 3 - first;

    const ServerResponse resp_first = respond(*strategies[first], relation, query,
                                              c, rng, {show_work, &exact});
    if (!o.duplicated) {
      owner(o).info_value = info_of(c, actions[first]);
      server(o, first).compute_cost = resp_first.compute_cost;
      pay(o, first, c.price);
      return o;
    }

    const ServerResponse resp_second = respond(
        *strategies[second], relation, query, c, rng, {show_work, &exact});
    o.mismatch = !results_equal(resp_first.claim, resp_second.claim);
    if (!o.mismatch) {
      owner(o).info_value = info_of(c, actions[first]);
      for (int s : {first, second}) {
        server(o, s).compute_cost = (s == first ? resp_first : resp_second).compute_cost;
        pay(o, s, c.price);
      }
      return o;
    }

    // A detected mismatch voids the round: no payment, and neither
    // computation is billed. The owner keeps both results.
    owner(o).info_value = info_of(c, actions[1]) + info_of(c, actions[2]);
    if (run.contract == Contract::One) {
      o.flagged_s1 = o.flagged_s2 = true;
      fine(o, 1, c.fine);
      fine(o, 2, c.fine);
      return o;
    }

    o.audit_run = true;
    owner(o).audit_cost = c.audit_cost;
    const ServerResponse& r1 = first == 1 ? resp_first : resp_second;
    const ServerResponse& r2 = first == 1 ? resp_second : resp_first;
    // Shown work comes from the relation verified above, so its macs hold.
    const CheaterSet cheaters =
        show_work_audit(relation.schema(), query, r1, r2, key, false);
    o.flagged_s1 = cheaters.a;
    o.flagged_s2 = cheaters.b;
    const int flagged = (cheaters.a ? 1 : 0) + (cheaters.b ? 1 : 0);
    for (int s : {1, 2}) {
      if (!(s == 1 ? cheaters.a : cheaters.b)) continue;
      fine(o, s, c.fine);
      if (run.accounting == AuditAccounting::CheaterReimburses)
        reimburse_audit(o, s, c.audit_cost / flagged);
    }
    return o;
  };

  return finish(run_rounds(run.rounds, run.workers, one), run.keep_rounds);
}

TrialSummary summarize(std::span<const RoundOutcome> rounds) {
  TrialSummary s;
  s.rounds = rounds.size();
  if (rounds.empty()) return s;
  const double n = static_cast<double>(rounds.size());
  for (std::size_t p = 0; p < kPlayers; ++p) {
    double sum = 0;
    for (const auto& o : rounds) sum += o.ledger[p].net();
    const double mean = sum / n;
    double ss = 0;
    for (const auto& o : rounds) {
      const double d = o.ledger[p].net() - mean;
      ss += d * d;
    }
    s.mean_payoff[p] = mean;
    s.std_error[p] = rounds.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  }
  for (const auto& o : rounds) {
    if (o.verified || o.duplicated) ++s.verified_rounds;
    if (o.mismatch) ++s.mismatches;
    if (o.audit_run) ++s.audits;
    if (o.flagged_s1 || o.flagged_s2) ++s.detections;
    if (!o.verdict) continue;
    const bool escalated = *o.verdict == Decision::Escalate;
    if (escalated) ++s.escalations;
    if (o.s1 == Action::Honest) {
      ++s.honest_verified;
      s.honest_escalated += escalated;
    } else {
      ++s.cheat_verified;
      s.cheat_escalated += escalated;
    }
  }
  if (s.honest_verified)
    s.p_fn = static_cast<double>(s.honest_escalated) / s.honest_verified;
  if (s.cheat_verified)
    s.p_tn = static_cast<double>(s.cheat_escalated) / s.cheat_verified;
  return s;
}

void write_rounds_csv(const std::string& path,
                      std::span<const RoundOutcome> rounds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "round,s1,s2,primary,verified,duplicated,mismatch,verdict,audit_run,"
         "flagged_s1,flagged_s2,net_owner,net_s1,net_s2\n";
  out.precision(17);
  for (const auto& o : rounds) {
    out << o.round << ',' << to_string(o.s1) << ','
        << (o.form == GameForm::TwoCloud ? to_string(o.s2) : "") << ','
        << o.primary << ',' << o.verified << ',' << o.duplicated << ','
        << o.mismatch << ',' << (o.verdict ? to_string(*o.verdict) : "") << ','
        << o.audit_run << ',' << o.flagged_s1 << ',' << o.flagged_s2 << ','
        << o.net(Player::Owner) << ',' << o.net(Player::S1) << ','
        << o.net(Player::S2) << '\n';
  }
}

}  // namespace veriq
