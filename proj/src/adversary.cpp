#include "veriq/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "veriq/error.hpp"

namespace veriq {

std::string strategy_kind(const ServerStrategy& s) {
  switch (s.index()) {
    case 0: return "honest";
    case 1: return "sample";
    default: return "laplace";
  }
}

double strategy_param(const ServerStrategy& s) {
  if (auto* sc = std::get_if<strategy::SampleCheat>(&s))
    return static_cast<double>(sc->k);
  if (auto* lc = std::get_if<strategy::LaplaceCheat>(&s)) return lc->divisor;
  return 0.0;
}

std::string strategy_label(const ServerStrategy& s) {
  std::ostringstream out;
  out << strategy_kind(s);
  if (s.index() != 0) out << '(' << strategy_param(s) << ')';
  return out.str();
}

bool is_cheating(const ServerStrategy& s) {
  return !std::holds_alternative<strategy::Honest>(s);
}

void validate(const ServerStrategy& s) {
  if (auto* sc = std::get_if<strategy::SampleCheat>(&s); sc && sc->k < 1)
    throw ParameterError("sample cheater needs k' >= 1");
  if (auto* lc = std::get_if<strategy::LaplaceCheat>(&s);
      lc && !(lc->divisor > 0 && std::isfinite(lc->divisor)))
    throw ParameterError("laplace cheater needs a positive finite divisor");
}

double modeled_cost(const ServerStrategy& s, std::size_t n,
                    const GameConfig& config) {
  if (auto* sc = std::get_if<strategy::SampleCheat>(&s)) {
    if (n == 0) return 0.0;
    const double frac =
        std::min(1.0, static_cast<double>(sc->k) / static_cast<double>(n));
    return frac * config.cost_honest;
  }
  if (std::holds_alternative<strategy::LaplaceCheat>(s)) return config.cost_cheat;
  return config.cost_honest;
}

double laplace_quantile(double u, double mean, double scale) {
  if (!(scale > 0)) throw ParameterError("laplace scale must be > 0");
  if (!(u > -0.5 && u < 0.5))
    throw ParameterError("laplace quantile needs u in (-1/2, 1/2)");
  const double sgn = (u > 0) - (u < 0);
  return mean - scale * sgn * std::log(1.0 - 2.0 * std::fabs(u));
}

double sample_laplace(StreamRng& rng, double mean, double scale) {
  if (!(scale > 0)) throw ParameterError("laplace scale must be > 0");
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  double u = uniform(rng);
  while (u <= -0.5) u = uniform(rng);
  return laplace_quantile(u, mean, scale);
}

namespace {

std::vector<SignedTuple> matching_tuples(const SignedRelation& relation,
                                         const Query& query) {
  const CompiledPredicate predicate(query.predicate, relation.schema());
  std::vector<SignedTuple> out;
  for (const auto& t : relation.tuples())
    if (predicate.matches(t.values)) out.push_back(t);
  return out;
}

QueryResult exact_or_cached(const SignedRelation& relation, const Query& query,
                            const RespondOptions& options) {
  if (options.exact) return *options.exact;
  return eval_exact(relation, query);
}

}  // namespace

ServerResponse respond(const ServerStrategy& s, const SignedRelation& relation,
                       const Query& query, const GameConfig& config,
                       StreamRng& rng, const RespondOptions& options) {
  validate(s);
  query.validate(relation.schema());
  ServerResponse r;
  r.cheated = is_cheating(s);
  r.compute_cost = modeled_cost(s, relation.size(), config);

  if (std::holds_alternative<strategy::Honest>(s)) {
    r.claim = exact_or_cached(relation, query, options);
    if (options.with_work)
      r.work = query.is_aggregate() ? matching_tuples(relation, query)
                                    : r.claim.tuples;
    return r;
  }

  if (auto* lc = std::get_if<strategy::LaplaceCheat>(&s)) {
    if (!query.is_aggregate())
      throw UnsupportedStrategyError(
          "laplace noise cannot fabricate signed tuples for a selection");
    r.claim = exact_or_cached(relation, query, options);
    const double scale = std::fabs(r.claim.value) / lc->divisor;
    if (scale > 0) r.claim.value = sample_laplace(rng, r.claim.value, scale);
    if (options.with_work) r.work = matching_tuples(relation, query);
    return r;
  }

  const auto& sc = std::get<strategy::SampleCheat>(s);
  if (relation.empty())
    throw EmptyPopulationError("cannot sample from an empty relation");
  const CompiledPredicate predicate(query.predicate, relation.schema());
  const auto attr = query.attr.empty()
                        ? std::optional<std::size_t>{}
                        : std::optional(relation.schema().require(query.attr));
  std::uniform_int_distribution<TupleId> pick(1, relation.size());
  Moments m;
  std::vector<TupleId> hits;
  for (std::size_t i = 0; i < sc.k; ++i) {
    const auto& t = relation.by_id(pick(rng));
    if (!predicate.matches(t.values)) continue;
    m.add(attr ? t.values[*attr] : 0);
    hits.push_back(t.id);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());

  r.claim.kind = query.kind;
  if (query.is_aggregate()) {
    // With no matching sample rows an Avg/StdDev cheater has nothing to
    // extrapolate from and claims 0.
    r.claim.value =
        estimate_from_moments(m, sc.k, relation.size(), query.kind).value_or(0.0);
    if (options.with_work)
      for (TupleId id : hits) r.work.push_back(relation.by_id(id));
  } else {
    for (TupleId id : hits) r.claim.tuples.push_back(relation.by_id(id));
    r.claim.value = static_cast<double>(r.claim.tuples.size());
    if (options.with_work) r.work = r.claim.tuples;
  }
  return r;
}

}  // namespace veriq
