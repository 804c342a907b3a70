#pragma once

#include <string>
#include <variant>
#include <vector>

#include "veriq/authstore.hpp"
#include "veriq/incentives.hpp"
#include "veriq/queryeng.hpp"
#include "veriq/rng.hpp"

namespace veriq {

namespace strategy {
struct Honest {};
// Runs the query on a fresh uniform-with-replacement sample of k tuples.
struct SampleCheat {
  std::size_t k = 1;
};
// Exact result plus Laplace(0, |r| / divisor) noise.
struct LaplaceCheat {
  double divisor = 1.0;
};
}  // namespace strategy

using ServerStrategy =
    std::variant<strategy::Honest, strategy::SampleCheat, strategy::LaplaceCheat>;

// "honest", "sample" or "laplace".
std::string strategy_kind(const ServerStrategy& s);
// k for SampleCheat, divisor for LaplaceCheat, 0 for Honest.
double strategy_param(const ServerStrategy& s);
std::string strategy_label(const ServerStrategy& s);
bool is_cheating(const ServerStrategy& s);
void validate(const ServerStrategy& s);

struct ServerResponse {
  QueryResult claim;
  double compute_cost = 0;         // modeled C(Q) or C(Q')
  std::vector<SignedTuple> work;   // tuples the claim was computed from
  bool cheated = false;
};

// Modeled computation cost. SampleCheat scales C(Q) by k'/N (capped at C(Q));
// LaplaceCheat uses the configured C(Q').
double modeled_cost(const ServerStrategy& s, std::size_t n,
                    const GameConfig& config);

// Inverse-CDF Laplace draw for u in (-1/2, 1/2).
double laplace_quantile(double u, double mean, double scale);
double sample_laplace(StreamRng& rng, double mean, double scale);

struct RespondOptions {
  bool with_work = true;
  // When set, skips the full scan for strategies that need the exact result.
  const QueryResult* exact = nullptr;
};

ServerResponse respond(const ServerStrategy& s, const SignedRelation& relation,
                       const Query& query, const GameConfig& config,
                       StreamRng& rng, const RespondOptions& options = {});

}  // namespace veriq
