#include "veriq/census.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "veriq/error.hpp"
#include "veriq/rng.hpp"

namespace veriq {

Schema census_schema() {
  return Schema({"age", "income", "race", "marital", "sex", "pob_match"});
}

RawTable gen_census_like(std::size_t rows, std::uint64_t seed,
                         const CensusLikeParams& p) {
  if (rows == 0) throw ParameterError("gen_census_like needs rows >= 1");

  StreamRng rng(seed);
  std::bernoulli_distribution is_child(p.child_fraction);
  std::uniform_int_distribution<Value> child_age(0, 17);
  std::uniform_int_distribution<Value> adult_age(18, 90);
  std::bernoulli_distribution no_income(p.zero_income_fraction);
  std::lognormal_distribution<double> earnings(p.log_income_mean,
                                               p.log_income_sigma);
  std::discrete_distribution<int> race(p.race_weights.begin(),
                                       p.race_weights.end());
  std::discrete_distribution<int> marital(p.marital_weights.begin(),
                                          p.marital_weights.end());
  std::bernoulli_distribution is_male(p.male_fraction);
  std::bernoulli_distribution pob_match(p.pob_match_fraction);

  RawTable table{census_schema(), {}};
  table.rows.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const Value age = is_child(rng) ? child_age(rng) : adult_age(rng);
    Value income = 0;
    if (age >= 16 && !no_income(rng))
      income = std::min<Value>(p.income_cap, std::llround(earnings(rng)));
    const Value r = race(rng) + 1;
    const Value m = age >= 15 ? marital(rng) : kNeverMarried;
    const Value sex = is_male(rng) ? kMale : kFemale;
    const Value pob = pob_match(rng) ? 1 : 0;
    table.rows.push_back({age, income, r, m, sex, pob});
  }
  return table;
}

std::vector<NamedQuery> census_archetype_queries() {
  using namespace pred;
  return {
      {"q1", count_query(eq("race", kRaceBlack))},
      {"q2", count_query(gt("income", 40000))},
      {"q3", count_query(all_of(gt("age", 30), eq("marital", kNeverMarried)))},
      {"q4", count_query(any_of(lt("age", 18), lt("income", 10000)))},
      {"q5", sum_query("income", eq("marital", kNeverMarried))},
      {"q6", sum_query("income", all_of(gt("age", 40), eq("pob_match", 1)))},
      {"q7", avg_query("age", gt("income", 80000))},
      {"q8", avg_query("income", all_of(eq("sex", kMale), eq("race", kRaceJapanese)))},
  };
}

}  // namespace veriq
