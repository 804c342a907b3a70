#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "veriq/authstore.hpp"
#include "veriq/queryeng.hpp"

namespace veriq {

// Integer coding of the synthetic census columns.
inline constexpr Value kMale = 0;
inline constexpr Value kFemale = 1;
inline constexpr Value kNeverMarried = 4;  // 0 married, 1 widowed, 2 divorced, 3 separated
inline constexpr Value kRaceBlack = 2;
inline constexpr Value kRaceJapanese = 9;

// Marginals of the generator. Columns: age, income, race, marital, sex,
// pob_match.
struct CensusLikeParams {
  double child_fraction = 0.25;  // age uniform on [0, 17], else [18, 90]
  double zero_income_fraction = 0.20;  // among people aged 16+
  double log_income_mean = 10.2;       // log-normal earnings
  double log_income_sigma = 0.9;
  Value income_cap = 400000;
  // Race codes 1..9.
  std::array<double, 9> race_weights{0.755, 0.12, 0.01, 0.01, 0.02,
                                     0.02,  0.02, 0.03, 0.015};
  // Marital codes 0..4 for people aged 15+; younger are never married.
  std::array<double, 5> marital_weights{0.50, 0.06, 0.08, 0.03, 0.33};
  double male_fraction = 0.49;
  double pob_match_fraction = 0.60;
};

Schema census_schema();

// Deterministic under seed. rows must be >= 1.
RawTable gen_census_like(std::size_t rows, std::uint64_t seed,
                         const CensusLikeParams& params = {});

struct NamedQuery {
  std::string id;
  Query query;
};

// The eight aggregate query archetypes, ids "q1".."q8".
std::vector<NamedQuery> census_archetype_queries();

}  // namespace veriq
