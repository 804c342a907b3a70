#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "veriq/authstore.hpp"

namespace veriq {

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

namespace pred_node {
struct True {};
struct Equals {
  std::string attr;
  Value value = 0;
};
struct Range {
  std::string attr;
  std::optional<Value> low;
  std::optional<Value> high;
  bool low_inclusive = true;
  bool high_inclusive = true;
};
struct And {
  PredicatePtr left, right;
};
struct Or {
  PredicatePtr left, right;
};
}  // namespace pred_node

struct Predicate {
  std::variant<pred_node::True, pred_node::Equals, pred_node::Range,
               pred_node::And, pred_node::Or>
      node;
};

// Builders. gt/lt are exclusive, ge/le inclusive.
namespace pred {
Predicate always();
Predicate eq(std::string attr, Value v);
Predicate between(std::string attr, std::optional<Value> low,
                  std::optional<Value> high, bool low_inclusive = true,
                  bool high_inclusive = true);
Predicate gt(std::string attr, Value v);
Predicate ge(std::string attr, Value v);
Predicate lt(std::string attr, Value v);
Predicate le(std::string attr, Value v);
Predicate all_of(Predicate left, Predicate right);
Predicate any_of(Predicate left, Predicate right);
}  // namespace pred

// A predicate resolved against a schema into a flat node array.
class CompiledPredicate {
 public:
  CompiledPredicate(const Predicate& predicate, const Schema& schema);

  bool matches(std::span<const Value> values) const { return eval(0, values); }

 private:
  enum class Op { True, Equals, Range, And, Or };
  struct Node {
    Op op = Op::True;
    std::size_t attr = 0;
    Value a = 0, b = 0;
    bool has_low = false, has_high = false;
    bool low_inclusive = true, high_inclusive = true;
    std::size_t left = 0, right = 0;
  };

  std::size_t add(const Predicate& p, const Schema& schema);
  bool eval(std::size_t idx, std::span<const Value> values) const;

  std::vector<Node> nodes_;
};

bool predicate_matches(const Schema& schema, std::span<const Value> values,
                       const Predicate& predicate);

enum class QueryKind { Count, Sum, Avg, StdDev, Select };

const char* to_string(QueryKind kind);
QueryKind query_kind_from_string(const std::string& name);

struct Query {
  QueryKind kind = QueryKind::Count;
  std::string attr;  // empty for Count and Select
  Predicate predicate = pred::always();

  bool is_aggregate() const { return kind != QueryKind::Select; }
  // Throws SchemaError when the query does not fit the schema.
  void validate(const Schema& schema) const;
};

Query count_query(Predicate p);
Query sum_query(std::string attr, Predicate p);
Query avg_query(std::string attr, Predicate p);
Query stddev_query(std::string attr, Predicate p);
Query select_query(Predicate p);

struct QueryResult {
  QueryKind kind = QueryKind::Count;
  double value = 0.0;               // aggregates; match count for Select
  std::vector<SignedTuple> tuples;  // Select only

  bool is_selection() const { return kind == QueryKind::Select; }
};

// Integer moments of the attribute over matching rows. Exact: sums are kept
// in 128-bit integers so serial and parallel scans agree bit for bit.
struct Moments {
  std::int64_t count = 0;
  __int128 sum = 0;
  __int128 sum_sq = 0;

  void add(Value v) {
    ++count;
    sum += v;
    sum_sq += static_cast<__int128>(v) * v;
  }
  Moments& operator+=(const Moments& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
  bool operator==(const Moments&) const = default;
};

// Population mean / standard deviation from exact moments; nullopt when
// count is zero.
std::optional<double> moments_mean(const Moments& m);
std::optional<double> moments_stddev(const Moments& m);

// Full-scan evaluation. Avg/StdDev over zero matches throw EmptyAggregateError.
QueryResult eval_exact(const SignedRelation& relation, const Query& query);

// Aggregate value recomputed from an explicit tuple list (used by audits).
std::optional<double> aggregate_over(const Schema& schema,
                                     std::span<const SignedTuple> tuples,
                                     const Query& query);

// Extrapolated estimate; Select yields the estimated result size. nullopt
// when Avg/StdDev has no sketch matches.
std::optional<double> estimate_from_sketch(const Schema& schema,
                                           const SampleSketch& sketch,
                                           const Query& query);

Moments sketch_moments(const Schema& schema, const SampleSketch& sketch,
                       const Query& query);
std::optional<double> estimate_from_moments(const Moments& m, std::size_t k,
                                            std::size_t n, QueryKind kind);

}  // namespace veriq
