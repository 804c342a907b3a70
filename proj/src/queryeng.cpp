#include "veriq/queryeng.hpp"

#include <cmath>

#include "veriq/error.hpp"
#include "veriq/kernels.hpp"

namespace veriq {

namespace pred {

Predicate always() { return {pred_node::True{}}; }

Predicate eq(std::string attr, Value v) {
  return {pred_node::Equals{std::move(attr), v}};
}

Predicate between(std::string attr, std::optional<Value> low,
                  std::optional<Value> high, bool low_inclusive,
                  bool high_inclusive) {
  return {pred_node::Range{std::move(attr), low, high, low_inclusive,
                           high_inclusive}};
}

Predicate gt(std::string attr, Value v) {
  return between(std::move(attr), v, std::nullopt, false, true);
}
Predicate ge(std::string attr, Value v) {
  return between(std::move(attr), v, std::nullopt, true, true);
}
Predicate lt(std::string attr, Value v) {
  return between(std::move(attr), std::nullopt, v, true, false);
}
Predicate le(std::string attr, Value v) {
  return between(std::move(attr), std::nullopt, v, true, true);
}

Predicate all_of(Predicate left, Predicate right) {
  return {pred_node::And{std::make_shared<const Predicate>(std::move(left)),
                         std::make_shared<const Predicate>(std::move(right))}};
}

Predicate any_of(Predicate left, Predicate right) {
  return {pred_node::Or{std::make_shared<const Predicate>(std::move(left)),
                        std::make_shared<const Predicate>(std::move(right))}};
}

}  // namespace pred

CompiledPredicate::CompiledPredicate(const Predicate& predicate,
                                     const Schema& schema) {
  add(predicate, schema);
}

std::size_t CompiledPredicate::add(const Predicate& p, const Schema& schema) {
  const std::size_t idx = nodes_.size();
  nodes_.emplace_back();
  Node node;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred_node::True>) {
          node.op = Op::True;
        } else if constexpr (std::is_same_v<T, pred_node::Equals>) {
          node.op = Op::Equals;
          node.attr = schema.require(n.attr);
          node.a = n.value;
        } else if constexpr (std::is_same_v<T, pred_node::Range>) {
          node.op = Op::Range;
          node.attr = schema.require(n.attr);
          if (n.low && n.high && *n.low > *n.high)
            throw SchemaError("range on '" + n.attr + "' has low > high");
          node.has_low = n.low.has_value();
          node.has_high = n.high.has_value();
          node.a = n.low.value_or(0);
          node.b = n.high.value_or(0);
          node.low_inclusive = n.low_inclusive;
          node.high_inclusive = n.high_inclusive;
        } else {
          if (!n.left || !n.right)
            throw SchemaError("boolean predicate node is missing an operand");
          node.op = std::is_same_v<T, pred_node::And> ? Op::And : Op::Or;
          node.left = add(*n.left, schema);
          node.right = add(*n.right, schema);
        }
      },
      p.node);
  nodes_[idx] = node;
  return idx;
}

bool CompiledPredicate::eval(std::size_t idx,
                             std::span<const Value> values) const {
  const Node& n = nodes_[idx];
  switch (n.op) {
    case Op::True:
      return true;
    case Op::Equals:
      return values[n.attr] == n.a;
    case Op::Range: {
      const Value v = values[n.attr];
      if (n.has_low && (n.low_inclusive ? v < n.a : v <= n.a)) return false;
      if (n.has_high && (n.high_inclusive ? v > n.b : v >= n.b)) return false;
      return true;
    }
    case Op::And:
      return eval(n.left, values) && eval(n.right, values);
    case Op::Or:
      return eval(n.left, values) || eval(n.right, values);
  }
  return false;
}

bool predicate_matches(const Schema& schema, std::span<const Value> values,
                       const Predicate& predicate) {
  return CompiledPredicate(predicate, schema).matches(values);
}

const char* to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Count: return "count";
    case QueryKind::Sum: return "sum";
    case QueryKind::Avg: return "avg";
    case QueryKind::StdDev: return "stddev";
    case QueryKind::Select: return "select";
  }
  return "?";
}

QueryKind query_kind_from_string(const std::string& name) {
  if (name == "count") return QueryKind::Count;
  if (name == "sum") return QueryKind::Sum;
  if (name == "avg") return QueryKind::Avg;
  if (name == "stddev") return QueryKind::StdDev;
  if (name == "select") return QueryKind::Select;
  throw SchemaError("unknown query kind '" + name + "'");
}

void Query::validate(const Schema& schema) const {
  const bool needs_attr = kind == QueryKind::Sum || kind == QueryKind::Avg ||
                          kind == QueryKind::StdDev;
  if (needs_attr) {
    if (attr.empty())
      throw SchemaError(std::string(to_string(kind)) + " query needs an attribute");
    schema.require(attr);
  } else if (!attr.empty()) {
    throw SchemaError(std::string(to_string(kind)) +
                      " query must not name an aggregate attribute");
  }
  CompiledPredicate(predicate, schema);
}

Query count_query(Predicate p) { return {QueryKind::Count, "", std::move(p)}; }
Query sum_query(std::string attr, Predicate p) {
  return {QueryKind::Sum, std::move(attr), std::move(p)};
}
Query avg_query(std::string attr, Predicate p) {
  return {QueryKind::Avg, std::move(attr), std::move(p)};
}
Query stddev_query(std::string attr, Predicate p) {
  return {QueryKind::StdDev, std::move(attr), std::move(p)};
}
Query select_query(Predicate p) { return {QueryKind::Select, "", std::move(p)}; }

std::optional<double> moments_mean(const Moments& m) {
  if (m.count == 0) return std::nullopt;
  return static_cast<double>(m.sum) / static_cast<double>(m.count);
}

std::optional<double> moments_stddev(const Moments& m) {
  if (m.count == 0) return std::nullopt;
  // n * sum_sq - sum^2 is an exact non-negative integer.
  const __int128 n = m.count;
  const __int128 num = n * m.sum_sq - m.sum * m.sum;
  const double var = static_cast<double>(num) / (static_cast<double>(n) *
                                                 static_cast<double>(n));
  return std::sqrt(var);
}

namespace {

std::optional<std::size_t> attr_index(const Schema& schema, const Query& q) {
  if (q.attr.empty()) return std::nullopt;
  return schema.require(q.attr);
}

std::optional<double> value_from_moments(const Moments& m, QueryKind kind) {
  switch (kind) {
    case QueryKind::Count:
    case QueryKind::Select:
      return static_cast<double>(m.count);
    case QueryKind::Sum:
      return static_cast<double>(m.sum);
    case QueryKind::Avg:
      return moments_mean(m);
    case QueryKind::StdDev:
      return moments_stddev(m);
  }
  return std::nullopt;
}

}  // namespace

QueryResult eval_exact(const SignedRelation& relation, const Query& query) {
  query.validate(relation.schema());
  const CompiledPredicate predicate(query.predicate, relation.schema());
  QueryResult result;
  result.kind = query.kind;

  if (query.kind == QueryKind::Select) {
    for (const auto& t : relation.tuples())
      if (predicate.matches(t.values)) result.tuples.push_back(t);
    result.value = static_cast<double>(result.tuples.size());
    return result;
  }

  const auto attr = attr_index(relation.schema(), query);
  const Moments m =
      relation.size() >= kernels::kParallelScanThreshold
          ? kernels::scan_moments_parallel(relation, predicate, attr)
          : kernels::scan_moments_serial(relation, predicate, attr);
  auto value = value_from_moments(m, query.kind);
  if (!value)
    throw EmptyAggregateError(std::string(to_string(query.kind)) +
                              " over zero matching tuples");
  result.value = *value;
  return result;
}

std::optional<double> aggregate_over(const Schema& schema,
                                     std::span<const SignedTuple> tuples,
                                     const Query& query) {
  const auto attr = attr_index(schema, query);
  Moments m;
  for (const auto& t : tuples) m.add(attr ? t.values.at(*attr) : 0);
  return value_from_moments(m, query.kind);
}

Moments sketch_moments(const Schema& schema, const SampleSketch& sketch,
                       const Query& query) {
  const CompiledPredicate predicate(query.predicate, schema);
  const auto attr = attr_index(schema, query);
  Moments m;
  for (const auto& e : sketch.entries) {
    if (!predicate.matches(e.values)) continue;
    m.add(attr ? e.values[*attr] : 0);
  }
  return m;
}

std::optional<double> estimate_from_moments(const Moments& m, std::size_t k,
                                            std::size_t n, QueryKind kind) {
  if (k == 0) throw ParameterError("sketch size k must be >= 1");
  const double scale = static_cast<double>(n) / static_cast<double>(k);
  switch (kind) {
    case QueryKind::Count:
    case QueryKind::Select:
      return static_cast<double>(m.count) * scale;
    case QueryKind::Sum:
      return static_cast<double>(m.sum) * scale;
    case QueryKind::Avg:
      return moments_mean(m);
    case QueryKind::StdDev:
      return moments_stddev(m);
  }
  return std::nullopt;
}

std::optional<double> estimate_from_sketch(const Schema& schema,
                                           const SampleSketch& sketch,
                                           const Query& query) {
  query.validate(schema);
  return estimate_from_moments(sketch_moments(schema, sketch, query),
                               sketch.k, sketch.n, query.kind);
}

}  // namespace veriq
