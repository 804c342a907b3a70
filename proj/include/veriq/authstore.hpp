#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace veriq {

using TupleId = std::uint64_t;
using Value = std::int64_t;
using Mac = std::array<std::uint8_t, 32>;

// Ordered, unique attribute names. The order is fixed at ingestion and is the
// order values are encoded in.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<std::string> attributes);

  const std::vector<std::string>& attributes() const { return attributes_; }
  std::size_t width() const { return attributes_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws SchemaError when the attribute is unknown.
  std::size_t require(std::string_view name) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<std::string> attributes_;
};

// Owner key. Never empty.
class OwnerKey {
 public:
  explicit OwnerKey(std::vector<std::uint8_t> bytes);
  static OwnerKey from_hex(std::string_view hex);
  // Deterministic key for in-memory experiments; not for real data.
  static OwnerKey derived(std::uint64_t seed);

  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

struct SignedTuple {
  TupleId id = 0;
  std::vector<Value> values;
  Mac mac{};

  bool operator==(const SignedTuple&) const = default;
};

// Immutable after construction; safe to share across workers.
class SignedRelation {
 public:
  SignedRelation() = default;
  SignedRelation(Schema schema, std::vector<SignedTuple> tuples);

  const Schema& schema() const { return schema_; }
  const std::vector<SignedTuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  // Ids are 1..N, so lookup is positional.
  const SignedTuple& by_id(TupleId id) const { return tuples_.at(id - 1); }

 private:
  Schema schema_;
  std::vector<SignedTuple> tuples_;
};

struct SketchEntry {
  TupleId id = 0;
  std::vector<Value> values;
};

// Owner-retained uniform-with-replacement sample of k tuples plus N.
struct SampleSketch {
  std::vector<SketchEntry> entries;
  std::size_t k = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

Mac hmac_sha256(std::span<const std::uint8_t> key,
                std::span<const std::uint8_t> message);
Mac hmac_sha256(const OwnerKey& key, std::string_view message);

// Decimal id, then each value, separated by 0x1F and terminated by 0x1E.
std::string canonical_encode(TupleId id, std::span<const Value> values);

Mac tuple_mac(const OwnerKey& key, TupleId id, std::span<const Value> values);

SignedRelation sign_relation(const Schema& schema,
                             const std::vector<std::vector<Value>>& rows,
                             const OwnerKey& key);

// Constant-time comparison of the stored mac against a recomputed one.
bool verify_tuple(const SignedTuple& tuple, const OwnerKey& key);

// Throws TamperError naming the first tuple that fails, and SchemaError when
// ids are not exactly 1..N.
void verify_relation(const SignedRelation& relation, const OwnerKey& key);

SampleSketch draw_sketch(const SignedRelation& relation, std::size_t k,
                         std::uint64_t seed);

// What the server sees: one sorted, de-duplicated id list.
using TupleServer =
    std::function<std::vector<SignedTuple>(std::span<const TupleId>)>;

TupleServer honest_server(const SignedRelation& relation);

// Fetches requested plus dummy ids in a single indistinguishable request,
// verifies every returned mac and returns the requested tuples in request
// order. Throws WithheldTupleError or TamperError.
std::vector<SignedTuple> resample_exchange(const TupleServer& server,
                                           std::span<const TupleId> requested,
                                           std::span<const TupleId> dummy,
                                           std::size_t n, const OwnerKey& key);

// Replaces `count` sketch entries (chosen and redrawn with `seed`) through
// resample_exchange, padding the request with `dummy_count` random ids.
SampleSketch refresh_sketch(const SampleSketch& sketch,
                            const TupleServer& server, std::size_t count,
                            std::size_t dummy_count, std::uint64_t seed,
                            const OwnerKey& key);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

// CSV ingest. Header row is the schema; values must be integers.
struct RawTable {
  Schema schema;
  std::vector<std::vector<Value>> rows;
};

RawTable read_raw_csv(const std::string& path);
void write_raw_csv(const std::string& path, const RawTable& table);

// Signed form: `id` column first, schema columns, trailing `mac` (hex).
void write_signed_csv(const std::string& path, const SignedRelation& relation);
// Parses a signed CSV. When `key` is given every mac is verified.
SignedRelation read_signed_csv(const std::string& path,
                               const OwnerKey* key = nullptr);

}  // namespace veriq
