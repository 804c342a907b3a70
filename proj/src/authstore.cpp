#include "veriq/authstore.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <memory>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "veriq/error.hpp"
#include "veriq/rng.hpp"

namespace veriq {

Schema::Schema(std::vector<std::string> attributes)
    : attributes_(std::move(attributes)) {
  std::unordered_set<std::string> seen;
  for (const auto& a : attributes_) {
    if (a.empty()) throw SchemaError("empty attribute name");
    if (a == "id" || a == "mac")
      throw SchemaError("attribute name '" + a + "' is reserved");
    if (!seen.insert(a).second)
      throw SchemaError("duplicate attribute '" + a + "'");
  }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    if (attributes_[i] == name) return i;
  return std::nullopt;
}

std::size_t Schema::require(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw SchemaError("unknown attribute '" + std::string(name) + "'");
  return *idx;
}

OwnerKey::OwnerKey(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
  if (bytes_.empty()) throw InvalidKeyError("owner key must be non-empty");
}

OwnerKey OwnerKey::from_hex(std::string_view hex) {
  while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r' ||
                          hex.back() == ' '))
    hex.remove_suffix(1);
  if (hex.empty()) throw InvalidKeyError("owner key must be non-empty");
  try {
    return OwnerKey(veriq::from_hex(hex));
  } catch (const ParameterError& e) {
    throw InvalidKeyError(std::string("owner key: ") + e.what());
  }
}

OwnerKey OwnerKey::derived(std::uint64_t seed) {
  StreamRng rng(derive_seed(seed, {0x6b6579}));
  std::vector<std::uint8_t> bytes(32);
  for (std::size_t i = 0; i < bytes.size(); i += 8) {
    std::uint64_t w = rng();
    for (std::size_t j = 0; j < 8; ++j)
      bytes[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
  }
  return OwnerKey(std::move(bytes));
}

SignedRelation::SignedRelation(Schema schema, std::vector<SignedTuple> tuples)
    : schema_(std::move(schema)), tuples_(std::move(tuples)) {
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    if (tuples_[i].id != i + 1)
      throw SchemaError("tuple ids must be consecutive 1..N; position " +
                        std::to_string(i + 1) + " has id " +
                        std::to_string(tuples_[i].id));
    if (tuples_[i].values.size() != schema_.width())
      throw SchemaError("tuple " + std::to_string(tuples_[i].id) +
                        " width does not match schema");
  }
}

namespace {

constexpr std::size_t kBlockSize = 64;

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

EVP_MD_CTX* digest_ctx() {
  thread_local std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  return ctx.get();
}

void sha256_parts(std::span<const std::uint8_t> a,
                  std::span<const std::uint8_t> b, std::uint8_t* out) {
  EVP_MD_CTX* ctx = digest_ctx();
  unsigned int len = 0;
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, a.data(), a.size()) != 1 ||
      EVP_DigestUpdate(ctx, b.data(), b.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out, &len) != 1 || len != 32)
    throw Error("SHA-256 digest failed");
}

}  // namespace

Mac hmac_sha256(std::span<const std::uint8_t> key,
                std::span<const std::uint8_t> message) {
  if (key.empty()) throw InvalidKeyError("HMAC key must be non-empty");

  std::array<std::uint8_t, kBlockSize> block{};
  if (key.size() > kBlockSize) {
    sha256_parts(key, {}, block.data());
  } else {
    std::copy(key.begin(), key.end(), block.begin());
  }

  std::array<std::uint8_t, kBlockSize> ipad{};
  std::array<std::uint8_t, kBlockSize> opad{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    ipad[i] = block[i] ^ 0x36;
    opad[i] = block[i] ^ 0x5c;
  }

  std::array<std::uint8_t, 32> inner{};
  sha256_parts(ipad, message, inner.data());
  Mac out{};
  sha256_parts(opad, inner, out.data());
  return out;
}

Mac hmac_sha256(const OwnerKey& key, std::string_view message) {
  return hmac_sha256(
      key.bytes(),
      std::span(reinterpret_cast<const std::uint8_t*>(message.data()),
                message.size()));
}

std::string canonical_encode(TupleId id, std::span<const Value> values) {
  std::string out = std::to_string(id);
  for (Value v : values) {
    out.push_back('\x1f');
    out += std::to_string(v);
  }
  out.push_back('\x1e');
  return out;
}

Mac tuple_mac(const OwnerKey& key, TupleId id, std::span<const Value> values) {
  return hmac_sha256(key, canonical_encode(id, values));
}

SignedRelation sign_relation(const Schema& schema,
                             const std::vector<std::vector<Value>>& rows,
                             const OwnerKey& key) {
  std::vector<SignedTuple> tuples;
  tuples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != schema.width())
      throw SchemaError("row " + std::to_string(i + 1) + " has " +
                        std::to_string(rows[i].size()) + " values, schema has " +
                        std::to_string(schema.width()));
    SignedTuple t;
    t.id = i + 1;
    t.values = rows[i];
    t.mac = tuple_mac(key, t.id, t.values);
    tuples.push_back(std::move(t));
  }
  return SignedRelation(schema, std::move(tuples));
}

bool verify_tuple(const SignedTuple& tuple, const OwnerKey& key) {
  const Mac expected = tuple_mac(key, tuple.id, tuple.values);
  return CRYPTO_memcmp(expected.data(), tuple.mac.data(), expected.size()) == 0;
}

void verify_relation(const SignedRelation& relation, const OwnerKey& key) {
  for (const auto& t : relation.tuples())
    if (!verify_tuple(t, key))
      throw TamperError(t.id, "mac check failed for tuple " +
                                  std::to_string(t.id));
}

SampleSketch draw_sketch(const SignedRelation& relation, std::size_t k,
                         std::uint64_t seed) {
  if (relation.empty())
    throw EmptyPopulationError("cannot sample from an empty relation");
  if (k == 0) throw ParameterError("sketch size k must be >= 1");

  StreamRng rng(seed);
  std::uniform_int_distribution<TupleId> pick(1, relation.size());
  SampleSketch sketch;
  sketch.k = k;
  sketch.n = relation.size();
  sketch.seed = seed;
  sketch.entries.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const TupleId id = pick(rng);
    sketch.entries.push_back({id, relation.by_id(id).values});
  }
  return sketch;
}

TupleServer honest_server(const SignedRelation& relation) {
  return [&relation](std::span<const TupleId> ids) {
    std::vector<SignedTuple> out;
    out.reserve(ids.size());
    for (TupleId id : ids)
      if (id >= 1 && id <= relation.size()) out.push_back(relation.by_id(id));
    return out;
  };
}

std::vector<SignedTuple> resample_exchange(const TupleServer& server,
                                           std::span<const TupleId> requested,
                                           std::span<const TupleId> dummy,
                                           std::size_t n, const OwnerKey& key) {
  std::vector<TupleId> request(requested.begin(), requested.end());
  request.insert(request.end(), dummy.begin(), dummy.end());
  for (TupleId id : request)
    if (id < 1 || id > n)
      throw ParameterError("requested id " + std::to_string(id) +
                           " outside [1, " + std::to_string(n) + "]");
  std::sort(request.begin(), request.end());
  request.erase(std::unique(request.begin(), request.end()), request.end());

  std::vector<SignedTuple> returned = server(request);

  std::unordered_map<TupleId, std::size_t> by_id;
  for (std::size_t i = 0; i < returned.size(); ++i) {
    if (!verify_tuple(returned[i], key))
      throw TamperError(returned[i].id, "returned tuple " +
                                            std::to_string(returned[i].id) +
                                            " fails mac verification");
    by_id.emplace(returned[i].id, i);
  }

  std::vector<SignedTuple> out;
  out.reserve(requested.size());
  for (TupleId id : requested) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw WithheldTupleError(id);
    out.push_back(returned[it->second]);
  }
  return out;
}

SampleSketch refresh_sketch(const SampleSketch& sketch,
                            const TupleServer& server, std::size_t count,
                            std::size_t dummy_count, std::uint64_t seed,
                            const OwnerKey& key) {
  if (sketch.n == 0) throw EmptyPopulationError("sketch has no population");
  StreamRng rng(seed);
  std::uniform_int_distribution<TupleId> pick(1, sketch.n);

  count = std::min(count, sketch.entries.size());
  std::vector<std::size_t> positions(sketch.entries.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  std::shuffle(positions.begin(), positions.end(), rng);
  positions.resize(count);

  std::vector<TupleId> requested(count);
  for (auto& id : requested) id = pick(rng);
  std::vector<TupleId> dummy(dummy_count);
  for (auto& id : dummy) id = pick(rng);

  auto fresh = resample_exchange(server, requested, dummy, sketch.n, key);
  SampleSketch out = sketch;
  for (std::size_t i = 0; i < count; ++i)
    out.entries[positions[i]] = {fresh[i].id, fresh[i].values};
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw ParameterError("odd-length hex string");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [ptr, ec] =
        std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, out[i], 16);
    if (ec != std::errc() || ptr != hex.data() + 2 * i + 2)
      throw ParameterError("invalid hex digit near offset " +
                           std::to_string(2 * i));
  }
  return out;
}

}  // namespace veriq
