#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "veriq/authstore.hpp"
#include "veriq/error.hpp"

using namespace veriq;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string mac_hex(const Mac& m) { return to_hex(m); }

OwnerKey test_key() { return OwnerKey::from_hex(std::string(64, 'a')); }

SignedRelation small_relation(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_int_distribution<Value> v(-1000000, 1000000);
  std::vector<std::vector<Value>> raw(rows, std::vector<Value>(3));
  for (auto& r : raw)
    for (auto& x : r) x = v(g);
  return sign_relation(Schema({"a", "b", "c"}), raw, test_key());
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("veriq_test_" + name);
}

}  // namespace

TEST_SUITE("authstore") {

TEST_CASE("hmac matches the RFC 4231 vectors") {
  const std::vector<std::uint8_t> k1(20, 0x0b);
  CHECK(mac_hex(hmac_sha256(k1, bytes_of("Hi There"))) ==
        "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  CHECK(mac_hex(hmac_sha256(bytes_of("Jefe"), bytes_of("what do ya want for nothing?"))) ==
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  // Key longer than the block size is hashed first.
  const std::vector<std::uint8_t> k6(131, 0xaa);
  CHECK(mac_hex(hmac_sha256(
            k6, bytes_of("Test Using Larger Than Block-Size Key - Hash Key First"))) ==
        "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
}

TEST_CASE("hmac agrees with the OpenSSL one-shot on random inputs") {
  std::mt19937_64 g(42);
  std::uniform_int_distribution<int> len(0, 300), byte(0, 255);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::uint8_t> key(1 + len(g) % 150);
    for (auto& b : key) b = static_cast<std::uint8_t>(byte(g));
    std::string msg(len(g), '\0');
    for (auto& c : msg) c = static_cast<char>(byte(g));
    const Mac ours = hmac_sha256(key, std::span(reinterpret_cast<const std::uint8_t*>(msg.data()),
                                                msg.size()));
    const auto ref = oracle::hmac_sha256(key, msg);
    REQUIRE(ref.size() == 32);
    CHECK(std::equal(ours.begin(), ours.end(), ref.begin()));
  }
}

TEST_CASE("hmac is deterministic and sensitive to one message bit") {
  const std::vector<std::uint8_t> k(20, 0x0b);
  std::string msg = "Hi There";
  const Mac a = hmac_sha256(k, bytes_of(msg));
  CHECK(a == hmac_sha256(k, bytes_of(msg)));
  msg[0] ^= 0x01;
  const Mac b = hmac_sha256(k, bytes_of(msg));
  CHECK(a != b);
  CHECK(mac_hex(b) == oracle::hex(oracle::hmac_sha256(k, msg).data(), 32));
}

TEST_CASE("empty key is rejected") {
  CHECK_THROWS_AS(OwnerKey(std::vector<std::uint8_t>{}), InvalidKeyError);
  CHECK_THROWS_AS(hmac_sha256(std::span<const std::uint8_t>{}, bytes_of("x")), InvalidKeyError);
  CHECK_THROWS_AS(OwnerKey::from_hex(""), InvalidKeyError);
}

TEST_CASE("canonical encoding layout") {
  const std::vector<Value> v{3, -4, 0};
  CHECK(canonical_encode(12, v) == std::string("12\x1f" "3\x1f-4\x1f" "0\x1e"));
  CHECK(canonical_encode(1, {}) == std::string("1\x1e"));
}

TEST_CASE("canonical encoding is injective on random near-collisions") {
  // Pairs that would collide under naive concatenation.
  std::vector<std::pair<TupleId, std::vector<Value>>> inputs = {
      {1, {23}}, {12, {3}}, {123, {}}, {1, {2, 3}}, {12, {}}, {1, {-23}}, {1, {2, -3}}};
  std::mt19937_64 g(7);
  std::uniform_int_distribution<Value> v(-20, 20);
  std::uniform_int_distribution<int> w(0, 3);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Value> vals(w(g));
    for (auto& x : vals) x = v(g);
    inputs.push_back({static_cast<TupleId>(1 + std::abs(v(g))), vals});
  }
  std::map<std::string, std::pair<TupleId, std::vector<Value>>> by_code;
  for (const auto& [id, vals] : inputs) {
    const auto code = canonical_encode(id, vals);
    auto [it, fresh] = by_code.emplace(code, std::make_pair(id, vals));
    if (!fresh) CHECK((it->second == std::make_pair(id, vals)));
  }
}

TEST_CASE("sign_relation assigns ids in input order with verifying macs") {
  const OwnerKey key = test_key();
  const SignedRelation rel =
      sign_relation(Schema({"a"}), {{5}, {6}, {7}}, key);
  REQUIRE(rel.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rel.tuples()[i].id == i + 1);
    CHECK(verify_tuple(rel.tuples()[i], key));
    const auto ref = oracle::hmac_sha256(
        {key.bytes().begin(), key.bytes().end()},
        canonical_encode(rel.tuples()[i].id, rel.tuples()[i].values));
    CHECK(std::equal(ref.begin(), ref.end(), rel.tuples()[i].mac.begin()));
  }
  CHECK_NOTHROW(verify_relation(rel, key));

  const SignedRelation empty = sign_relation(Schema({"a"}), {}, key);
  CHECK(empty.size() == 0);
  CHECK_THROWS_AS(sign_relation(Schema({"a"}), {{1, 2}}, key), SchemaError);
}

TEST_CASE("schema rejects duplicate and reserved names") {
  CHECK_THROWS_AS(Schema({"a", "a"}), SchemaError);
  CHECK_THROWS_AS(Schema({"id"}), SchemaError);
  CHECK_THROWS_AS(Schema({"mac"}), SchemaError);
  CHECK(Schema({"x", "y"}).require("y") == 1);
  CHECK_THROWS_AS(Schema({"x"}).require("z"), SchemaError);
}

TEST_CASE("verify_tuple rejects simple edits") {
  const OwnerKey key = test_key();
  SignedRelation rel = small_relation(3, 1);
  SignedTuple t = rel.tuples()[1];
  CHECK(verify_tuple(t, key));
  SignedTuple bumped = t;
  bumped.id += 1;
  CHECK_FALSE(verify_tuple(bumped, key));
  SignedTuple zeroed = t;
  zeroed.mac.fill(0);
  CHECK_FALSE(verify_tuple(zeroed, key));
  SignedTuple changed = t;
  changed.values[0] ^= 1;
  CHECK_FALSE(verify_tuple(changed, key));
  CHECK_FALSE(verify_tuple(t, OwnerKey::from_hex(std::string(64, 'b'))));
}

TEST_CASE("every single-bit flip of a small tuple is detected") {
  const OwnerKey key = test_key();
  const SignedRelation rel = sign_relation(Schema({"a", "b"}), {{17, -3}}, key);
  const SignedTuple t = rel.tuples()[0];
  int flips = 0;
  for (int bit = 0; bit < 64; ++bit) {
    SignedTuple x = t;
    x.id ^= (TupleId{1} << bit);
    CHECK_FALSE(verify_tuple(x, key));
    ++flips;
    for (std::size_t col = 0; col < t.values.size(); ++col) {
      SignedTuple y = t;
      y.values[col] ^= (Value{1} << bit);
      CHECK_FALSE(verify_tuple(y, key));
      ++flips;
    }
  }
  for (int byte = 0; byte < 32; ++byte)
    for (int bit = 0; bit < 8; ++bit) {
      SignedTuple z = t;
      z.mac[byte] ^= static_cast<std::uint8_t>(1u << bit);
      CHECK_FALSE(verify_tuple(z, key));
      ++flips;
    }
  CHECK(flips == 64 * 3 + 256);
}

TEST_CASE("verify_relation names the tampered tuple") {
  const OwnerKey key = test_key();
  const SignedRelation rel = small_relation(5, 3);
  auto tuples = rel.tuples();
  tuples[3].values[2] += 1;
  const SignedRelation bad(rel.schema(), tuples);
  try {
    verify_relation(bad, key);
    FAIL("expected a TamperError");
  } catch (const TamperError& e) {
    CHECK(e.id() == 4);
  }
}

TEST_CASE("relation ids must be exactly 1..N") {
  const SignedRelation rel = small_relation(3, 4);
  auto tuples = rel.tuples();
  tuples[2].id = 7;
  CHECK_THROWS_AS(SignedRelation(rel.schema(), tuples), SchemaError);
}

TEST_CASE("draw_sketch basics") {
  const SignedRelation one = small_relation(1, 5);
  const SampleSketch s = draw_sketch(one, 5, 9);
  REQUIRE(s.entries.size() == 5);
  for (const auto& e : s.entries) {
    CHECK(e.id == 1);
    CHECK(e.values == one.tuples()[0].values);
  }
  CHECK(s.k == 5);
  CHECK(s.n == 1);

  const SignedRelation rel = small_relation(50, 6);
  const SampleSketch a = draw_sketch(rel, 100, 123);
  const SampleSketch b = draw_sketch(rel, 100, 123);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].id == b.entries[i].id);
    CHECK(a.entries[i].values == rel.by_id(a.entries[i].id).values);
  }

  CHECK_THROWS_AS(draw_sketch(SignedRelation(Schema({"a"}), {}), 3, 1), EmptyPopulationError);
  CHECK_THROWS_AS(draw_sketch(rel, 0, 1), ParameterError);
}

TEST_CASE("draw_sketch is uniform by chi-square") {
  std::vector<std::vector<Value>> rows(100000, std::vector<Value>{0});
  const SignedRelation rel = sign_relation(Schema({"a"}), rows, test_key());
  const SampleSketch s = draw_sketch(rel, 10000, 2024);
  // Bucket ids into 100 equal bins so the expected count per cell is 100.
  std::vector<std::size_t> bins(100, 0);
  for (const auto& e : s.entries) ++bins[(e.id - 1) / 1000];
  CHECK(oracle::chi_square_p(bins, 100.0) > 0.001);
}

TEST_CASE("per-id hit counts stay in binomial 4-sigma bands across seeds") {
  const SignedRelation rel = small_relation(20, 8);
  const std::size_t k = 40, seeds = 2000;
  std::vector<double> hits(20, 0);
  for (std::size_t s = 0; s < seeds; ++s)
    for (const auto& e : draw_sketch(rel, k, s).entries) hits[e.id - 1] += 1;
  const double p = 1.0 / 20, n = static_cast<double>(k * seeds);
  const double sigma = std::sqrt(n * p * (1 - p));
  for (double h : hits) CHECK(std::fabs(h - n * p) <= 4 * sigma);
}

TEST_CASE("resample exchange against honest and cheating servers") {
  const OwnerKey key = test_key();
  const SignedRelation rel = small_relation(10, 11);
  const std::vector<TupleId> req{3, 7}, dummy{1};

  std::vector<TupleId> seen_request;
  TupleServer spy = [&](std::span<const TupleId> ids) {
    seen_request.assign(ids.begin(), ids.end());
    return honest_server(rel)(ids);
  };
  const auto got = resample_exchange(spy, req, dummy, rel.size(), key);
  REQUIRE(got.size() == 2);
  CHECK(got[0].id == 3);
  CHECK(got[1].id == 7);
  // The server only sees one sorted list mixing requested and dummy ids.
  CHECK(seen_request == std::vector<TupleId>{1, 3, 7});

  TupleServer withholding = [&](std::span<const TupleId> ids) {
    auto out = honest_server(rel)(ids);
    std::erase_if(out, [](const SignedTuple& t) { return t.id == 7; });
    return out;
  };
  try {
    resample_exchange(withholding, req, dummy, rel.size(), key);
    FAIL("expected a WithheldTupleError");
  } catch (const WithheldTupleError& e) {
    CHECK(e.id() == 7);
  }

  TupleServer altering = [&](std::span<const TupleId> ids) {
    auto out = honest_server(rel)(ids);
    for (auto& t : out)
      if (t.id == 3) t.values[1] += 5;
    return out;
  };
  CHECK_THROWS_AS(resample_exchange(altering, req, dummy, rel.size(), key), TamperError);
}

TEST_CASE("refresh_sketch replaces entries with verified tuples") {
  const OwnerKey key = test_key();
  const SignedRelation rel = small_relation(30, 12);
  const SampleSketch s = draw_sketch(rel, 20, 5);
  const SampleSketch r = refresh_sketch(s, honest_server(rel), 8, 4, 77, key);
  CHECK(r.k == s.k);
  CHECK(r.entries.size() == s.entries.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    CHECK(r.entries[i].values == rel.by_id(r.entries[i].id).values);
    changed += r.entries[i].id != s.entries[i].id;
  }
  CHECK(changed <= 8);
}

TEST_CASE("hex round trip and bad input") {
  const std::vector<std::uint8_t> b{0x00, 0xab, 0xff};
  CHECK(to_hex(b) == "00abff");
  CHECK(from_hex("00ABff") == b);
  CHECK_THROWS_AS(from_hex("abc"), ParameterError);
  CHECK_THROWS_AS(from_hex("zz"), ParameterError);
}

TEST_CASE("CSV round trips") {
  const OwnerKey key = test_key();
  const auto raw_path = temp_path("raw.csv").string();
  const auto signed_path = temp_path("signed.csv").string();
  const RawTable t{Schema({"x", "y"}), {{1, -2}, {30, 4}}};
  write_raw_csv(raw_path, t);
  const RawTable back = read_raw_csv(raw_path);
  CHECK(back.schema == t.schema);
  CHECK(back.rows == t.rows);

  const SignedRelation rel = sign_relation(t.schema, t.rows, key);
  write_signed_csv(signed_path, rel);
  {
    std::ifstream in(signed_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,x,y,mac");
  }
  const SignedRelation again = read_signed_csv(signed_path, &key);
  CHECK(again.tuples() == rel.tuples());

  // Tampering with the file is caught on load.
  {
    std::ifstream in(signed_path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    text.replace(text.find("30,4"), 4, "31,4");
    std::ofstream(signed_path) << text;
  }
  CHECK_THROWS_AS(read_signed_csv(signed_path, &key), TamperError);
  CHECK_NOTHROW(read_signed_csv(signed_path));

  std::ofstream(raw_path) << "x,y\n1,notanumber\n";
  CHECK_THROWS_AS(read_raw_csv(raw_path), SchemaError);
  std::ofstream(raw_path) << "x,y\n1\n";
  CHECK_THROWS_AS(read_raw_csv(raw_path), SchemaError);
  std::filesystem::remove(raw_path);
  std::filesystem::remove(signed_path);
}

}  // TEST_SUITE
