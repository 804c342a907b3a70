#include <charconv>
#include <fstream>
#include <sstream>

#include "veriq/authstore.hpp"
#include "veriq/error.hpp"

namespace veriq {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

template <typename T>
T parse_integer(const std::string& text, const std::string& path,
                std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw SchemaError(path + ":" + std::to_string(line_no) +
                      ": not an integer: '" + text + "'");
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

RawTable read_raw_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!next_line(in, line)) throw SchemaError(path + ": missing header row");
  RawTable table{Schema(split_line(line)), {}};
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    auto fields = split_line(line);
    if (fields.size() != table.schema.width())
      throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.schema.width()) + " fields, got " +
                        std::to_string(fields.size()));
    std::vector<Value> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_integer<Value>(f, path, line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_raw_csv(const std::string& path, const RawTable& table) {
  auto out = open_out(path);
  const auto& attrs = table.schema.attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i)
    out << (i ? "," : "") << attrs[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_signed_csv(const std::string& path, const SignedRelation& relation) {
  auto out = open_out(path);
  out << "id";
  for (const auto& a : relation.schema().attributes()) out << ',' << a;
  out << ",mac\n";
  for (const auto& t : relation.tuples()) {
    out << t.id;
    for (Value v : t.values) out << ',' << v;
    out << ',' << to_hex(t.mac) << '\n';
  }
}

SignedRelation read_signed_csv(const std::string& path, const OwnerKey* key) {
  auto in = open_in(path);
  std::string line;
  if (!next_line(in, line)) throw SchemaError(path + ": missing header row");
  auto header = split_line(line);
  if (header.size() < 2 || header.front() != "id" || header.back() != "mac")
    throw SchemaError(path + ": signed CSV must start with 'id' and end with 'mac'");
  Schema schema(std::vector<std::string>(header.begin() + 1, header.end() - 1));

  std::vector<SignedTuple> tuples;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    auto fields = split_line(line);
    if (fields.size() != header.size())
      throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields");
    SignedTuple t;
    t.id = parse_integer<TupleId>(fields.front(), path, line_no);
    for (std::size_t i = 1; i + 1 < fields.size(); ++i)
      t.values.push_back(parse_integer<Value>(fields[i], path, line_no));
    auto mac = from_hex(fields.back());
    if (mac.size() != t.mac.size())
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": mac must be 32 bytes of hex");
    std::copy(mac.begin(), mac.end(), t.mac.begin());
    tuples.push_back(std::move(t));
  }
  SignedRelation relation(std::move(schema), std::move(tuples));
  if (key) verify_relation(relation, *key);
  return relation;
}

}  // namespace veriq
