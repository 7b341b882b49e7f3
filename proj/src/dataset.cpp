#include "stm/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stm {

bool DataSet::complete() const {
  for (const auto& row : rows)
    if (!row.complete()) return false;
  return true;
}

long long DataSet::complete_row_count() const {
  long long n = 0;
  for (const auto& row : rows)
    if (row.complete()) ++n;
  return n;
}

namespace {

// RFC-4180: fields may be quoted; quoted fields may contain commas, newlines
// and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(field);
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !record.empty()) {
          record.push_back(field);
          records.push_back(record);
        }
        record.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field += c;
    }
  }
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(field);
    records.push_back(record);
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  return records;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

DataSet read_csv(const std::string& path, const std::string& na_token,
                 const VariableSpec* spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  auto records = parse_csv(in);
  if (records.empty()) throw std::runtime_error("'" + path + "': empty file");

  DataSet data;
  data.origin = path;
  data.na_token = na_token;
  data.spec.names = records[0];
  const int k = static_cast<int>(data.spec.names.size());
  if (spec) {
    if (spec->names != data.spec.names)
      throw std::runtime_error("'" + path + "': header does not match the supplied variables");
    data.spec = *spec;
  } else {
    data.spec.levels.assign(k, {});
  }

  data.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (static_cast<int>(rec.size()) != k)
      throw std::runtime_error("'" + path + "' row " + std::to_string(r) + ": expected " +
                               std::to_string(k) + " fields, got " + std::to_string(rec.size()));
    Sample row;
    row.values.resize(k);
    for (int c = 0; c < k; ++c) {
      const std::string& cell = rec[c];
      if (cell.empty() || cell == na_token) {
        row.values[c] = kMissing;
        continue;
      }
      int idx = data.spec.level_index(c, cell);
      if (idx < 0) {
        if (spec)
          throw std::runtime_error("'" + path + "' row " + std::to_string(r) + ", column '" +
                                   data.spec.names[c] + "': unknown category '" + cell + "'");
        idx = static_cast<int>(data.spec.levels[c].size());
        data.spec.levels[c].push_back(cell);
      }
      row.values[c] = idx;
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::string to_csv(const DataSet& data) {
  std::ostringstream out;
  for (int c = 0; c < data.spec.var_count(); ++c) {
    if (c) out << ',';
    write_field(out, data.spec.names[c]);
  }
  out << '\n';
  for (const auto& row : data.rows) {
    for (int c = 0; c < data.spec.var_count(); ++c) {
      if (c) out << ',';
      if (row.values[c] == kMissing)
        write_field(out, data.na_token);
      else
        write_field(out, data.spec.levels[c][row.values[c]]);
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const DataSet& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_csv(data);
}

}  // namespace stm
