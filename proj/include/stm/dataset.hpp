#pragma once

#include <string>
#include <vector>

#include "stm/variable_spec.hpp"

namespace stm {

constexpr int kMissing = -1;

// One observation: per variable, a level index or kMissing. The missingness
// mask is the set of kMissing positions.
struct Sample {
  std::vector<int> values;

  bool complete() const {
    for (int v : values)
      if (v == kMissing) return false;
    return true;
  }
  int missing_count() const {
    int n = 0;
    for (int v : values)
      if (v == kMissing) ++n;
    return n;
  }
  bool operator==(const Sample&) const = default;
};

struct DataSet {
  VariableSpec spec;
  std::vector<Sample> rows;
  std::string origin;          // file path or a short description
  std::string na_token = "NA";

  long long size() const { return static_cast<long long>(rows.size()); }
  bool complete() const;
  long long complete_row_count() const;
};

// Parses an RFC-4180 CSV with a header row naming the variables. Cells equal
// to na_token (and empty cells) become missing. When spec is null, levels are
// inferred in order of first appearance; otherwise cells are validated
// against it and unknown categories raise an error naming row and column.
DataSet read_csv(const std::string& path, const std::string& na_token = "NA",
                 const VariableSpec* spec = nullptr);

void write_csv(const DataSet& data, const std::string& path);
std::string to_csv(const DataSet& data);

}  // namespace stm
