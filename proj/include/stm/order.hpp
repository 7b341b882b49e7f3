#pragma once

#include "stm/em.hpp"

namespace stm {

struct OrderSearchConfig {
  SearchConfig search;
  std::optional<EmConfig> em;  // when set, each ordering is learned by structural EM
  int max_orders = 0;          // 0 = enumerate all (up to 8 variables)
  std::uint64_t seed = 0;      // subset sampling
};

struct OrderScore {
  std::vector<std::string> ordering;
  double score;
};

struct OrderSearchResult {
  std::vector<std::string> ordering;
  SearchResult result;                 // model over the winning variable order
  std::vector<OrderScore> order_scores;  // every ordering evaluated, in evaluation order
};

// Learns the event tree by enumerating variable orderings (all of them up to
// 8 variables, or a seeded subset via max_orders), running the configured
// stage learner on each, and keeping the best-scoring order. Searches are
// compared on their own score; structural-EM runs are compared on the BIC of
// the missing-data log-likelihood over the original data. Ties go to the
// lexicographically earlier ordering.
OrderSearchResult order_search(const VariableSpec& spec, const DataSet& data,
                               const OrderSearchConfig& config);

// Reorders columns (by variable name) to match the target spec, e.g. to
// evaluate data against a model learned under another ordering.
DataSet align_columns(const DataSet& data, const VariableSpec& target);

}  // namespace stm
