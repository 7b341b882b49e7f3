#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "stm/likelihood.hpp"

namespace stm {

enum class ScoreKind { FULL_MISSING, OMIT, FIRST_MISSING, STAGE_AVERAGE, COMPLETE };

const char* score_kind_name(ScoreKind kind);

enum class SearchStrategy { HC, BHC };

struct SearchConfig {
  ScoreKind score = ScoreKind::COMPLETE;
  SearchStrategy strategy = SearchStrategy::BHC;
  int max_iter = 1000;          // accepted moves (per depth for BHC)
  std::uint64_t seed = 0;       // reserved; stage search itself is deterministic
  double score_epsilon = 1e-9;  // strict-improvement threshold
};

struct SearchMove {
  std::string description;
  double score;
};

struct SearchResult {
  StagedTreeModel model;
  double score = 0.0;
  std::vector<SearchMove> trace;
  double elapsed_s = 0.0;
};

// Merge-only greedy search from the saturated staging, one depth at a time
// from the root down: apply the best strictly-improving merge until none
// improves. Theta is refit by MLE after every accepted move.
SearchResult bhc_stage_search(const std::shared_ptr<const EventTree>& tree, const DataSet& data,
                              const SearchConfig& config);

// Greedy best-improvement over a joint move pool: merges of any two
// same-depth stages plus singleton extractions from multi-member stages.
// Starts from the saturated staging unless an explicit start is given.
SearchResult hc_stage_search(const std::shared_ptr<const EventTree>& tree, const DataSet& data,
                             const SearchConfig& config, const Staging* start = nullptr);

// BIC penalty sample size for a score kind: the omit score counts only
// complete rows, every other kind the full row count (floored at 1 so the
// degenerate no-data score stays comparable).
long long score_penalty_n(ScoreKind kind, const GroupedCounts& grouped);

}  // namespace stm
