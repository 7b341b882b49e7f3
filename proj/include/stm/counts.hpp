#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stm/dataset.hpp"
#include "stm/model.hpp"

namespace stm {

// Root-to-leaf paths consistent with a sample's observed values; missing
// positions are unconstrained. X-compatible trees only; path ids ascending.
std::vector<int> possible_paths(const EventTree& tree, const Sample& sample);

// General-tree variant matching observed labels positionally by constrained
// depth-first traversal. A leaf shallower than the last observed position
// cannot match. Throws if no path is consistent with the observations.
std::vector<int> possible_paths_labels(const EventTree& tree,
                                       const std::vector<std::optional<std::string>>& sample);

struct PathGroup {
  std::vector<int> paths;  // sorted ascending
  long long count = 0;
};

// Rows collected by identical possible-path sets, ordered lexicographically
// by the sorted path-id sequences.
struct GroupedCounts {
  std::vector<PathGroup> groups;
  std::vector<int> singleton_groups;  // indices of groups with one path

  long long total() const;
  long long singleton_total() const;
};

GroupedCounts group_counts(const EventTree& tree, const DataSet& data);

std::string grouped_counts_to_json(const GroupedCounts& grouped);

// Real-valued traversal counts per situation and outgoing slot (leaves get
// empty vectors). Real-valued so that expected counts plug in unchanged.
using SituationCounts = std::vector<std::vector<double>>;
// The same, pooled over the members of each stage.
using EdgeCounts = std::vector<std::vector<double>>;

SituationCounts zero_situation_counts(const EventTree& tree);
// Throws on missing entries, directing the caller to EM or pseudo-likelihoods.
SituationCounts situation_counts_complete(const EventTree& tree, const DataSet& data);
SituationCounts situation_counts_from_paths(const EventTree& tree,
                                            std::span<const double> path_counts);
void add_path_weight(const EventTree& tree, int path, double weight, SituationCounts& counts);

EdgeCounts pool_by_stage(const EventTree& tree, const Staging& staging,
                         const SituationCounts& counts);

EdgeCounts complete_edge_counts(const StagedTreeModel& model, const DataSet& data);
EdgeCounts complete_edge_counts(const StagedTreeModel& model,
                                std::span<const double> path_counts);

// Per-group path structure shared by the pseudo-likelihoods: the edges of the
// longest common vertex prefix, and the distinct (situation, slot) pairs each
// group's paths traverse at every depth. Computed once per (tree, grouping);
// stagings are then scored against it without touching the data again.
struct GroupGeometry {
  // [group] -> (situation, slot) edges of the common prefix.
  std::vector<std::vector<std::pair<int, int>>> lcp_edges;
  // [group][depth] -> distinct (situation, slot) pairs at that depth, or an
  // empty list when some path in the group ends above it.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> depth_pairs;
  int max_depth = 0;

  static GroupGeometry build(const EventTree& tree, const GroupedCounts& grouped);
};

}  // namespace stm
