#include "stm/counts.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stm {

std::vector<int> possible_paths(const EventTree& tree, const Sample& sample) {
  const VariableSpec& spec = tree.variables();
  const int k = spec.var_count();
  if (static_cast<int>(sample.values.size()) != k)
    throw std::invalid_argument("possible_paths: sample arity mismatch");

  long long base = 0;
  std::vector<int> missing_dims;
  std::vector<long long> strides(k);
  {
    long long stride = 1;
    for (int d = k - 1; d >= 0; --d) {
      strides[d] = stride;
      stride *= static_cast<long long>(spec.levels[d].size());
    }
  }
  for (int d = 0; d < k; ++d) {
    const int v = sample.values[d];
    if (v == kMissing) {
      missing_dims.push_back(d);
    } else {
      if (v < 0 || v >= static_cast<int>(spec.levels[d].size()))
        throw std::invalid_argument("possible_paths: level index out of range");
      base += strides[d] * v;
    }
  }

  std::vector<int> out;
  out.reserve(1);
  // Odometer over the missing dimensions, most significant first, so path
  // ids come out ascending.
  std::vector<int> digits(missing_dims.size(), 0);
  while (true) {
    long long id = base;
    for (std::size_t i = 0; i < missing_dims.size(); ++i)
      id += strides[missing_dims[i]] * digits[i];
    out.push_back(static_cast<int>(id));
    int pos = static_cast<int>(missing_dims.size()) - 1;
    while (pos >= 0) {
      if (++digits[pos] < static_cast<int>(spec.levels[missing_dims[pos]].size())) break;
      digits[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

namespace {

void match_paths(const EventTree& tree, const std::vector<std::optional<std::string>>& sample,
                 int vertex, int position, std::vector<int>& leaves) {
  if (tree.is_leaf(vertex)) {
    for (std::size_t i = position; i < sample.size(); ++i)
      if (sample[i].has_value()) return;  // observed value beyond the path's end
    leaves.push_back(vertex);
    return;
  }
  for (int child : tree.children(vertex)) {
    if (position < static_cast<int>(sample.size()) && sample[position].has_value() &&
        *sample[position] != tree.edge_label(child))
      continue;
    match_paths(tree, sample, child, position + 1, leaves);
  }
}

}  // namespace

std::vector<int> possible_paths_labels(const EventTree& tree,
                                       const std::vector<std::optional<std::string>>& sample) {
  std::vector<int> leaves;
  match_paths(tree, sample, 0, 0, leaves);
  if (leaves.empty())
    throw std::runtime_error("possible_paths: sample is inconsistent with the tree");
  std::sort(leaves.begin(), leaves.end());
  std::vector<int> paths;
  paths.reserve(leaves.size());
  for (int p = 0, li = 0; p < tree.path_count() && li < static_cast<int>(leaves.size()); ++p)
    if (tree.leaf_of_path(p) == leaves[li]) {
      paths.push_back(p);
      ++li;
    }
  return paths;
}

long long GroupedCounts::total() const {
  long long n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

long long GroupedCounts::singleton_total() const {
  long long n = 0;
  for (int i : singleton_groups) n += groups[i].count;
  return n;
}

GroupedCounts group_counts(const EventTree& tree, const DataSet& data) {
  std::map<std::vector<int>, long long> by_paths;
  for (const auto& row : data.rows) ++by_paths[possible_paths(tree, row)];
  GroupedCounts out;
  out.groups.reserve(by_paths.size());
  for (auto& [paths, count] : by_paths) {
    if (paths.size() == 1) out.singleton_groups.push_back(static_cast<int>(out.groups.size()));
    out.groups.push_back(PathGroup{paths, count});
  }
  return out;
}

std::string grouped_counts_to_json(const GroupedCounts& grouped) {
  std::ostringstream out;
  out << "{\"groups\":[";
  for (std::size_t i = 0; i < grouped.groups.size(); ++i) {
    if (i) out << ',';
    out << "{\"paths\":[";
    for (std::size_t j = 0; j < grouped.groups[i].paths.size(); ++j) {
      if (j) out << ',';
      out << grouped.groups[i].paths[j];
    }
    out << "],\"n\":" << grouped.groups[i].count << '}';
  }
  out << "],\"total\":" << grouped.total() << '}';
  return out.str();
}

SituationCounts zero_situation_counts(const EventTree& tree) {
  SituationCounts counts(tree.vertex_count());
  for (int v : tree.situations()) counts[v].assign(tree.child_count(v), 0.0);
  return counts;
}

void add_path_weight(const EventTree& tree, int path, double weight, SituationCounts& counts) {
  for (const auto& [situation, slot] : tree.path_edges(path)) counts[situation][slot] += weight;
}

SituationCounts situation_counts_complete(const EventTree& tree, const DataSet& data) {
  SituationCounts counts = zero_situation_counts(tree);
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    if (!data.rows[r].complete())
      throw std::invalid_argument("row " + std::to_string(r) +
                                  " has missing values; use EM or a pseudo-likelihood");
    add_path_weight(tree, tree.path_of_values(data.rows[r].values), 1.0, counts);
  }
  return counts;
}

SituationCounts situation_counts_from_paths(const EventTree& tree,
                                            std::span<const double> path_counts) {
  if (static_cast<int>(path_counts.size()) != tree.path_count())
    throw std::invalid_argument("path count vector size mismatch");
  SituationCounts counts = zero_situation_counts(tree);
  for (int p = 0; p < tree.path_count(); ++p) {
    if (path_counts[p] < 0.0) throw std::invalid_argument("negative path count");
    if (path_counts[p] != 0.0) add_path_weight(tree, p, path_counts[p], counts);
  }
  return counts;
}

EdgeCounts pool_by_stage(const EventTree& tree, const Staging& staging,
                         const SituationCounts& counts) {
  EdgeCounts pooled(staging.stage_count());
  for (int s = 0; s < staging.stage_count(); ++s)
    pooled[s].assign(tree.child_count(staging.representative(s)), 0.0);
  for (int v : tree.situations()) {
    const int s = staging.stage_of(v);
    for (std::size_t j = 0; j < counts[v].size(); ++j) pooled[s][j] += counts[v][j];
  }
  return pooled;
}

EdgeCounts complete_edge_counts(const StagedTreeModel& model, const DataSet& data) {
  return pool_by_stage(*model.tree, model.staging,
                       situation_counts_complete(*model.tree, data));
}

EdgeCounts complete_edge_counts(const StagedTreeModel& model,
                                std::span<const double> path_counts) {
  return pool_by_stage(*model.tree, model.staging,
                       situation_counts_from_paths(*model.tree, path_counts));
}

GroupGeometry GroupGeometry::build(const EventTree& tree, const GroupedCounts& grouped) {
  GroupGeometry geom;
  geom.max_depth = tree.max_depth();
  geom.lcp_edges.resize(grouped.groups.size());
  geom.depth_pairs.resize(grouped.groups.size());
  for (std::size_t g = 0; g < grouped.groups.size(); ++g) {
    const auto& paths = grouped.groups[g].paths;
    geom.depth_pairs[g].resize(geom.max_depth);
    for (int d = 0; d < geom.max_depth; ++d) {
      auto& pairs = geom.depth_pairs[g][d];
      bool all_reach = true;
      for (int p : paths) {
        const auto& edges = tree.path_edges(p);
        if (d >= static_cast<int>(edges.size())) {
          all_reach = false;
          break;
        }
        if (std::find(pairs.begin(), pairs.end(), edges[d]) == pairs.end())
          pairs.push_back(edges[d]);
      }
      if (!all_reach) pairs.clear();
    }
    // Common prefix: depths where a single (situation, slot) pair serves all
    // paths, up to the first disagreement.
    for (int d = 0; d < geom.max_depth; ++d) {
      if (geom.depth_pairs[g][d].size() != 1) break;
      geom.lcp_edges[g].push_back(geom.depth_pairs[g][d].front());
    }
  }
  return geom;
}

}  // namespace stm
