#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stm/variable_spec.hpp"

namespace stm {

// Rooted directed tree whose root-to-leaf paths enumerate the unfoldings of a
// discrete process. Vertices carry integer ids; the root is id 0 and every
// vertex's parent has a smaller id (trees built from a VariableSpec use
// breadth-first level order). Immutable after construction.
//
// Path ids index the leaves in ascending vertex-id order; for symmetric trees
// this is the lexicographic order of level-index tuples.
class EventTree {
 public:
  // Symmetric tree over an ordered variable list: depth-d edges are labeled
  // by the levels of variable d.
  static EventTree from_variables(const VariableSpec& spec);

  // General tree from parent pointers and incoming-edge labels.
  // parent_of[0] must be -1; parent_of[v] < v otherwise.
  EventTree(std::vector<int> parent_of, std::vector<std::string> label_of);

  int vertex_count() const { return static_cast<int>(parent_.size()); }
  int parent(int v) const { return parent_[v]; }
  int depth(int v) const { return depth_[v]; }
  int max_depth() const { return max_depth_; }
  bool is_leaf(int v) const { return children_[v].empty(); }
  const std::vector<int>& children(int v) const { return children_[v]; }
  int child_count(int v) const { return static_cast<int>(children_[v].size()); }
  // Position of v among its parent's children (0 for the root).
  int slot(int v) const { return slot_of_[v]; }
  // Label of the incoming edge (parent(v), v); empty for the root.
  const std::string& edge_label(int v) const { return label_of_[v]; }
  // Ordered outgoing labels of situation v.
  std::vector<std::string> child_labels(int v) const;

  const std::vector<int>& situations() const { return situations_; }
  int situation_count() const { return static_cast<int>(situations_.size()); }
  const std::vector<int>& situations_at_depth(int d) const { return depth_situations_[d]; }

  int path_count() const { return static_cast<int>(leaves_.size()); }
  int leaf_of_path(int path) const { return leaves_[path]; }
  // Vertices root..leaf of the path.
  const std::vector<int>& path_vertices(int path) const { return path_vertices_[path]; }
  // (situation, child slot) pairs along the path.
  const std::vector<std::pair<int, int>>& path_edges(int path) const { return path_edges_[path]; }

  // Set when the tree was built from a VariableSpec.
  bool x_compatible() const { return variables_.has_value(); }
  const VariableSpec& variables() const;
  int level_count(int depth) const;
  // Path id of a complete level-index assignment (x-compatible trees).
  int path_of_values(const std::vector<int>& values) const;
  // Level indices along a path (x-compatible trees).
  std::vector<int> values_of_path(int path) const;

  bool same_structure(const EventTree& other) const;

 private:
  EventTree() = default;
  void finish_build();

  std::vector<int> parent_;
  std::vector<int> depth_;
  std::vector<int> slot_of_;
  std::vector<std::string> label_of_;
  std::vector<std::vector<int>> children_;
  std::vector<int> leaves_;
  std::vector<int> situations_;
  std::vector<std::vector<int>> depth_situations_;
  std::vector<std::vector<int>> path_vertices_;
  std::vector<std::vector<std::pair<int, int>>> path_edges_;
  std::optional<VariableSpec> variables_;
  std::vector<long long> strides_;
  int max_depth_ = 0;
};

}  // namespace stm
