#include "stm/event_tree.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace stm {

EventTree EventTree::from_variables(const VariableSpec& spec) {
  spec.validate();
  const int k = spec.var_count();
  std::vector<int> parent{-1};
  std::vector<std::string> label{""};
  // Level order: all depth-d vertices before depth d+1, children grouped by
  // parent in id order, slots in level order.
  std::vector<int> frontier{0};
  for (int d = 0; d < k; ++d) {
    std::vector<int> next;
    for (int v : frontier) {
      for (const auto& lv : spec.levels[d]) {
        parent.push_back(v);
        label.push_back(lv);
        next.push_back(static_cast<int>(parent.size()) - 1);
      }
    }
    frontier = std::move(next);
  }
  EventTree tree(std::move(parent), std::move(label));
  tree.variables_ = spec;
  tree.strides_.assign(k, 1);
  for (int d = k - 2; d >= 0; --d)
    tree.strides_[d] = tree.strides_[d + 1] * static_cast<long long>(spec.levels[d + 1].size());
  return tree;
}

EventTree::EventTree(std::vector<int> parent_of, std::vector<std::string> label_of)
    : parent_(std::move(parent_of)), label_of_(std::move(label_of)) {
  finish_build();
}

void EventTree::finish_build() {
  const int n = vertex_count();
  if (n == 0) throw std::invalid_argument("event tree: empty vertex set");
  if (parent_.size() != label_of_.size())
    throw std::invalid_argument("event tree: parent/label size mismatch");
  if (parent_[0] != -1) throw std::invalid_argument("event tree: vertex 0 must be the root");

  children_.assign(n, {});
  depth_.assign(n, 0);
  slot_of_.assign(n, 0);
  for (int v = 1; v < n; ++v) {
    const int p = parent_[v];
    if (p < 0 || p >= v)
      throw std::invalid_argument("event tree: parent ids must precede children");
    slot_of_[v] = static_cast<int>(children_[p].size());
    children_[p].push_back(v);
    depth_[v] = depth_[p] + 1;
    max_depth_ = std::max(max_depth_, depth_[v]);
  }

  for (int v = 0; v < n; ++v) {
    const auto& ch = children_[v];
    if (ch.empty()) {
      if (v == 0) throw std::invalid_argument("event tree: root has no outgoing edges");
      leaves_.push_back(v);
      continue;
    }
    if (ch.size() < 2)
      throw std::invalid_argument("event tree: situations need at least 2 outgoing edges");
    std::set<std::string> labels;
    for (int c : ch) labels.insert(label_of_[c]);
    if (labels.size() != ch.size())
      throw std::invalid_argument("event tree: duplicate outgoing labels at a situation");
    situations_.push_back(v);
  }

  depth_situations_.assign(max_depth_ + 1, {});
  for (int v : situations_) depth_situations_[depth_[v]].push_back(v);

  path_vertices_.reserve(leaves_.size());
  path_edges_.reserve(leaves_.size());
  for (int leaf : leaves_) {
    std::vector<int> verts;
    for (int v = leaf; v != -1; v = parent_[v]) verts.push_back(v);
    std::reverse(verts.begin(), verts.end());
    std::vector<std::pair<int, int>> edges;
    edges.reserve(verts.size() - 1);
    for (std::size_t i = 1; i < verts.size(); ++i)
      edges.emplace_back(verts[i - 1], slot_of_[verts[i]]);
    path_vertices_.push_back(std::move(verts));
    path_edges_.push_back(std::move(edges));
  }
}

std::vector<std::string> EventTree::child_labels(int v) const {
  std::vector<std::string> out;
  out.reserve(children_[v].size());
  for (int c : children_[v]) out.push_back(label_of_[c]);
  return out;
}

const VariableSpec& EventTree::variables() const {
  if (!variables_) throw std::logic_error("event tree was not built from a variable spec");
  return *variables_;
}

int EventTree::level_count(int depth) const {
  return static_cast<int>(variables().levels.at(depth).size());
}

int EventTree::path_of_values(const std::vector<int>& values) const {
  const VariableSpec& spec = variables();
  if (static_cast<int>(values.size()) != spec.var_count())
    throw std::invalid_argument("path_of_values: wrong number of values");
  long long id = 0;
  for (int d = 0; d < spec.var_count(); ++d) {
    const int v = values[d];
    if (v < 0 || v >= level_count(d))
      throw std::invalid_argument("path_of_values: level index out of range");
    id += strides_[d] * v;
  }
  return static_cast<int>(id);
}

std::vector<int> EventTree::values_of_path(int path) const {
  const VariableSpec& spec = variables();
  std::vector<int> out(spec.var_count());
  const auto& edges = path_edges(path);
  for (int d = 0; d < spec.var_count(); ++d) out[d] = edges[d].second;
  return out;
}

bool EventTree::same_structure(const EventTree& other) const {
  return parent_ == other.parent_ && label_of_ == other.label_of_;
}

}  // namespace stm
