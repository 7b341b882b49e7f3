#pragma once

#include <vector>

#include "stm/event_tree.hpp"

namespace stm {

// Partition of a tree's situations into stages. Situations in one stage must
// sit at the same depth and carry identical ordered outgoing-label lists, so
// a single transition distribution applies to all of them slot by slot.
//
// Stage ids are canonical: stages are numbered 0..count-1 by their smallest
// member situation id, so equal partitions compare equal structurally.
// Mutations return new values.
class Staging {
 public:
  Staging() = default;  // empty; assign before use

  static Staging saturated(const EventTree& tree);
  // One stage per depth; throws if some depth's situations disagree on labels.
  static Staging full_independence(const EventTree& tree);
  // Validates and canonicalizes an explicit assignment (-1 on leaves allowed).
  static Staging from_stage_of(const EventTree& tree, std::vector<int> stage_of);

  int stage_count() const { return static_cast<int>(members_.size()); }
  int stage_of(int vertex) const { return stage_of_[vertex]; }
  const std::vector<int>& members(int stage) const { return members_[stage]; }
  int representative(int stage) const { return members_[stage].front(); }
  int stage_depth(const EventTree& tree, int stage) const {
    return tree.depth(representative(stage));
  }
  std::vector<int> stages_at_depth(const EventTree& tree, int depth) const;

  // Number of free parameters: sum over stages of (outgoing labels - 1).
  int dim(const EventTree& tree) const;

  Staging merged(const EventTree& tree, int stage_a, int stage_b) const;
  // Extracts one situation of a multi-member stage into its own stage.
  Staging split_singleton(const EventTree& tree, int situation) const;

  bool operator==(const Staging& other) const { return stage_of_ == other.stage_of_; }

 private:
  void rebuild(const EventTree& tree);

  std::vector<int> stage_of_;  // per vertex; -1 on leaves
  std::vector<std::vector<int>> members_;
};

}  // namespace stm
