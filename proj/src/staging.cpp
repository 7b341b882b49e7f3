#include "stm/staging.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace stm {

Staging Staging::saturated(const EventTree& tree) {
  std::vector<int> stage_of(tree.vertex_count(), -1);
  int next = 0;
  for (int v : tree.situations()) stage_of[v] = next++;
  Staging s;
  s.stage_of_ = std::move(stage_of);
  s.rebuild(tree);
  return s;
}

Staging Staging::full_independence(const EventTree& tree) {
  std::vector<int> stage_of(tree.vertex_count(), -1);
  for (int d = 0; d <= tree.max_depth(); ++d) {
    const auto& sits = tree.situations_at_depth(d);
    if (sits.empty()) continue;
    const auto labels = tree.child_labels(sits.front());
    for (int v : sits) {
      if (tree.child_labels(v) != labels)
        throw std::invalid_argument(
            "full_independence: situations at one depth have differing outgoing labels");
      stage_of[v] = d;
    }
  }
  Staging s;
  s.stage_of_ = std::move(stage_of);
  s.rebuild(tree);
  return s;
}

Staging Staging::from_stage_of(const EventTree& tree, std::vector<int> stage_of) {
  if (static_cast<int>(stage_of.size()) != tree.vertex_count())
    throw std::invalid_argument("staging: stage_of size must equal vertex count");
  for (int v = 0; v < tree.vertex_count(); ++v) {
    if (tree.is_leaf(v)) {
      stage_of[v] = -1;
    } else if (stage_of[v] < 0) {
      throw std::invalid_argument("staging: situation without a stage");
    }
  }
  Staging s;
  s.stage_of_ = std::move(stage_of);
  s.rebuild(tree);
  return s;
}

void Staging::rebuild(const EventTree& tree) {
  // Canonical renumbering: stages ordered by smallest member id.
  std::map<int, std::vector<int>> groups;
  for (int v : tree.situations()) groups[stage_of_[v]].push_back(v);
  members_.clear();
  members_.reserve(groups.size());
  std::vector<std::pair<int, const std::vector<int>*>> order;
  order.reserve(groups.size());
  for (const auto& [id, mem] : groups) order.emplace_back(mem.front(), &mem);
  std::sort(order.begin(), order.end());
  std::vector<int> renumbered(stage_of_.size(), -1);
  for (const auto& [first, mem] : order) {
    const int id = static_cast<int>(members_.size());
    for (int v : *mem) renumbered[v] = id;
    members_.push_back(*mem);
  }
  stage_of_ = std::move(renumbered);

  for (const auto& mem : members_) {
    const int rep = mem.front();
    const auto labels = tree.child_labels(rep);
    for (int v : mem) {
      if (tree.depth(v) != tree.depth(rep))
        throw std::invalid_argument("staging: stage spans multiple depths");
      if (tree.child_labels(v) != labels)
        throw std::invalid_argument("staging: stage members have differing outgoing labels");
    }
  }
}

std::vector<int> Staging::stages_at_depth(const EventTree& tree, int depth) const {
  std::vector<int> out;
  for (int s = 0; s < stage_count(); ++s)
    if (stage_depth(tree, s) == depth) out.push_back(s);
  return out;
}

int Staging::dim(const EventTree& tree) const {
  int d = 0;
  for (int s = 0; s < stage_count(); ++s) d += tree.child_count(representative(s)) - 1;
  return d;
}

Staging Staging::merged(const EventTree& tree, int stage_a, int stage_b) const {
  if (stage_a == stage_b) throw std::invalid_argument("merged: stages must differ");
  if (stage_a < 0 || stage_b < 0 || stage_a >= stage_count() || stage_b >= stage_count())
    throw std::invalid_argument("merged: stage id out of range");
  Staging s = *this;
  for (int v : members_[stage_b]) s.stage_of_[v] = stage_a;
  s.rebuild(tree);
  return s;
}

Staging Staging::split_singleton(const EventTree& tree, int situation) const {
  if (situation < 0 || situation >= tree.vertex_count() || tree.is_leaf(situation))
    throw std::invalid_argument("split_singleton: not a situation");
  const int stage = stage_of_[situation];
  if (members_[stage].size() < 2)
    throw std::invalid_argument("split_singleton: stage has a single member");
  Staging s = *this;
  s.stage_of_[situation] = stage_count();  // fresh id; canonicalized below
  s.rebuild(tree);
  return s;
}

}  // namespace stm
