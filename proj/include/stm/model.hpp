#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "stm/staging.hpp"

namespace stm {

// One categorical distribution per stage, aligned with the ordered outgoing
// labels of the stage's representative situation.
struct TransitionProbabilities {
  std::vector<std::vector<double>> per_stage;

  bool operator==(const TransitionProbabilities&) const = default;
};

// Per stage, each distribution must be nonnegative and sum to 1 within tol.
void validate_theta(const EventTree& tree, const Staging& staging,
                    const TransitionProbabilities& theta, double tol = 1e-12);

TransitionProbabilities uniform_theta(const EventTree& tree, const Staging& staging);

struct StagedTreeModel {
  std::shared_ptr<const EventTree> tree;
  Staging staging;
  std::optional<TransitionProbabilities> theta;

  const TransitionProbabilities& require_theta() const;
};

StagedTreeModel make_model(std::shared_ptr<const EventTree> tree, Staging staging,
                           std::optional<TransitionProbabilities> theta = std::nullopt);

// Product of stage transition probabilities along the path's edges.
double path_probability(const StagedTreeModel& model, int path);

// All root-to-leaf path probabilities, indexed by path id.
std::vector<double> path_distribution(const StagedTreeModel& model);

}  // namespace stm
