#include "stm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace stm {

void validate_theta(const EventTree& tree, const Staging& staging,
                    const TransitionProbabilities& theta, double tol) {
  if (static_cast<int>(theta.per_stage.size()) != staging.stage_count())
    throw std::invalid_argument("theta: one distribution per stage required");
  for (int s = 0; s < staging.stage_count(); ++s) {
    const auto& dist = theta.per_stage[s];
    const int arity = tree.child_count(staging.representative(s));
    if (static_cast<int>(dist.size()) != arity)
      throw std::invalid_argument("theta: distribution size does not match stage labels");
    double sum = 0.0;
    for (double p : dist) {
      if (!(p >= 0.0) || p > 1.0 + tol)
        throw std::invalid_argument("theta: probability outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
      throw std::invalid_argument("theta: stage distribution does not sum to 1");
  }
}

TransitionProbabilities uniform_theta(const EventTree& tree, const Staging& staging) {
  TransitionProbabilities theta;
  theta.per_stage.resize(staging.stage_count());
  for (int s = 0; s < staging.stage_count(); ++s) {
    const int arity = tree.child_count(staging.representative(s));
    theta.per_stage[s].assign(arity, 1.0 / arity);
  }
  return theta;
}

const TransitionProbabilities& StagedTreeModel::require_theta() const {
  if (!theta) throw std::logic_error("model has no transition probabilities; fit first");
  return *theta;
}

StagedTreeModel make_model(std::shared_ptr<const EventTree> tree, Staging staging,
                           std::optional<TransitionProbabilities> theta) {
  if (!tree) throw std::invalid_argument("make_model: null tree");
  if (theta) validate_theta(*tree, staging, *theta);
  return StagedTreeModel{std::move(tree), std::move(staging), std::move(theta)};
}

double path_probability(const StagedTreeModel& model, int path) {
  const TransitionProbabilities& theta = model.require_theta();
  double prob = 1.0;
  for (const auto& [situation, slot] : model.tree->path_edges(path))
    prob *= theta.per_stage[model.staging.stage_of(situation)][slot];
  return prob;
}

std::vector<double> path_distribution(const StagedTreeModel& model) {
  std::vector<double> out(model.tree->path_count());
  for (int p = 0; p < model.tree->path_count(); ++p) out[p] = path_probability(model, p);
  return out;
}

}  // namespace stm
