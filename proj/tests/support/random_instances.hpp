// Seeded random model/data instances for property tests.
#pragma once

#include <memory>
#include <string>

#include "stm/dataset.hpp"
#include "stm/model.hpp"
#include "stm/rng.hpp"

namespace stm::test {

inline VariableSpec random_spec(Rng& rng, int max_vars = 4, int max_levels = 3) {
  const int k = 2 + rng.uniform_int(max_vars - 1);
  VariableSpec spec;
  for (int d = 0; d < k; ++d) {
    spec.names.push_back("X" + std::to_string(d + 1));
    const int levels = 2 + rng.uniform_int(max_levels - 1);
    std::vector<std::string> lv;
    for (int l = 0; l < levels; ++l) lv.push_back("l" + std::to_string(l));
    spec.levels.push_back(std::move(lv));
  }
  return spec;
}

inline Staging random_staging(const EventTree& tree, Rng& rng) {
  Staging staging = Staging::saturated(tree);
  for (int d = 0; d < tree.max_depth(); ++d) {
    const int merges = rng.uniform_int(static_cast<int>(tree.situations_at_depth(d).size()));
    for (int m = 0; m < merges; ++m) {
      const auto stages = staging.stages_at_depth(tree, d);
      if (stages.size() < 2) break;
      const int a = rng.uniform_int(static_cast<int>(stages.size()));
      int b = rng.uniform_int(static_cast<int>(stages.size()) - 1);
      if (b >= a) ++b;
      staging = staging.merged(tree, stages[a], stages[b]);
    }
  }
  return staging;
}

// Random distributions bounded away from zero.
inline TransitionProbabilities random_theta(const EventTree& tree, const Staging& staging,
                                            Rng& rng, double min_mass = 0.05) {
  TransitionProbabilities theta;
  theta.per_stage.resize(staging.stage_count());
  for (int s = 0; s < staging.stage_count(); ++s) {
    const int arity = tree.child_count(staging.representative(s));
    auto& dist = theta.per_stage[s];
    dist.resize(arity);
    double sum = 0.0;
    for (double& p : dist) {
      p = min_mass + rng.uniform01();
      sum += p;
    }
    for (double& p : dist) p /= sum;
  }
  return theta;
}

inline StagedTreeModel random_model(Rng& rng, int max_vars = 4, int max_levels = 3) {
  const VariableSpec spec = random_spec(rng, max_vars, max_levels);
  auto tree = std::make_shared<const EventTree>(EventTree::from_variables(spec));
  Staging staging = random_staging(*tree, rng);
  TransitionProbabilities theta = random_theta(*tree, staging, rng);
  return StagedTreeModel{tree, std::move(staging), std::move(theta)};
}

// Rows drawn uniformly over complete assignments, then holes punched
// per-cell with the given probability.
inline DataSet random_dataset(const VariableSpec& spec, int rows, double hole_prob, Rng& rng) {
  DataSet data;
  data.spec = spec;
  data.origin = "random";
  data.rows.reserve(rows);
  for (int r = 0; r < rows; ++r) {
    Sample row;
    row.values.resize(spec.var_count());
    for (int d = 0; d < spec.var_count(); ++d) {
      row.values[d] = rng.uniform_int(static_cast<int>(spec.levels[d].size()));
      if (hole_prob > 0.0 && rng.uniform01() < hole_prob) row.values[d] = kMissing;
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace stm::test
