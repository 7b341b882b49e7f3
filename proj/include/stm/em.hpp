#pragma once

#include "stm/search.hpp"

namespace stm {

enum class EmVariant { PARAM_SOFT, PARAM_HARD, STRUCT_EM_HC, STRUCT_EM_BHC, STRUCT_EM_SIMPLE };
enum class EmInit { OMIT_MLE_SMOOTHED, UNIFORM };
enum class ImputeRule { ARGMAX, RANDOM };

struct EmConfig {
  EmVariant variant = EmVariant::PARAM_SOFT;
  int max_iter = 50;        // parameter-EM iterations
  int max_outer_iter = 20;  // structural-EM outer iterations
  double tol = 1e-6;        // |change in missing-data loglik| convergence threshold
  EmInit init = EmInit::OMIT_MLE_SMOOTHED;
  ImputeRule impute = ImputeRule::ARGMAX;
  std::uint64_t seed = 0;
  SearchConfig search;      // structural variants: M-step search settings
};

struct EmResult {
  StagedTreeModel model;
  int iterations = 0;
  std::vector<double> loglik_trace;  // missing-data loglik after each iteration
  bool converged = false;
  std::optional<DataSet> imputed_data;  // hard variants: final completed data
};

// Expected traversal count per root-to-leaf path: every row is distributed
// over its possible paths proportionally to the current path probabilities.
// The counts sum to the number of rows.
std::vector<double> expected_path_counts(const StagedTreeModel& model,
                                         const GroupedCounts& grouped);

// Parameter EM for a fixed staging: alternate expected path counts with the
// MLE on the pooled expected counts until the missing-data log-likelihood
// stabilizes.
EmResult soft_em_params(const std::shared_ptr<const EventTree>& tree, const Staging& staging,
                        const DataSet& data, const EmConfig& config);

// Replaces each incomplete row by its most probable completion under the
// current model (ties by lowest path id); RANDOM draws the completion
// proportionally to the conditional path probabilities instead.
DataSet hard_impute(const StagedTreeModel& model, const DataSet& data, std::uint64_t seed,
                    ImputeRule rule = ImputeRule::ARGMAX);

// Parameter EM with imputation instead of expectations; stops when the
// imputed data set stops changing.
EmResult hard_em_params(const std::shared_ptr<const EventTree>& tree, const Staging& staging,
                        const DataSet& data, const EmConfig& config);

// Structural EM: impute with the current model, then select a staging on the
// completed data (HC or BHC from saturated, or HC from the previous staging
// for the simple variant). Stops when the staging stops changing.
EmResult structural_em(const std::shared_ptr<const EventTree>& tree, const DataSet& data,
                       const EmConfig& config);

}  // namespace stm
