#include "stm/em.hpp"

#include <cmath>
#include <stdexcept>

#include "stm/log.hpp"
#include "stm/rng.hpp"

namespace stm {

namespace {

TransitionProbabilities init_theta(const EventTree& tree, const Staging& staging,
                                   const GroupedCounts& grouped, EmInit init) {
  if (init == EmInit::UNIFORM) return uniform_theta(tree, staging);
  // Laplace-smoothed MLE on the complete rows; with no complete rows the
  // smoothing alone yields the uniform distribution.
  SituationCounts counts = zero_situation_counts(tree);
  for (int i : grouped.singleton_groups) {
    const auto& g = grouped.groups[i];
    add_path_weight(tree, g.paths.front(), static_cast<double>(g.count), counts);
  }
  if (grouped.singleton_groups.empty())
    log_info("em init: no complete rows, starting from the uniform distribution");
  return fit_mle(tree, staging, pool_by_stage(tree, staging, counts), 1.0);
}

TransitionProbabilities resmoothed(const TransitionProbabilities& theta) {
  TransitionProbabilities out = theta;
  for (auto& dist : out.per_stage) {
    double sum = 0.0;
    for (double& p : dist) {
      p += 1e-6;
      sum += p;
    }
    for (double& p : dist) p /= sum;
  }
  return out;
}

}  // namespace

std::vector<double> expected_path_counts(const StagedTreeModel& model,
                                         const GroupedCounts& grouped) {
  model.require_theta();
  std::vector<double> counts(model.tree->path_count(), 0.0);
  std::vector<double> probs;
  for (const auto& group : grouped.groups) {
    probs.clear();
    double mass = 0.0;
    for (int p : group.paths) {
      probs.push_back(path_probability(model, p));
      mass += probs.back();
    }
    if (!(mass > 0.0))
      throw std::runtime_error("expected_path_counts: a group has zero total probability");
    for (std::size_t i = 0; i < group.paths.size(); ++i)
      counts[group.paths[i]] += static_cast<double>(group.count) * probs[i] / mass;
  }
  return counts;
}

EmResult soft_em_params(const std::shared_ptr<const EventTree>& tree, const Staging& staging,
                        const DataSet& data, const EmConfig& config) {
  if (config.max_iter < 1) throw std::invalid_argument("em: max_iter must be at least 1");
  if (!(config.tol > 0.0)) throw std::invalid_argument("em: tol must be positive");
  if (data.rows.empty()) throw std::invalid_argument("em: empty data set");

  const GroupedCounts grouped = group_counts(*tree, data);
  const bool all_complete = grouped.singleton_groups.size() == grouped.groups.size();

  StagedTreeModel model{tree, staging, init_theta(*tree, staging, grouped, config.init)};
  EmResult result;
  bool resmooth_warned = false;

  for (int t = 1; t <= config.max_iter; ++t) {
    std::vector<double> path_counts;
    try {
      path_counts = expected_path_counts(model, grouped);
    } catch (const std::runtime_error&) {
      // Degenerate support: at the first iteration fall back to the uniform
      // init, later nudge all entries off zero and renormalize.
      if (t == 1 && config.init != EmInit::UNIFORM) {
        log_warn("soft em: degenerate support at init, falling back to uniform");
        model.theta = uniform_theta(*tree, staging);
      } else {
        if (!resmooth_warned) log_warn("soft em: zero-mass group, re-smoothing theta");
        resmooth_warned = true;
        model.theta = resmoothed(*model.theta);
      }
      path_counts = expected_path_counts(model, grouped);
    }
    const TransitionProbabilities previous = *model.theta;
    model.theta = fit_mle(*tree, staging, complete_edge_counts(model, path_counts), 0.0);
    result.loglik_trace.push_back(loglik_full_missing(model, grouped).loglik);
    result.iterations = t;
    if (all_complete) {
      // The E-step does not depend on theta, so one M-step is the fixed point.
      result.converged = true;
      break;
    }
    double theta_change = 0.0;
    for (std::size_t s = 0; s < previous.per_stage.size(); ++s)
      for (std::size_t j = 0; j < previous.per_stage[s].size(); ++j)
        theta_change = std::max(theta_change, std::abs(previous.per_stage[s][j] -
                                                       model.theta->per_stage[s][j]));
    const auto& trace = result.loglik_trace;
    // Near a flat optimum the loglik settles long before the parameters do;
    // require both so that one further E/M round moves theta by well under
    // 10 * tol.
    if (t >= 2 && std::abs(trace[t - 1] - trace[t - 2]) < config.tol &&
        theta_change < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.model = std::move(model);
  return result;
}

DataSet hard_impute(const StagedTreeModel& model, const DataSet& data, std::uint64_t seed,
                    ImputeRule rule) {
  model.require_theta();
  DataSet out = data;
  Rng rng(seed);
  std::vector<double> probs;
  for (auto& row : out.rows) {
    if (row.complete()) continue;
    const std::vector<int> paths = possible_paths(*model.tree, row);
    probs.clear();
    double mass = 0.0;
    for (int p : paths) {
      probs.push_back(path_probability(model, p));
      mass += probs.back();
    }
    int chosen;
    if (rule == ImputeRule::RANDOM) {
      chosen = mass > 0.0 ? rng.categorical(probs) : rng.uniform_int(static_cast<int>(paths.size()));
    } else {
      // Most probable completion; ties (and all-zero masses) resolve to the
      // lowest path id, so imputation is a function of the model alone.
      chosen = 0;
      for (std::size_t i = 1; i < paths.size(); ++i)
        if (probs[i] > probs[chosen]) chosen = static_cast<int>(i);
    }
    row.values = model.tree->values_of_path(paths[chosen]);
  }
  return out;
}

EmResult hard_em_params(const std::shared_ptr<const EventTree>& tree, const Staging& staging,
                        const DataSet& data, const EmConfig& config) {
  if (config.max_iter < 1) throw std::invalid_argument("em: max_iter must be at least 1");
  if (data.rows.empty()) throw std::invalid_argument("em: empty data set");

  const GroupedCounts grouped = group_counts(*tree, data);
  StagedTreeModel model{tree, staging, init_theta(*tree, staging, grouped, config.init)};
  EmResult result;
  std::optional<DataSet> previous;

  for (int t = 1; t <= config.max_iter; ++t) {
    DataSet imputed = hard_impute(model, data, derive_seed(config.seed, t), config.impute);
    model.theta = fit_mle(*tree, staging, complete_edge_counts(model, imputed), 0.0);
    result.loglik_trace.push_back(loglik_full_missing(model, grouped).loglik);
    result.iterations = t;
    const bool stable = previous.has_value() ? imputed.rows == previous->rows : data.complete();
    previous = std::move(imputed);
    if (stable) {
      result.converged = true;
      break;
    }
  }
  result.imputed_data = std::move(previous);
  result.model = std::move(model);
  return result;
}

EmResult structural_em(const std::shared_ptr<const EventTree>& tree, const DataSet& data,
                       const EmConfig& config) {
  if (config.max_outer_iter < 1)
    throw std::invalid_argument("structural em: max_outer_iter must be at least 1");
  if (data.rows.empty()) throw std::invalid_argument("structural em: empty data set");
  if (config.variant != EmVariant::STRUCT_EM_HC && config.variant != EmVariant::STRUCT_EM_BHC &&
      config.variant != EmVariant::STRUCT_EM_SIMPLE)
    throw std::invalid_argument("structural em: not a structural variant");

  const GroupedCounts grouped = group_counts(*tree, data);
  Staging staging = Staging::saturated(*tree);
  StagedTreeModel model{tree, staging, init_theta(*tree, staging, grouped, config.init)};

  SearchConfig search = config.search;
  search.score = ScoreKind::COMPLETE;

  EmResult result;
  for (int t = 1; t <= config.max_outer_iter; ++t) {
    const DataSet imputed = hard_impute(model, data, derive_seed(config.seed, t), config.impute);
    SearchResult selected;
    switch (config.variant) {
      case EmVariant::STRUCT_EM_BHC:
        selected = bhc_stage_search(tree, imputed, search);
        break;
      case EmVariant::STRUCT_EM_HC:
        selected = hc_stage_search(tree, imputed, search);
        break;
      default:
        selected = hc_stage_search(tree, imputed, search, &model.staging);
        break;
    }
    // Imputation of complete data is the identity, so the first M-step is
    // already the fixed point.
    const bool stable = selected.model.staging == model.staging || data.complete();
    model = std::move(selected.model);
    result.loglik_trace.push_back(loglik_full_missing(model, grouped).loglik);
    result.iterations = t;
    result.imputed_data = imputed;
    if (stable) {
      result.converged = true;
      break;
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace stm
