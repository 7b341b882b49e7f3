#pragma once

#include "stm/counts.hpp"

namespace stm {

enum class LogLikKind { COMPLETE, FULL_MISSING, OMIT, FIRST_MISSING, STAGE_AVERAGE };

const char* loglik_kind_name(LogLikKind kind);

struct LogLikValue {
  double loglik = 0.0;
  long long n_effective = 0;  // rows contributing terms
  int dim = 0;                // free parameters of the staging
  LogLikKind kind = LogLikKind::COMPLETE;
  bool warning = false;       // e.g. no complete rows for the omit likelihood
};

// Relative-frequency estimate per stage and slot, optionally Laplace
// smoothed: (n + smoothing) / sum(n + smoothing). A stage with all-zero
// counts and zero smoothing gets the uniform distribution.
TransitionProbabilities fit_mle(const EventTree& tree, const Staging& staging,
                                const EdgeCounts& counts, double smoothing = 0.0);

// Complete-data log-likelihood, factorized over stages.
LogLikValue loglik_complete(const StagedTreeModel& model, const DataSet& data);

// Missing-data log-likelihood: sum over groups of n_i * log(sum of the
// group's path probabilities), up to the dropped missingness constant.
LogLikValue loglik_full_missing(const StagedTreeModel& model, const GroupedCounts& grouped,
                                const GroupGeometry* geom = nullptr);

// Omit pseudo-log-likelihood: only groups with a single possible path.
LogLikValue loglik_omit(const StagedTreeModel& model, const GroupedCounts& grouped,
                        const GroupGeometry* geom = nullptr);

// First-missing pseudo-log-likelihood: each group contributes the transition
// probabilities of its paths' longest common prefix.
LogLikValue loglik_first_missing(const StagedTreeModel& model, const GroupedCounts& grouped,
                                 const GroupGeometry* geom = nullptr);

// Stage-average pseudo-log-likelihood: a depth contributes when every path of
// the group passes through situations of one stage and takes one common edge
// label there, so the value is unambiguously attributable to that stage.
LogLikValue loglik_stage_average(const StagedTreeModel& model, const GroupedCounts& grouped,
                                 const GroupGeometry* geom = nullptr);

// loglik - 0.5 * log(n) * dim; higher is better. -inf log-likelihoods stay
// -inf and compare as strictly worst.
double bic_score(const LogLikValue& ll, long long n_for_penalty);

}  // namespace stm
