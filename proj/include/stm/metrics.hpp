#pragma once

#include <optional>

#include "stm/model.hpp"

namespace stm {

struct MetricReport {
  std::optional<double> hamming;
  std::optional<double> kl;
  std::optional<double> cd;
  std::optional<double> kendall;
  double learn_time_s = 0.0;
};

// Fraction of same-depth situation pairs on which the two stagings disagree
// about co-membership; depths with a single situation contribute no pairs.
// Symmetric, 0 iff the partitions are identical.
double hamming_staging(const EventTree& tree, const Staging& a, const Staging& b);
double hamming_staging(const StagedTreeModel& a, const StagedTreeModel& b);

// Kullback-Leibler divergence between root-to-leaf path distributions,
// natural log; p is the generator and q the estimate. +inf when q puts zero
// mass on a supported path.
double kl_paths(const StagedTreeModel& p, const StagedTreeModel& q);

// Chan-Darwiche distance: log max ratio minus log min ratio of q/p over
// paths; +inf when either model has a zero path probability.
double cd_paths(const StagedTreeModel& p, const StagedTreeModel& q);

// The same divergences over the joint distribution of variable assignments,
// for models over the same variables in possibly different orders.
double kl_joint(const StagedTreeModel& p, const StagedTreeModel& q);
double cd_joint(const StagedTreeModel& p, const StagedTreeModel& q);

// Discordant variable pairs between two orderings of one variable set,
// normalized by the number of pairs.
double kendall_orderings(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace stm
