#include "stm/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Accumulations run in long double so the factorized and grouped evaluation
// routes agree to tighter than the documented 1e-12.
double counts_loglik(const EdgeCounts& counts, const TransitionProbabilities& theta) {
  long double ll = 0.0L;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    for (std::size_t j = 0; j < counts[s].size(); ++j) {
      const double n = counts[s][j];
      if (n == 0.0) continue;
      const double p = theta.per_stage[s][j];
      if (p == 0.0) return kNegInf;
      ll += static_cast<long double>(n) * std::log(static_cast<long double>(p));
    }
  }
  return static_cast<double>(ll);
}

long double edges_logprob(const StagedTreeModel& model,
                          const std::vector<std::pair<int, int>>& edges) {
  const TransitionProbabilities& theta = *model.theta;
  long double sum = 0.0L;
  for (const auto& [situation, slot] : edges) {
    const double p = theta.per_stage[model.staging.stage_of(situation)][slot];
    if (p == 0.0) return kNegInf;
    sum += std::log(static_cast<long double>(p));
  }
  return sum;
}

}  // namespace

const char* loglik_kind_name(LogLikKind kind) {
  switch (kind) {
    case LogLikKind::COMPLETE: return "complete";
    case LogLikKind::FULL_MISSING: return "full";
    case LogLikKind::OMIT: return "omit";
    case LogLikKind::FIRST_MISSING: return "fm";
    case LogLikKind::STAGE_AVERAGE: return "sa";
  }
  return "?";
}

TransitionProbabilities fit_mle(const EventTree& tree, const Staging& staging,
                                const EdgeCounts& counts, double smoothing) {
  if (smoothing < 0.0) throw std::invalid_argument("fit_mle: negative smoothing");
  if (static_cast<int>(counts.size()) != staging.stage_count())
    throw std::invalid_argument("fit_mle: counts must cover every stage");
  TransitionProbabilities theta;
  theta.per_stage.resize(staging.stage_count());
  for (int s = 0; s < staging.stage_count(); ++s) {
    const int arity = tree.child_count(staging.representative(s));
    if (static_cast<int>(counts[s].size()) != arity)
      throw std::invalid_argument("fit_mle: counts/label arity mismatch");
    auto& dist = theta.per_stage[s];
    dist.assign(arity, 0.0);
    double denom = 0.0;
    for (int j = 0; j < arity; ++j) {
      if (counts[s][j] < 0.0) throw std::invalid_argument("fit_mle: negative count");
      denom += counts[s][j] + smoothing;
    }
    if (denom == 0.0) {
      dist.assign(arity, 1.0 / arity);
      continue;
    }
    for (int j = 0; j < arity; ++j) dist[j] = (counts[s][j] + smoothing) / denom;
  }
  return theta;
}

LogLikValue loglik_complete(const StagedTreeModel& model, const DataSet& data) {
  model.require_theta();
  const EdgeCounts counts = complete_edge_counts(model, data);
  LogLikValue out;
  out.kind = LogLikKind::COMPLETE;
  out.loglik = counts_loglik(counts, *model.theta);
  out.n_effective = data.size();
  out.dim = model.staging.dim(*model.tree);
  return out;
}

LogLikValue loglik_full_missing(const StagedTreeModel& model, const GroupedCounts& grouped,
                                const GroupGeometry*) {
  model.require_theta();
  LogLikValue out;
  out.kind = LogLikKind::FULL_MISSING;
  out.dim = model.staging.dim(*model.tree);
  long double ll = 0.0L;
  for (const auto& group : grouped.groups) {
    long double mass = 0.0L;
    for (int p : group.paths) mass += static_cast<long double>(path_probability(model, p));
    if (mass <= 0.0L) {
      out.loglik = -std::numeric_limits<double>::infinity();
      out.n_effective = grouped.total();
      return out;
    }
    ll += static_cast<long double>(group.count) * std::log(mass);
    out.n_effective += group.count;
  }
  out.loglik = static_cast<double>(ll);
  return out;
}

LogLikValue loglik_omit(const StagedTreeModel& model, const GroupedCounts& grouped,
                        const GroupGeometry*) {
  model.require_theta();
  LogLikValue out;
  out.kind = LogLikKind::OMIT;
  out.dim = model.staging.dim(*model.tree);
  long double ll = 0.0L;
  for (int i : grouped.singleton_groups) {
    const auto& group = grouped.groups[i];
    const long double term = edges_logprob(model, model.tree->path_edges(group.paths.front()));
    ll += static_cast<long double>(group.count) * term;
    out.n_effective += group.count;
  }
  out.loglik = static_cast<double>(ll);
  out.warning = out.n_effective == 0 && grouped.total() > 0;
  return out;
}

LogLikValue loglik_first_missing(const StagedTreeModel& model, const GroupedCounts& grouped,
                                 const GroupGeometry* geom) {
  model.require_theta();
  GroupGeometry local;
  if (!geom) {
    local = GroupGeometry::build(*model.tree, grouped);
    geom = &local;
  }
  LogLikValue out;
  out.kind = LogLikKind::FIRST_MISSING;
  out.dim = model.staging.dim(*model.tree);
  long double ll = 0.0L;
  for (std::size_t g = 0; g < grouped.groups.size(); ++g) {
    const long double term = edges_logprob(model, geom->lcp_edges[g]);
    ll += static_cast<long double>(grouped.groups[g].count) * term;
    out.n_effective += grouped.groups[g].count;
  }
  out.loglik = static_cast<double>(ll);
  return out;
}

LogLikValue loglik_stage_average(const StagedTreeModel& model, const GroupedCounts& grouped,
                                 const GroupGeometry* geom) {
  model.require_theta();
  GroupGeometry local;
  if (!geom) {
    local = GroupGeometry::build(*model.tree, grouped);
    geom = &local;
  }
  const TransitionProbabilities& theta = *model.theta;
  LogLikValue out;
  out.kind = LogLikKind::STAGE_AVERAGE;
  out.dim = model.staging.dim(*model.tree);
  long double ll = 0.0L;
  for (std::size_t g = 0; g < grouped.groups.size(); ++g) {
    long double term = 0.0L;
    for (int d = 0; d < geom->max_depth; ++d) {
      const auto& pairs = geom->depth_pairs[g][d];
      if (pairs.empty()) continue;
      const int stage = model.staging.stage_of(pairs.front().first);
      const int slot = pairs.front().second;
      bool unambiguous = true;
      for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].second != slot || model.staging.stage_of(pairs[i].first) != stage) {
          unambiguous = false;
          break;
        }
      }
      if (!unambiguous) continue;
      const double p = theta.per_stage[stage][slot];
      if (p == 0.0) {
        term = -std::numeric_limits<long double>::infinity();
        break;
      }
      term += std::log(static_cast<long double>(p));
    }
    ll += static_cast<long double>(grouped.groups[g].count) * term;
    out.n_effective += grouped.groups[g].count;
  }
  out.loglik = static_cast<double>(ll);
  return out;
}

double bic_score(const LogLikValue& ll, long long n_for_penalty) {
  if (n_for_penalty < 1) throw std::invalid_argument("bic_score: n must be at least 1");
  if (std::isinf(ll.loglik)) return ll.loglik;
  return ll.loglik - 0.5 * std::log(static_cast<double>(n_for_penalty)) * ll.dim;
}

}  // namespace stm
