#include "stm/search.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>


namespace stm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Everything a candidate-staging evaluation needs, computed once per search.
// The per-situation count tables are staging-independent for the complete,
// omit and first-missing scores, so candidates only pay for pooling; the
// stage-average score recomputes its table per candidate from the cached
// group geometry.
struct ScoreContext {
  const EventTree& tree;
  ScoreKind kind;
  GroupedCounts grouped;
  GroupGeometry geom;
  SituationCounts base_counts;
  long long n_penalty = 1;

  ScoreContext(const EventTree& tree_, const DataSet& data, ScoreKind kind_)
      : tree(tree_), kind(kind_) {
    if (data.rows.empty()) throw std::invalid_argument("stage search: empty data set");
    if (kind == ScoreKind::COMPLETE && !data.complete())
      throw std::invalid_argument("complete score requires complete data");
    grouped = group_counts(tree, data);
    geom = GroupGeometry::build(tree, grouped);
    n_penalty = score_penalty_n(kind, grouped);
    base_counts = zero_situation_counts(tree);
    switch (kind) {
      case ScoreKind::COMPLETE:
      case ScoreKind::OMIT:
        for (int i : grouped.singleton_groups) {
          const auto& g = grouped.groups[i];
          add_path_weight(tree, g.paths.front(), static_cast<double>(g.count), base_counts);
        }
        break;
      case ScoreKind::FIRST_MISSING:
      case ScoreKind::FULL_MISSING:
        // The full-missing score has no closed-form MLE; candidates are
        // parameterized from the first-missing prefix counts and the
        // missing-data log-likelihood is then evaluated exactly.
        for (std::size_t g = 0; g < grouped.groups.size(); ++g)
          for (const auto& [v, slot] : geom.lcp_edges[g])
            base_counts[v][slot] += static_cast<double>(grouped.groups[g].count);
        break;
      case ScoreKind::STAGE_AVERAGE:
        break;
    }
  }

  EdgeCounts stage_average_counts(const Staging& staging) const {
    EdgeCounts counts(staging.stage_count());
    for (int s = 0; s < staging.stage_count(); ++s)
      counts[s].assign(tree.child_count(staging.representative(s)), 0.0);
    for (std::size_t g = 0; g < grouped.groups.size(); ++g) {
      for (int d = 0; d < geom.max_depth; ++d) {
        const auto& pairs = geom.depth_pairs[g][d];
        if (pairs.empty()) continue;
        const int stage = staging.stage_of(pairs.front().first);
        const int slot = pairs.front().second;
        bool unambiguous = true;
        for (std::size_t i = 1; i < pairs.size(); ++i) {
          if (pairs[i].second != slot || staging.stage_of(pairs[i].first) != stage) {
            unambiguous = false;
            break;
          }
        }
        if (unambiguous) counts[stage][slot] += static_cast<double>(grouped.groups[g].count);
      }
    }
    return counts;
  }

  struct Scored {
    double bic = kNegInf;
    TransitionProbabilities theta;
  };

  Scored evaluate(const std::shared_ptr<const EventTree>& tree_ptr,
                  const Staging& staging) const {
    const EdgeCounts counts = kind == ScoreKind::STAGE_AVERAGE
                                  ? stage_average_counts(staging)
                                  : pool_by_stage(tree, staging, base_counts);
    Scored out;
    out.theta = fit_mle(tree, staging, counts, 0.0);
    LogLikValue ll;
    if (kind == ScoreKind::FULL_MISSING) {
      StagedTreeModel cand{tree_ptr, staging, out.theta};
      ll = loglik_full_missing(cand, grouped, &geom);
    } else {
      // For the factorized kinds sum(n log theta) over the pooled table is
      // the score's log-likelihood itself.
      long double acc = 0.0L;
      for (std::size_t s = 0; s < counts.size(); ++s) {
        for (std::size_t j = 0; j < counts[s].size(); ++j) {
          const double n = counts[s][j];
          if (n == 0.0) continue;
          const double p = out.theta.per_stage[s][j];
          if (p == 0.0) {
            acc = -std::numeric_limits<long double>::infinity();
            break;
          }
          acc += static_cast<long double>(n) * std::log(static_cast<long double>(p));
        }
      }
      ll.loglik = static_cast<double>(acc);
    }
    ll.dim = staging.dim(tree);
    out.bic = std::isinf(ll.loglik) ? ll.loglik
                                    : ll.loglik - 0.5 * std::log(static_cast<double>(n_penalty)) *
                                                      ll.dim;
    return out;
  }
};

}  // namespace

const char* score_kind_name(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::FULL_MISSING: return "full";
    case ScoreKind::OMIT: return "omit";
    case ScoreKind::FIRST_MISSING: return "fm";
    case ScoreKind::STAGE_AVERAGE: return "sa";
    case ScoreKind::COMPLETE: return "complete";
  }
  return "?";
}

long long score_penalty_n(ScoreKind kind, const GroupedCounts& grouped) {
  const long long n = kind == ScoreKind::OMIT ? grouped.singleton_total() : grouped.total();
  return std::max<long long>(1, n);
}

SearchResult bhc_stage_search(const std::shared_ptr<const EventTree>& tree, const DataSet& data,
                              const SearchConfig& config) {
  const auto start_time = std::chrono::steady_clock::now();
  if (config.max_iter < 1) throw std::invalid_argument("search: max_iter must be at least 1");
  ScoreContext ctx(*tree, data, config.score);

  Staging staging = Staging::saturated(*tree);
  auto current = ctx.evaluate(tree, staging);
  SearchResult result;

  for (int depth = 0; depth < tree->max_depth(); ++depth) {
    for (int iter = 0; iter < config.max_iter; ++iter) {
      const std::vector<int> stages = staging.stages_at_depth(*tree, depth);
      double best_bic = kNegInf;
      int best_a = -1, best_b = -1;
      for (std::size_t i = 0; i < stages.size(); ++i) {
        for (std::size_t j = i + 1; j < stages.size(); ++j) {
          const Staging cand = staging.merged(*tree, stages[i], stages[j]);
          const double bic = ctx.evaluate(tree, cand).bic;
          if (bic > best_bic) {
            best_bic = bic;
            best_a = stages[i];
            best_b = stages[j];
          }
        }
      }
      if (best_a < 0 || !(best_bic > current.bic + config.score_epsilon)) break;
      staging = staging.merged(*tree, best_a, best_b);
      current = ctx.evaluate(tree, staging);
      result.trace.push_back({"merge d" + std::to_string(depth) + " s" + std::to_string(best_a) +
                                  "+s" + std::to_string(best_b),
                              current.bic});
    }
  }

  result.model = StagedTreeModel{tree, staging, std::move(current.theta)};
  result.score = current.bic;
  result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
                         .count();
  return result;
}

SearchResult hc_stage_search(const std::shared_ptr<const EventTree>& tree, const DataSet& data,
                             const SearchConfig& config, const Staging* start) {
  const auto start_time = std::chrono::steady_clock::now();
  if (config.max_iter < 1) throw std::invalid_argument("search: max_iter must be at least 1");
  ScoreContext ctx(*tree, data, config.score);

  Staging staging = start ? *start : Staging::saturated(*tree);
  auto current = ctx.evaluate(tree, staging);
  SearchResult result;

  for (int moves = 0; moves < config.max_iter; ++moves) {
    double best_bic = kNegInf;
    Staging best_staging = staging;
    std::string best_desc;

    for (int depth = 0; depth < tree->max_depth(); ++depth) {
      const std::vector<int> stages = staging.stages_at_depth(*tree, depth);
      for (std::size_t i = 0; i < stages.size(); ++i) {
        for (std::size_t j = i + 1; j < stages.size(); ++j) {
          Staging cand = staging.merged(*tree, stages[i], stages[j]);
          const double bic = ctx.evaluate(tree, cand).bic;
          if (bic > best_bic) {
            best_bic = bic;
            best_staging = std::move(cand);
            best_desc = "merge s" + std::to_string(stages[i]) + "+s" + std::to_string(stages[j]);
          }
        }
      }
    }
    for (int s = 0; s < staging.stage_count(); ++s) {
      if (staging.members(s).size() < 2) continue;
      for (int v : staging.members(s)) {
        Staging cand = staging.split_singleton(*tree, v);
        const double bic = ctx.evaluate(tree, cand).bic;
        if (bic > best_bic) {
          best_bic = bic;
          best_staging = std::move(cand);
          best_desc = "split v" + std::to_string(v) + " from s" + std::to_string(s);
        }
      }
    }

    if (!(best_bic > current.bic + config.score_epsilon)) break;
    staging = std::move(best_staging);
    current = ctx.evaluate(tree, staging);
    result.trace.push_back({best_desc, current.bic});
  }

  result.model = StagedTreeModel{tree, staging, std::move(current.theta)};
  result.score = current.bic;
  result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
                         .count();
  return result;
}

}  // namespace stm
