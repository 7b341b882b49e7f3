#include "stm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace stm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_tree(const StagedTreeModel& a, const StagedTreeModel& b) {
  if (!a.tree->same_structure(*b.tree))
    throw std::invalid_argument("metric requires models over the same event tree");
}

// Joint probability of a complete assignment given in p's variable order.
double assignment_probability(const StagedTreeModel& m, const std::vector<int>& reorder,
                              const std::vector<int>& values) {
  std::vector<int> local(values.size());
  for (std::size_t d = 0; d < values.size(); ++d) local[d] = values[reorder[d]];
  return path_probability(m, m.tree->path_of_values(local));
}

std::vector<int> reorder_map(const VariableSpec& from, const VariableSpec& to) {
  // to's variable d sits at position reorder[d] of `from`.
  std::vector<int> out(to.var_count());
  for (int d = 0; d < to.var_count(); ++d) {
    const auto it = std::find(from.names.begin(), from.names.end(), to.names[d]);
    if (it == from.names.end() || to.levels[d] != from.levels[it - from.names.begin()])
      throw std::invalid_argument("metric requires models over the same variables");
    out[d] = static_cast<int>(it - from.names.begin());
  }
  return out;
}

template <typename ProbP, typename ProbQ>
double kl_core(int count, ProbP prob_p, ProbQ prob_q) {
  long double kl = 0.0L;
  for (int i = 0; i < count; ++i) {
    const double p = prob_p(i);
    if (p == 0.0) continue;
    const double q = prob_q(i);
    if (q == 0.0) return kInf;
    kl += static_cast<long double>(p) * std::log(static_cast<long double>(p) / q);
  }
  return std::max(0.0, static_cast<double>(kl));
}

template <typename ProbP, typename ProbQ>
double cd_core(int count, ProbP prob_p, ProbQ prob_q) {
  double max_ratio = -kInf;
  double min_ratio = kInf;
  for (int i = 0; i < count; ++i) {
    const double p = prob_p(i);
    const double q = prob_q(i);
    if (p == 0.0 || q == 0.0) return kInf;
    const double r = q / p;
    max_ratio = std::max(max_ratio, r);
    min_ratio = std::min(min_ratio, r);
  }
  return std::log(max_ratio) - std::log(min_ratio);
}

}  // namespace

double hamming_staging(const EventTree& tree, const Staging& a, const Staging& b) {
  long long disagreements = 0;
  long long pairs = 0;
  for (int d = 0; d <= tree.max_depth(); ++d) {
    const auto& sits = tree.situations_at_depth(d);
    for (std::size_t i = 0; i < sits.size(); ++i) {
      for (std::size_t j = i + 1; j < sits.size(); ++j) {
        const bool together_a = a.stage_of(sits[i]) == a.stage_of(sits[j]);
        const bool together_b = b.stage_of(sits[i]) == b.stage_of(sits[j]);
        disagreements += together_a != together_b;
        ++pairs;
      }
    }
  }
  return pairs == 0 ? 0.0 : static_cast<double>(disagreements) / static_cast<double>(pairs);
}

double hamming_staging(const StagedTreeModel& a, const StagedTreeModel& b) {
  require_same_tree(a, b);
  return hamming_staging(*a.tree, a.staging, b.staging);
}

double kl_paths(const StagedTreeModel& p, const StagedTreeModel& q) {
  require_same_tree(p, q);
  const auto pd = path_distribution(p);
  const auto qd = path_distribution(q);
  return kl_core(
      p.tree->path_count(), [&](int i) { return pd[i]; }, [&](int i) { return qd[i]; });
}

double cd_paths(const StagedTreeModel& p, const StagedTreeModel& q) {
  require_same_tree(p, q);
  const auto pd = path_distribution(p);
  const auto qd = path_distribution(q);
  return cd_core(
      p.tree->path_count(), [&](int i) { return pd[i]; }, [&](int i) { return qd[i]; });
}

double kl_joint(const StagedTreeModel& p, const StagedTreeModel& q) {
  const auto reorder = reorder_map(p.tree->variables(), q.tree->variables());
  const auto pd = path_distribution(p);
  return kl_core(
      p.tree->path_count(), [&](int i) { return pd[i]; },
      [&](int i) { return assignment_probability(q, reorder, p.tree->values_of_path(i)); });
}

double cd_joint(const StagedTreeModel& p, const StagedTreeModel& q) {
  const auto reorder = reorder_map(p.tree->variables(), q.tree->variables());
  const auto pd = path_distribution(p);
  return cd_core(
      p.tree->path_count(), [&](int i) { return pd[i]; },
      [&](int i) { return assignment_probability(q, reorder, p.tree->values_of_path(i)); });
}

double kendall_orderings(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("kendall: orderings must share at least two variables");
  std::map<std::string, int> pos_b;
  for (std::size_t i = 0; i < b.size(); ++i) pos_b[b[i]] = static_cast<int>(i);
  if (pos_b.size() != b.size()) throw std::invalid_argument("kendall: duplicate variable names");
  long long discordant = 0;
  long long pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it_i = pos_b.find(a[i]);
    if (it_i == pos_b.end())
      throw std::invalid_argument("kendall: orderings over different variable sets");
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const auto it_j = pos_b.find(a[j]);
      if (it_j == pos_b.end())
        throw std::invalid_argument("kendall: orderings over different variable sets");
      discordant += it_i->second > it_j->second;
      ++pairs;
    }
  }
  return static_cast<double>(discordant) / static_cast<double>(pairs);
}

}  // namespace stm
