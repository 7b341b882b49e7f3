#include "stm/order.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

#include "stm/rng.hpp"

namespace stm {

namespace {

DataSet permute_columns(const DataSet& data, const VariableSpec& permuted_spec,
                        const std::vector<int>& order) {
  DataSet out;
  out.spec = permuted_spec;
  out.origin = data.origin;
  out.na_token = data.na_token;
  out.rows.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    Sample r;
    r.values.reserve(order.size());
    for (int idx : order) r.values.push_back(row.values[idx]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<int>> enumerate_orders(int k, int max_orders, std::uint64_t seed) {
  long long total = 1;
  for (int i = 2; i <= k; ++i) total *= i;
  std::vector<int> base(k);
  for (int i = 0; i < k; ++i) base[i] = i;

  if (max_orders <= 0 || max_orders >= total) {
    if (k > 8)
      throw std::invalid_argument(
          "order search over more than 8 variables requires max_orders sampling");
    std::vector<std::vector<int>> all;
    all.reserve(static_cast<std::size_t>(total));
    do {
      all.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return all;
  }

  // Seeded distinct random orderings, evaluated in lexicographic order.
  Rng rng(seed);
  std::set<std::vector<int>> picked;
  while (static_cast<int>(picked.size()) < max_orders) {
    std::vector<int> perm = base;
    for (int i = k - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    picked.insert(std::move(perm));
  }
  return {picked.begin(), picked.end()};
}

}  // namespace

DataSet align_columns(const DataSet& data, const VariableSpec& target) {
  std::vector<int> order(target.var_count());
  for (int d = 0; d < target.var_count(); ++d) {
    const auto it =
        std::find(data.spec.names.begin(), data.spec.names.end(), target.names[d]);
    if (it == data.spec.names.end() ||
        data.spec.levels[it - data.spec.names.begin()] != target.levels[d])
      throw std::invalid_argument("align_columns: data does not carry variable '" +
                                  target.names[d] + "'");
    order[d] = static_cast<int>(it - data.spec.names.begin());
  }
  return permute_columns(data, target, order);
}

OrderSearchResult order_search(const VariableSpec& spec, const DataSet& data,
                               const OrderSearchConfig& config) {
  spec.validate();
  if (data.spec.names != spec.names)
    throw std::invalid_argument("order_search: data variables do not match the spec");
  const int k = spec.var_count();
  const auto orders = enumerate_orders(k, config.max_orders, config.seed);

  OrderSearchResult out;
  bool have_best = false;
  double best_score = 0.0;

  for (const auto& order : orders) {
    const VariableSpec pspec = spec.permuted(order);
    const auto tree = std::make_shared<const EventTree>(EventTree::from_variables(pspec));
    const DataSet pdata = permute_columns(data, pspec, order);

    SearchResult run;
    double score;
    if (config.em) {
      const auto t0 = std::chrono::steady_clock::now();
      EmResult em = structural_em(tree, pdata, *config.em);
      const GroupedCounts grouped = group_counts(*tree, pdata);
      score = bic_score(loglik_full_missing(em.model, grouped), grouped.total());
      run.model = std::move(em.model);
      run.score = score;
      run.elapsed_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else {
      run = config.search.strategy == SearchStrategy::BHC
                ? bhc_stage_search(tree, pdata, config.search)
                : hc_stage_search(tree, pdata, config.search);
      score = run.score;
    }

    out.order_scores.push_back({pspec.names, score});
    if (!have_best || score > best_score) {
      have_best = true;
      best_score = score;
      out.ordering = pspec.names;
      out.result = std::move(run);
    }
  }
  return out;
}

}  // namespace stm
