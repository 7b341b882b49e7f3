#include <cmath>
#include <memory>

#include "doctest.h"

#include "stm/em.hpp"
#include "stm/simulate.hpp"

#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace stm;

namespace {

VariableSpec binary_spec(int k) {
  VariableSpec spec;
  for (int d = 0; d < k; ++d) {
    spec.names.push_back("X" + std::to_string(d + 1));
    spec.levels.push_back({"a", "b"});
  }
  return spec;
}

struct OneVarInstance {
  std::shared_ptr<const EventTree> tree;
  Staging staging;
  DataSet data;
};

OneVarInstance one_binary_variable(int yes, int no, int missing) {
  OneVarInstance inst;
  VariableSpec spec;
  spec.names = {"X"};
  spec.levels = {{"yes", "no"}};
  inst.tree = std::make_shared<const EventTree>(EventTree::from_variables(spec));
  inst.staging = Staging::saturated(*inst.tree);
  inst.data.spec = spec;
  for (int i = 0; i < yes; ++i) inst.data.rows.push_back(Sample{{0}});
  for (int i = 0; i < no; ++i) inst.data.rows.push_back(Sample{{1}});
  for (int i = 0; i < missing; ++i) inst.data.rows.push_back(Sample{{kMissing}});
  return inst;
}

// Fixed point of the expected-count update for a fixed staging, solved by
// direct iteration of the count/refit map using the enumeration oracle —
// independent of the soft-EM implementation.
TransitionProbabilities oracle_em_fixed_point(const std::shared_ptr<const EventTree>& tree,
                                              const Staging& staging, const DataSet& data) {
  StagedTreeModel model{tree, staging, uniform_theta(*tree, staging)};
  for (int it = 0; it < 100000; ++it) {
    const auto counts = test::oracle_expected_counts(model, data);
    TransitionProbabilities next =
        fit_mle(*tree, staging, complete_edge_counts(model, counts), 0.0);
    double delta = 0.0;
    for (std::size_t s = 0; s < next.per_stage.size(); ++s)
      for (std::size_t j = 0; j < next.per_stage[s].size(); ++j)
        delta = std::max(delta, std::abs(next.per_stage[s][j] - model.theta->per_stage[s][j]));
    model.theta = std::move(next);
    if (delta < 1e-13) break;
  }
  return *model.theta;
}

}  // namespace

TEST_CASE("expected path counts split rows over their possible paths") {
  const auto inst = one_binary_variable(0, 0, 1);
  TransitionProbabilities theta;
  theta.per_stage = {{0.75, 0.25}};
  StagedTreeModel model{inst.tree, inst.staging, theta};
  const auto counts = expected_path_counts(model, group_counts(*inst.tree, inst.data));
  CHECK(counts[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(counts[1] == doctest::Approx(0.25).epsilon(1e-15));

  // theta masses 0.3 vs 0.1 normalize to 0.75 / 0.25 as well.
  const auto tree2 =
      std::make_shared<const EventTree>(EventTree::from_variables(binary_spec(2)));
  const Staging sat2 = Staging::saturated(*tree2);
  TransitionProbabilities t2;
  t2.per_stage = {{0.4, 0.6}, {0.75, 0.25}, {0.5, 0.5}};
  StagedTreeModel m2{tree2, sat2, t2};
  DataSet d2;
  d2.spec = tree2->variables();
  d2.rows.push_back(Sample{{0, kMissing}});  // paths 0 and 1: 0.4*0.75 vs 0.4*0.25
  const auto c2 = expected_path_counts(m2, group_counts(*tree2, d2));
  CHECK(c2[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(c2[1] == doctest::Approx(0.25).epsilon(1e-12));

  DataSet complete;
  complete.spec = tree2->variables();
  complete.rows.push_back(Sample{{1, 0}});
  const auto c3 = expected_path_counts(m2, group_counts(*tree2, complete));
  CHECK(c3[2] == 1.0);
  CHECK(c3[0] + c3[1] + c3[3] == 0.0);
}

TEST_CASE("expected path counts match the enumeration oracle and conserve mass") {
  Rng rng(41);
  for (int rep = 0; rep < 15; ++rep) {
    const StagedTreeModel model = test::random_model(rng);
    const DataSet data = test::random_dataset(model.tree->variables(), 100, 0.3, rng);
    const auto got = expected_path_counts(model, group_counts(*model.tree, data));
    const auto want = test::oracle_expected_counts(model, data);
    double total = 0.0;
    for (int p = 0; p < model.tree->path_count(); ++p) {
      CHECK(got[p] == doctest::Approx(want[p]).epsilon(1e-9));
      total += got[p];
    }
    CHECK(total == doctest::Approx(100.0).epsilon(1e-9));
  }
}

TEST_CASE("soft em on complete data is the mle in one iteration") {
  Rng rng(43);
  const StagedTreeModel gen = test::random_model(rng);
  const DataSet data = sample_data(gen, 300, 17);
  EmConfig config;
  const EmResult res = soft_em_params(gen.tree, gen.staging, data, config);
  CHECK(res.iterations == 1);
  CHECK(res.converged);
  const TransitionProbabilities mle =
      fit_mle(*gen.tree, gen.staging, complete_edge_counts(gen, data), 0.0);
  for (std::size_t s = 0; s < mle.per_stage.size(); ++s)
    for (std::size_t j = 0; j < mle.per_stage[s].size(); ++j)
      CHECK(res.model.theta->per_stage[s][j] ==
            doctest::Approx(mle.per_stage[s][j]).epsilon(1e-12));
}

TEST_CASE("soft em solves the one-variable fixed point") {
  // With informative rows {yes x3, no x2} the missing rows redistribute
  // proportionally and the fixed point stays at 3/5.
  {
    const auto inst = one_binary_variable(3, 2, 2);
    const auto oracle = oracle_em_fixed_point(inst.tree, inst.staging, inst.data);
    CHECK(oracle.per_stage[0][0] == doctest::Approx(0.6).epsilon(1e-9));
    EmConfig config;
    config.tol = 1e-12;
    config.max_iter = 200;
    const EmResult res = soft_em_params(inst.tree, inst.staging, inst.data, config);
    CHECK(res.model.theta->per_stage[0][0] ==
          doctest::Approx(oracle.per_stage[0][0]).epsilon(1e-6));
    CHECK(res.converged);
  }
  // With no contradicting observations the fixed point of the update is the
  // boundary: all mass on "yes".
  {
    const auto inst = one_binary_variable(3, 0, 2);
    const auto oracle = oracle_em_fixed_point(inst.tree, inst.staging, inst.data);
    CHECK(oracle.per_stage[0][0] == doctest::Approx(1.0).epsilon(1e-9));
    EmConfig config;
    config.tol = 1e-12;
    config.max_iter = 100000;
    const EmResult res = soft_em_params(inst.tree, inst.staging, inst.data, config);
    CHECK(res.model.theta->per_stage[0][0] ==
          doctest::Approx(oracle.per_stage[0][0]).epsilon(1e-6));
  }
}

TEST_CASE("soft em loglik trace is nondecreasing") {
  Rng rng(47);
  for (int rep = 0; rep < 20; ++rep) {
    const StagedTreeModel gen = test::random_model(rng);
    DataSet data = sample_data(gen, 200, 1000 + rep);
    AmputeSpec aspec;
    aspec.proportion = std::min(0.2, 0.9 / gen.tree->variables().var_count());
    aspec.seed = 2000 + rep;
    data = ampute(data, aspec);
    EmConfig config;
    const EmResult res = soft_em_params(gen.tree, gen.staging, data, config);
    for (std::size_t t = 1; t < res.loglik_trace.size(); ++t)
      CHECK(res.loglik_trace[t] >= res.loglik_trace[t - 1] - 1e-9);
    CHECK(static_cast<int>(res.loglik_trace.size()) == res.iterations);
  }
}

TEST_CASE("soft em fixed point is stable under one more refit") {
  Rng rng(53);
  const StagedTreeModel gen = test::random_model(rng);
  DataSet data = sample_data(gen, 400, 11);
  AmputeSpec aspec;
  aspec.proportion = std::min(0.15, 0.9 / gen.tree->variables().var_count());
  aspec.seed = 12;
  data = ampute(data, aspec);
  EmConfig config;
  config.tol = 1e-10;
  config.max_iter = 500;
  const EmResult res = soft_em_params(gen.tree, gen.staging, data, config);
  REQUIRE(res.converged);
  const GroupedCounts grouped = group_counts(*gen.tree, data);
  const auto counts = expected_path_counts(res.model, grouped);
  const TransitionProbabilities refit =
      fit_mle(*gen.tree, gen.staging, complete_edge_counts(res.model, counts), 0.0);
  for (std::size_t s = 0; s < refit.per_stage.size(); ++s)
    for (std::size_t j = 0; j < refit.per_stage[s].size(); ++j)
      CHECK(std::abs(refit.per_stage[s][j] - res.model.theta->per_stage[s][j]) <
            10 * config.tol);
}

TEST_CASE("hard imputation picks the most probable completion") {
  const auto tree2 =
      std::make_shared<const EventTree>(EventTree::from_variables(binary_spec(2)));
  const Staging sat2 = Staging::saturated(*tree2);
  TransitionProbabilities theta;
  theta.per_stage = {{0.4, 0.6}, {0.75, 0.25}, {0.5, 0.5}};
  StagedTreeModel model{tree2, sat2, theta};

  DataSet data;
  data.spec = tree2->variables();
  data.rows.push_back(Sample{{0, kMissing}});  // masses 0.3 vs 0.1
  data.rows.push_back(Sample{{1, 0}});         // complete rows pass through
  data.rows.push_back(Sample{{1, kMissing}});  // exact tie 0.3/0.3: lowest path id
  const DataSet imputed = hard_impute(model, data, 9);
  CHECK(imputed.rows[0].values == std::vector<int>{0, 0});
  CHECK(imputed.rows[1].values == std::vector<int>{1, 0});
  CHECK(imputed.rows[2].values == std::vector<int>{1, 0});

  // Idempotent on complete data.
  CHECK(hard_impute(model, imputed, 10).rows == imputed.rows);

  // Paths through a zero-probability branch: every completion has mass 0,
  // and the tie-break still picks the lowest path id.
  TransitionProbabilities zero2;
  zero2.per_stage = {{0.0, 1.0}, {0.75, 0.25}, {0.5, 0.5}};
  StagedTreeModel degenerate2{tree2, sat2, zero2};
  DataSet blocked2;
  blocked2.spec = tree2->variables();
  blocked2.rows.push_back(Sample{{0, kMissing}});
  const DataSet imp2 = hard_impute(degenerate2, blocked2, 11);
  CHECK(imp2.rows[0].values == std::vector<int>{0, 0});
}

TEST_CASE("hard em iteration contract") {
  Rng rng(59);
  const StagedTreeModel gen = test::random_model(rng);

  // Complete data: one iteration, the plain MLE.
  const DataSet complete = sample_data(gen, 200, 3);
  EmConfig config;
  const EmResult res = hard_em_params(gen.tree, gen.staging, complete, config);
  CHECK(res.iterations == 1);
  CHECK(res.converged);
  const TransitionProbabilities mle =
      fit_mle(*gen.tree, gen.staging, complete_edge_counts(gen, complete), 0.0);
  CHECK(res.model.theta->per_stage == mle.per_stage);

  // Stable completions: one iteration to impute, one to confirm.
  DataSet holed = sample_data(gen, 200, 4);
  AmputeSpec aspec;
  aspec.proportion = std::min(0.1, 0.9 / gen.tree->variables().var_count());
  aspec.seed = 5;
  holed = ampute(holed, aspec);
  const EmResult res2 = hard_em_params(gen.tree, gen.staging, holed, config);
  CHECK(res2.converged);
  CHECK(res2.iterations >= 2);
  CHECK(res2.imputed_data.has_value());
  CHECK(res2.imputed_data->complete());

  // An instance that has not stabilized when max_iter cuts it off reports
  // converged = false. Imputation is a deterministic function of theta, so
  // the run is reproducible.
  bool found_capped = false;
  for (int seed = 0; seed < 40 && !found_capped; ++seed) {
    Rng r2(700 + seed);
    const StagedTreeModel g2 = test::random_model(r2);
    DataSet d2 = test::random_dataset(g2.tree->variables(), 12, 0.45, r2);
    EmConfig capped;
    capped.max_iter = 60;
    const EmResult probe = hard_em_params(g2.tree, g2.staging, d2, capped);
    if (probe.iterations > 2) {
      capped.max_iter = probe.iterations - 1;
      const EmResult cut = hard_em_params(g2.tree, g2.staging, d2, capped);
      CHECK_FALSE(cut.converged);
      CHECK(cut.iterations == capped.max_iter);
      found_capped = true;
    }
  }
  CHECK(found_capped);
}

TEST_CASE("structural em on complete data equals one plain search") {
  const auto tree = std::make_shared<const EventTree>(EventTree::from_variables(binary_spec(3)));
  Rng rng(61);
  const Staging staging = test::random_staging(*tree, rng);
  StagedTreeModel gen{tree, staging, test::random_theta(*tree, staging, rng)};
  const DataSet data = sample_data(gen, 2000, 8);

  EmConfig config;
  config.variant = EmVariant::STRUCT_EM_HC;
  const EmResult em = structural_em(tree, data, config);
  CHECK(em.iterations == 1);
  CHECK(em.converged);

  SearchConfig search;
  search.score = ScoreKind::COMPLETE;
  search.strategy = SearchStrategy::HC;
  const SearchResult plain = hc_stage_search(tree, data, search);
  CHECK(em.model.staging == plain.model.staging);
  CHECK(em.model.theta->per_stage == plain.model.theta->per_stage);
}

TEST_CASE("structural em converges on mcar data from a known model") {
  VariableSpec spec;
  spec.names = {"A", "B", "C"};
  spec.levels = {{"a", "b"}, {"a", "b"}, {"a", "b"}};
  auto tree = std::make_shared<const EventTree>(EventTree::from_variables(spec));
  Staging staging = Staging::saturated(*tree);
  const auto d2 = staging.stages_at_depth(*tree, 2);
  staging = staging.merged(*tree, d2[0], d2[1]);
  TransitionProbabilities theta;
  theta.per_stage = {{0.6, 0.4}, {0.8, 0.2}, {0.35, 0.65}, {0.7, 0.3}, {0.25, 0.75},
                     {0.5, 0.5}};
  StagedTreeModel gen{tree, staging, theta};

  int converged = 0;
  for (int rep = 0; rep < 25; ++rep) {
    DataSet data = sample_data(gen, 5000, derive_seed(900, rep));
    AmputeSpec aspec;
    aspec.proportion = 0.05;
    aspec.seed = derive_seed(901, rep);
    data = ampute(data, aspec);
    EmConfig config;
    config.variant = EmVariant::STRUCT_EM_HC;
    config.seed = rep;
    const EmResult res = structural_em(tree, data, config);
    CHECK(res.iterations <= 50);
    converged += res.converged;
  }
  CHECK(converged >= 23);
}

TEST_CASE("structural em variants are deterministic") {
  Rng rng(67);
  const StagedTreeModel gen = test::random_model(rng);
  DataSet data = sample_data(gen, 600, 13);
  AmputeSpec aspec;
  aspec.proportion = std::min(0.1, 0.9 / gen.tree->variables().var_count());
  aspec.seed = 14;
  data = ampute(data, aspec);
  for (EmVariant variant :
       {EmVariant::STRUCT_EM_HC, EmVariant::STRUCT_EM_BHC, EmVariant::STRUCT_EM_SIMPLE}) {
    EmConfig config;
    config.variant = variant;
    config.seed = 99;
    const EmResult a = structural_em(gen.tree, data, config);
    const EmResult b = structural_em(gen.tree, data, config);
    CHECK(a.model.staging == b.model.staging);
    CHECK(a.model.theta->per_stage == b.model.theta->per_stage);
    CHECK(a.iterations == b.iterations);
    CHECK(a.loglik_trace == b.loglik_trace);
  }
}

TEST_CASE("random imputation draws proportionally and stays seeded") {
  const auto inst = one_binary_variable(0, 0, 200);
  TransitionProbabilities theta;
  theta.per_stage = {{0.8, 0.2}};
  StagedTreeModel model{inst.tree, inst.staging, theta};
  const DataSet a = hard_impute(model, inst.data, 123, ImputeRule::RANDOM);
  const DataSet b = hard_impute(model, inst.data, 123, ImputeRule::RANDOM);
  CHECK(a.rows == b.rows);
  int yes = 0;
  for (const auto& row : a.rows) yes += row.values[0] == 0;
  CHECK(yes > 120);  // roughly 160 expected
  CHECK(yes < 195);
}
