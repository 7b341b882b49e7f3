#include <cstdio>
#include <fstream>

#include "doctest.h"

#include "stm/benchmark.hpp"
#include "stm/model_json.hpp"

#include "support/random_instances.hpp"

using namespace stm;

namespace {

std::string models_dir() { return STM_MODELS_DIR; }

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/stm_test_" + name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("bundled generators match their published shapes") {
  const struct {
    const char* file;
    int vars, paths, stages;
  } expected[] = {{"titanic.json", 4, 32, 13},
                  {"chds.json", 4, 24, 7},
                  {"bank.json", 4, 16, 8},
                  {"life.json", 5, 72, 17},
                  {"coronary.json", 6, 64, 14}};
  for (const auto& e : expected) {
    const StagedTreeModel model = load_model(models_dir() + "/" + e.file);
    CHECK(model.tree->variables().var_count() == e.vars);
    CHECK(model.tree->path_count() == e.paths);
    CHECK(model.staging.stage_count() == e.stages);
    REQUIRE(model.theta.has_value());
    double total = 0.0;
    for (double p : path_distribution(model)) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("model json round-trips exactly") {
  Rng rng(83);
  for (int rep = 0; rep < 10; ++rep) {
    const StagedTreeModel model = test::random_model(rng);
    const std::string path = write_temp("roundtrip.json", model_to_json(model).dump());
    const StagedTreeModel loaded = load_model(path);
    CHECK(loaded.tree->same_structure(*model.tree));
    CHECK(loaded.staging == model.staging);
    REQUIRE(loaded.theta.has_value());
    CHECK(loaded.theta->per_stage == model.theta->per_stage);  // bit-exact
    std::remove(path.c_str());
  }
}

TEST_CASE("model json validation names the offending field") {
  const char* good = R"({
    "variables": [{"name": "X", "levels": ["a", "b"]}],
    "staging": [[0]],
    "theta": {"0": {"a": 0.5, "b": 0.5}}
  })";
  const auto path = write_temp("good.json", good);
  CHECK(load_model(path).theta.has_value());
  std::remove(path.c_str());

  auto expect_error = [&](const std::string& text, const std::string& needle) {
    const auto p = write_temp("bad.json", text);
    CHECK_THROWS_WITH_AS(load_model(p), doctest::Contains(needle.c_str()), std::runtime_error);
    std::remove(p.c_str());
  };
  // A distribution off by 0.03 is rejected.
  expect_error(R"({"variables": [{"name": "X", "levels": ["a", "b"]}],
                   "staging": [[0]],
                   "theta": {"0": {"a": 0.47, "b": 0.5}}})",
               "theta");
  expect_error(R"({"variables": [{"name": "X", "levels": ["a", "b"]}],
                   "staging": [[0], [1]]})",
               "staging");
  expect_error(R"({"variables": [], "staging": []})", "variables");
  expect_error(R"({"variables": [{"name": "X", "levels": ["a", "b"]}],
                   "staging": [[0]],
                   "theta": {"0": {"a": 0.5}}})",
               "theta.0");
}

TEST_CASE("a model without theta loads and requires fitting") {
  const char* text = R"({
    "variables": [{"name": "X", "levels": ["a", "b"]}, {"name": "Y", "levels": ["a", "b"]}],
    "staging": [[0], [1, 1]]
  })";
  const auto path = write_temp("notheta.json", text);
  const StagedTreeModel model = load_model(path);
  CHECK_FALSE(model.theta.has_value());
  CHECK(model.staging.stage_count() == 2);
  CHECK_THROWS_AS(path_probability(model, 0), std::logic_error);
  std::remove(path.c_str());
}

TEST_CASE("benchmark rows cover the plan grid and stay deterministic") {
  BenchmarkPlan plan;
  plan.model_paths = {models_dir() + "/bank.json"};
  plan.n_grid = {400};
  plan.p_grid = {0.05};
  plan.mechanisms = {Mechanism::MCAR};
  plan.algorithms = {"om-hc", "fm-bhc"};
  plan.replicates = 3;
  plan.base_seed = 1234;

  const auto rows = run_benchmark(plan, 1);
  REQUIRE(rows.size() == 6);  // 1 condition x 2 algorithms x 3 replicates
  for (const auto& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.metrics.hamming.has_value());
    CHECK(*row.metrics.hamming >= 0.0);
    CHECK(*row.metrics.hamming <= 1.0);
  }

  const std::string csv1 = benchmark_csv(rows);
  const auto rows2 = run_benchmark(plan, 2);  // worker pool must not change bytes
  CHECK(benchmark_csv(rows2) == csv1);
  CHECK(csv1.substr(0, csv1.find('\n')) ==
        "model,n,p,mechanism,algorithm,replicate,seed,status,hamming,kl,cd,kendall");

  // Times go to a separate report so the results file stays byte-stable.
  const std::string times = benchmark_times_csv(rows);
  CHECK(times.find("learn_time_s") != std::string::npos);
}

TEST_CASE("replicate seeds are independent of the replicate count") {
  // Rows for replicate r must be reproducible in isolation: extending the
  // plan with more replicates cannot change the earlier ones.
  BenchmarkPlan plan;
  plan.model_paths = {models_dir() + "/bank.json"};
  plan.n_grid = {300};
  plan.p_grid = {0.1};
  plan.mechanisms = {Mechanism::MNAR};
  plan.algorithms = {"fm-hc"};
  plan.base_seed = 555;
  plan.replicates = 2;
  const auto short_run = run_benchmark(plan, 1);
  plan.replicates = 5;
  const auto long_run = run_benchmark(plan, 1);
  for (const auto& row : short_run) {
    bool matched = false;
    for (const auto& other : long_run)
      if (other.replicate == row.replicate) {
        CHECK(other.seed == row.seed);
        CHECK(other.metrics.hamming == row.metrics.hamming);
        CHECK(other.metrics.kl == row.metrics.kl);
        matched = true;
      }
    CHECK(matched);
  }
}

TEST_CASE("benchmark records error rows and continues") {
  BenchmarkPlan plan;
  plan.model_paths = {models_dir() + "/coronary.json"};  // 6 variables
  plan.n_grid = {50};
  plan.p_grid = {0.3};  // 0.3 * 6 > 1: amputation infeasible
  plan.mechanisms = {Mechanism::MCAR};
  plan.algorithms = {"om-hc"};
  plan.replicates = 2;
  plan.base_seed = 9;
  const auto rows = run_benchmark(plan, 1);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK_FALSE(row.error.empty());
    CHECK(benchmark_csv({row}).find("error") != std::string::npos);
  }
}

TEST_CASE("benchmark with order search reports kendall instead of hamming") {
  BenchmarkPlan plan;
  plan.model_paths = {models_dir() + "/bank.json"};
  plan.n_grid = {300};
  plan.p_grid = {0.05};
  plan.mechanisms = {Mechanism::MCAR};
  plan.algorithms = {"om-bhc"};
  plan.replicates = 1;
  plan.base_seed = 77;
  plan.order_search = true;
  const auto rows = run_benchmark(plan, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].error.empty());
  CHECK(rows[0].metrics.kendall.has_value());
  CHECK_FALSE(rows[0].metrics.hamming.has_value());
}

TEST_CASE("benchmark plans parse from json") {
  const char* text = R"({
    "models": ["a.json", "b.json"],
    "n": [500, 1000],
    "p": [0.05, 0.1],
    "mechanisms": ["mcar", "mnar"],
    "algorithms": ["full-hc", "em-simple"],
    "replicates": 4,
    "seed": 42,
    "order": "fixed"
  })";
  const BenchmarkPlan plan = plan_from_json(nlohmann::json::parse(text));
  CHECK(plan.model_paths.size() == 2);
  CHECK(plan.n_grid == std::vector<long long>{500, 1000});
  CHECK(plan.mechanisms == std::vector<Mechanism>{Mechanism::MCAR, Mechanism::MNAR});
  CHECK(plan.replicates == 4);
  CHECK(plan.base_seed == 42);
  CHECK_FALSE(plan.order_search);

  CHECK_THROWS_AS(plan_from_json(nlohmann::json::parse(R"({"models": []})")),
                  nlohmann::json::exception);
}
