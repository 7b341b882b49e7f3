#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stm/metrics.hpp"
#include "stm/simulate.hpp"

#include "json.hpp"

namespace stm {

// Full-* algorithms run on the pre-amputation complete data as the baseline;
// every other algorithm sees the amputed data.
extern const std::vector<std::string> kBenchmarkAlgorithms;

struct BenchmarkPlan {
  std::vector<std::string> model_paths;
  std::vector<long long> n_grid;
  std::vector<double> p_grid;
  std::vector<Mechanism> mechanisms;
  std::vector<std::string> algorithms;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  bool order_search = false;
  double score_epsilon = 1e-9;
  int em_max_outer = 20;

  void validate() const;
};

BenchmarkPlan plan_from_json(const nlohmann::json& j);
BenchmarkPlan load_plan(const std::string& path);

struct BenchmarkRow {
  std::string model;
  long long n = 0;
  double p = 0.0;
  Mechanism mechanism = Mechanism::MCAR;
  std::string algorithm;
  int replicate = 0;
  std::uint64_t seed = 0;  // data seed; all run seeds derive from (plan seed, condition, replicate)
  std::string error;       // empty on success
  MetricReport metrics;
};

// One row per (condition, algorithm, replicate), in deterministic plan order.
// A failing run yields an error row; the benchmark continues.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkPlan& plan, int jobs = 1);

// Deterministic result bytes: identical plan and seed give an identical
// string. Wall-clock learn times go to the separate times CSV.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);
std::string benchmark_times_csv(const std::vector<BenchmarkRow>& rows);

std::string format_double(double value);  // shared CSV/report float formatting

}  // namespace stm
