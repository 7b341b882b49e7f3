#include "stm/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "stm/em.hpp"
#include "stm/model_json.hpp"
#include "stm/order.hpp"
#include "stm/rng.hpp"

namespace stm {

const std::vector<std::string> kBenchmarkAlgorithms = {
    "full-hc", "full-bhc", "om-hc", "om-bhc", "fm-hc",
    "fm-bhc",  "sa-hc",    "sa-bhc", "em-hc", "em-bhc", "em-simple"};

namespace {

struct AlgorithmSpec {
  bool uses_complete_data = false;
  bool is_em = false;
  EmVariant em_variant = EmVariant::STRUCT_EM_HC;
  ScoreKind score = ScoreKind::COMPLETE;
  SearchStrategy strategy = SearchStrategy::HC;
};

AlgorithmSpec algorithm_spec(const std::string& name) {
  AlgorithmSpec a;
  if (name == "full-hc") return {true, false, {}, ScoreKind::COMPLETE, SearchStrategy::HC};
  if (name == "full-bhc") return {true, false, {}, ScoreKind::COMPLETE, SearchStrategy::BHC};
  if (name == "om-hc") return {false, false, {}, ScoreKind::OMIT, SearchStrategy::HC};
  if (name == "om-bhc") return {false, false, {}, ScoreKind::OMIT, SearchStrategy::BHC};
  if (name == "fm-hc") return {false, false, {}, ScoreKind::FIRST_MISSING, SearchStrategy::HC};
  if (name == "fm-bhc") return {false, false, {}, ScoreKind::FIRST_MISSING, SearchStrategy::BHC};
  if (name == "sa-hc") return {false, false, {}, ScoreKind::STAGE_AVERAGE, SearchStrategy::HC};
  if (name == "sa-bhc") return {false, false, {}, ScoreKind::STAGE_AVERAGE, SearchStrategy::BHC};
  if (name == "em-hc") return {false, true, EmVariant::STRUCT_EM_HC, ScoreKind::COMPLETE,
                               SearchStrategy::HC};
  if (name == "em-bhc") return {false, true, EmVariant::STRUCT_EM_BHC, ScoreKind::COMPLETE,
                                SearchStrategy::BHC};
  if (name == "em-simple") return {false, true, EmVariant::STRUCT_EM_SIMPLE, ScoreKind::COMPLETE,
                                   SearchStrategy::HC};
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string model_name(const std::string& path) {
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.rfind(".json");
  if (dot != std::string::npos) name = name.substr(0, dot);
  return name;
}

}  // namespace

void BenchmarkPlan::validate() const {
  if (model_paths.empty()) throw std::invalid_argument("benchmark plan: no models");
  if (n_grid.empty()) throw std::invalid_argument("benchmark plan: empty n grid");
  if (p_grid.empty()) throw std::invalid_argument("benchmark plan: empty p grid");
  if (mechanisms.empty()) throw std::invalid_argument("benchmark plan: no mechanisms");
  if (algorithms.empty()) throw std::invalid_argument("benchmark plan: no algorithms");
  if (replicates < 1) throw std::invalid_argument("benchmark plan: replicates must be >= 1");
  for (const auto& a : algorithms) algorithm_spec(a);
}

BenchmarkPlan plan_from_json(const nlohmann::json& j) {
  BenchmarkPlan plan;
  if (!j.is_object()) throw std::runtime_error("benchmark plan: not a json object");
  plan.model_paths = j.at("models").get<std::vector<std::string>>();
  plan.n_grid = j.at("n").get<std::vector<long long>>();
  plan.p_grid = j.at("p").get<std::vector<double>>();
  for (const auto& m : j.at("mechanisms")) plan.mechanisms.push_back(mechanism_from_name(m));
  plan.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  plan.replicates = j.at("replicates").get<int>();
  plan.base_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("order")) plan.order_search = j["order"].get<std::string>() == "search";
  if (j.contains("score_epsilon")) plan.score_epsilon = j["score_epsilon"].get<double>();
  if (j.contains("em_max_outer")) plan.em_max_outer = j["em_max_outer"].get<int>();
  plan.validate();
  return plan;
}

BenchmarkPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return plan_from_json(j);
}

namespace {

struct Condition {
  int model_i, n_i, p_i, mech_i;
  std::uint64_t index;
};

MetricReport run_algorithm(const BenchmarkPlan& plan, const StagedTreeModel& generator,
                           const std::string& algo, const DataSet& complete,
                           const DataSet& amputed, std::uint64_t seed) {
  const AlgorithmSpec spec = algorithm_spec(algo);
  const DataSet& input = spec.uses_complete_data ? complete : amputed;

  SearchConfig search;
  search.score = spec.score;
  search.strategy = spec.strategy;
  search.score_epsilon = plan.score_epsilon;
  search.seed = seed;

  EmConfig em;
  em.variant = spec.em_variant;
  em.max_outer_iter = plan.em_max_outer;
  em.seed = seed;
  em.search = search;

  MetricReport report;
  const auto t0 = std::chrono::steady_clock::now();
  StagedTreeModel estimate;
  std::vector<std::string> ordering;
  if (plan.order_search) {
    OrderSearchConfig cfg;
    cfg.search = search;
    if (spec.is_em) cfg.em = em;
    cfg.seed = seed;
    OrderSearchResult res = order_search(generator.tree->variables(), input, cfg);
    estimate = std::move(res.result.model);
    ordering = std::move(res.ordering);
  } else if (spec.is_em) {
    estimate = structural_em(generator.tree, input, em).model;
  } else {
    estimate = spec.strategy == SearchStrategy::BHC
                   ? bhc_stage_search(generator.tree, input, search).model
                   : hc_stage_search(generator.tree, input, search).model;
  }
  report.learn_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (plan.order_search) {
    report.kendall = kendall_orderings(generator.tree->variables().names, ordering);
    report.kl = kl_joint(generator, estimate);
    report.cd = cd_joint(generator, estimate);
  } else {
    report.hamming = hamming_staging(generator, estimate);
    report.kl = kl_paths(generator, estimate);
    report.cd = cd_paths(generator, estimate);
  }
  return report;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkPlan& plan, int jobs) {
  plan.validate();
  std::vector<StagedTreeModel> generators;
  generators.reserve(plan.model_paths.size());
  for (const auto& path : plan.model_paths) {
    generators.push_back(load_model(path));
    generators.back().require_theta();
  }

  std::vector<Condition> conditions;
  for (std::size_t mi = 0; mi < plan.model_paths.size(); ++mi)
    for (std::size_t ni = 0; ni < plan.n_grid.size(); ++ni)
      for (std::size_t pi = 0; pi < plan.p_grid.size(); ++pi)
        for (std::size_t ki = 0; ki < plan.mechanisms.size(); ++ki)
          conditions.push_back({static_cast<int>(mi), static_cast<int>(ni), static_cast<int>(pi),
                                static_cast<int>(ki), conditions.size()});

  const int algo_count = static_cast<int>(plan.algorithms.size());
  std::vector<BenchmarkRow> rows(conditions.size() * algo_count * plan.replicates);

  // One work unit per (condition, replicate): the sampled data set is shared
  // by every algorithm so comparisons are paired.
  const long long units = static_cast<long long>(conditions.size()) * plan.replicates;
  std::atomic<long long> next_unit{0};
  auto worker = [&] {
    for (;;) {
      const long long unit = next_unit.fetch_add(1);
      if (unit >= units) return;
      const Condition& cond = conditions[unit / plan.replicates];
      const int rep = static_cast<int>(unit % plan.replicates);
      const StagedTreeModel& generator = generators[cond.model_i];
      const long long n = plan.n_grid[cond.n_i];
      const double p = plan.p_grid[cond.p_i];
      const Mechanism mech = plan.mechanisms[cond.mech_i];
      const std::uint64_t data_seed = derive_seed(plan.base_seed, cond.index, rep, 0);
      const std::uint64_t ampute_seed = derive_seed(plan.base_seed, cond.index, rep, 1);

      std::optional<DataSet> complete;
      std::optional<DataSet> amputed;
      std::string data_error;
      try {
        complete = sample_data(generator, n, data_seed);
        AmputeSpec aspec;
        aspec.proportion = p;
        aspec.mechanism = mech;
        aspec.seed = ampute_seed;
        amputed = ampute(*complete, aspec);
      } catch (const std::exception& e) {
        data_error = e.what();
      }

      for (int a = 0; a < algo_count; ++a) {
        const std::size_t row_index =
            (cond.index * algo_count + a) * plan.replicates + rep;
        BenchmarkRow& row = rows[row_index];
        row.model = model_name(plan.model_paths[cond.model_i]);
        row.n = n;
        row.p = p;
        row.mechanism = mech;
        row.algorithm = plan.algorithms[a];
        row.replicate = rep;
        row.seed = data_seed;
        if (!data_error.empty()) {
          row.error = data_error;
          continue;
        }
        try {
          row.metrics = run_algorithm(plan, generator, plan.algorithms[a], *complete, *amputed,
                                      derive_seed(plan.base_seed, cond.index, rep, 2 + a));
        } catch (const std::exception& e) {
          row.error = e.what();
        }
      }
    }
  };

  const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(units)));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void append_row_id(std::ostringstream& out, const BenchmarkRow& row) {
  char pbuf[32];
  std::snprintf(pbuf, sizeof pbuf, "%g", row.p);
  out << csv_safe(row.model) << ',' << row.n << ',' << pbuf << ','
      << mechanism_name(row.mechanism) << ',' << row.algorithm << ',' << row.replicate << ','
      << row.seed;
}

}  // namespace

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "model,n,p,mechanism,algorithm,replicate,seed,status,hamming,kl,cd,kendall\n";
  for (const auto& row : rows) {
    append_row_id(out, row);
    out << ',' << (row.error.empty() ? "ok" : "error: " + csv_safe(row.error)) << ','
        << optional_field(row.metrics.hamming) << ',' << optional_field(row.metrics.kl) << ','
        << optional_field(row.metrics.cd) << ',' << optional_field(row.metrics.kendall) << '\n';
  }
  return out.str();
}

std::string benchmark_times_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "model,n,p,mechanism,algorithm,replicate,seed,learn_time_s\n";
  for (const auto& row : rows) {
    append_row_id(out, row);
    out << ',' << format_double(row.metrics.learn_time_s) << '\n';
  }
  return out.str();
}

}  // namespace stm
