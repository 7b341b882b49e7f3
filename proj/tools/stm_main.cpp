// stm: staged tree models for categorical data with missing values.
//
// Subcommands: simulate, ampute, fit, evaluate, benchmark. Everything random
// flows from explicit seeds; see README.md for formats.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "stm/benchmark.hpp"
#include "stm/em.hpp"
#include "stm/log.hpp"
#include "stm/model_json.hpp"
#include "stm/order.hpp"

namespace {

using nlohmann::json;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void emit_report(const json& report, const std::string& out_path) {
  if (out_path.empty())
    std::cout << report.dump(2) << '\n';
  else
    write_text(out_path, report.dump(2) + "\n");
}

stm::ScoreKind parse_score(const std::string& name) {
  if (name == "full") return stm::ScoreKind::FULL_MISSING;
  if (name == "omit") return stm::ScoreKind::OMIT;
  if (name == "fm") return stm::ScoreKind::FIRST_MISSING;
  if (name == "sa") return stm::ScoreKind::STAGE_AVERAGE;
  if (name == "complete") return stm::ScoreKind::COMPLETE;
  throw CLI::ValidationError("--score", "unknown score '" + name + "'");
}

json loglik_to_json(const stm::LogLikValue& ll) {
  return json{{"kind", stm::loglik_kind_name(ll.kind)},
              {"loglik", ll.loglik},
              {"n_effective", ll.n_effective},
              {"dim", ll.dim},
              {"warning", ll.warning}};
}

int run_fit(const std::string& data_path, const std::string& na_token,
            const std::string& model_path, const std::string& algo, const std::string& score_name,
            const std::string& order_mode, int max_orders, std::uint64_t seed, double epsilon,
            double smooth, int em_max_iter, int em_max_outer, double em_tol,
            const std::string& impute_rule, const std::string& out_path,
            const std::string& report_path, const std::string& dump_groups) {
  std::optional<stm::VariableSpec> spec;
  std::shared_ptr<const stm::EventTree> tree;
  std::optional<stm::Staging> model_staging;
  if (!model_path.empty()) {
    auto m = stm::load_model(model_path);
    spec = m.tree->variables();
    tree = m.tree;
    model_staging = m.staging;
  }
  stm::DataSet data = stm::read_csv(data_path, na_token, spec ? &*spec : nullptr);
  if (!spec) {
    spec = data.spec;
    tree = std::make_shared<const stm::EventTree>(stm::EventTree::from_variables(*spec));
  }

  stm::SearchConfig search;
  search.score = parse_score(score_name);
  search.seed = seed;
  search.score_epsilon = epsilon;

  stm::EmConfig em;
  em.max_iter = em_max_iter;
  em.max_outer_iter = em_max_outer;
  em.tol = em_tol;
  em.seed = seed;
  em.impute = impute_rule == "random" ? stm::ImputeRule::RANDOM : stm::ImputeRule::ARGMAX;
  em.search = search;
  em.search.score = stm::ScoreKind::COMPLETE;

  const bool is_em = algo.rfind("em-", 0) == 0;
  if (algo == "em-hc") em.variant = stm::EmVariant::STRUCT_EM_HC;
  else if (algo == "em-bhc") em.variant = stm::EmVariant::STRUCT_EM_BHC;
  else if (algo == "em-simple") em.variant = stm::EmVariant::STRUCT_EM_SIMPLE;
  else if (algo == "em-params") em.variant = stm::EmVariant::PARAM_SOFT;
  else if (algo == "em-params-hard") em.variant = stm::EmVariant::PARAM_HARD;
  else if (algo != "hc" && algo != "bhc")
    throw CLI::ValidationError("--algo", "unknown algorithm '" + algo + "'");
  search.strategy = algo == "bhc" ? stm::SearchStrategy::BHC : stm::SearchStrategy::HC;
  em.search.strategy =
      em.variant == stm::EmVariant::STRUCT_EM_BHC ? stm::SearchStrategy::BHC
                                                  : stm::SearchStrategy::HC;

  json report;
  report["algo"] = algo;
  stm::StagedTreeModel fitted;
  const auto t0 = std::chrono::steady_clock::now();

  if (order_mode == "search") {
    stm::OrderSearchConfig cfg;
    cfg.search = search;
    if (is_em) {
      if (em.variant == stm::EmVariant::PARAM_SOFT || em.variant == stm::EmVariant::PARAM_HARD)
        throw CLI::ValidationError("--order", "order search needs a structural algorithm");
      cfg.em = em;
    }
    cfg.max_orders = max_orders;
    cfg.seed = seed;
    auto res = stm::order_search(*spec, data, cfg);
    fitted = std::move(res.result.model);
    report["ordering"] = res.ordering;
    report["score"] = res.result.score;
    json orders = json::array();
    for (const auto& os : res.order_scores)
      orders.push_back({{"ordering", os.ordering}, {"score", os.score}});
    report["order_scores"] = std::move(orders);
  } else if (is_em) {
    stm::EmResult res;
    // Parameter EM estimates a fixed staging: the supplied model's when
    // given, the saturated one otherwise.
    const stm::Staging fixed =
        model_staging ? *model_staging : stm::Staging::saturated(*tree);
    if (em.variant == stm::EmVariant::PARAM_SOFT)
      res = stm::soft_em_params(tree, fixed, data, em);
    else if (em.variant == stm::EmVariant::PARAM_HARD)
      res = stm::hard_em_params(tree, fixed, data, em);
    else
      res = stm::structural_em(tree, data, em);
    report["iterations"] = res.iterations;
    report["converged"] = res.converged;
    report["loglik_trace"] = res.loglik_trace;
    fitted = std::move(res.model);
  } else {
    auto res = search.strategy == stm::SearchStrategy::BHC
                   ? stm::bhc_stage_search(tree, data, search)
                   : stm::hc_stage_search(tree, data, search);
    report["score"] = res.score;
    report["moves"] = res.trace.size();
    fitted = std::move(res.model);
  }
  report["elapsed_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Order search may return a model over a different column order.
  if (fitted.tree->variables().names != data.spec.names)
    data = stm::align_columns(data, fitted.tree->variables());

  if (smooth > 0.0 && fitted.theta) {
    // Laplace-smoothed refit of the selected staging.
    const auto grouped = stm::group_counts(*fitted.tree, data);
    stm::SituationCounts counts = stm::zero_situation_counts(*fitted.tree);
    for (int i : grouped.singleton_groups)
      stm::add_path_weight(*fitted.tree, grouped.groups[i].paths.front(),
                           static_cast<double>(grouped.groups[i].count), counts);
    fitted.theta = stm::fit_mle(*fitted.tree, fitted.staging,
                                stm::pool_by_stage(*fitted.tree, fitted.staging, counts), smooth);
  }

  const auto grouped = stm::group_counts(*fitted.tree, data);
  report["loglik"] = loglik_to_json(stm::loglik_full_missing(fitted, grouped));
  report["stages"] = fitted.staging.stage_count();
  if (!dump_groups.empty()) write_text(dump_groups, stm::grouped_counts_to_json(grouped) + "\n");
  if (!out_path.empty()) stm::save_model(fitted, out_path);
  emit_report(report, report_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"staged tree models with missing data"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_path;
  app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for benchmark replicates")
      ->capture_default_str();
  app.add_option("--out", out_path, "output file (subcommand-specific)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample complete data from a model");
  std::string sim_model;
  long long sim_n = 1000;
  sim->add_option("--model", sim_model, "model json")->required();
  sim->add_option("--n", sim_n, "rows to sample")->required();

  // ampute
  auto* amp = app.add_subcommand("ampute", "inject missing values into complete data");
  std::string amp_in, amp_mech = "mcar", amp_model, amp_na = "NA";
  double amp_p = 0.1;
  amp->add_option("--in", amp_in, "input csv")->required();
  amp->add_option("--p", amp_p, "overall missing-cell proportion")->required();
  amp->add_option("--mechanism", amp_mech, "mcar|mar|mnar")->capture_default_str();
  amp->add_option("--model", amp_model, "model json pinning the level order");
  amp->add_option("--na", amp_na, "NA token")->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "learn a staging (and optionally the variable order)");
  std::string fit_data, fit_model, fit_algo = "bhc", fit_score = "full", fit_order = "fixed";
  std::string fit_na = "NA", fit_report, fit_impute = "argmax", fit_dump_groups;
  double fit_eps = 1e-9, fit_smooth = 0.0, fit_em_tol = 1e-6;
  int fit_em_max_iter = 50, fit_em_max_outer = 20, fit_max_orders = 0;
  fit->add_option("--data", fit_data, "input csv")->required();
  fit->add_option("--model", fit_model, "model json supplying the variable spec");
  fit->add_option("--algo", fit_algo,
                  "hc|bhc|em-hc|em-bhc|em-simple|em-params|em-params-hard")
      ->capture_default_str();
  fit->add_option("--score", fit_score, "full|omit|fm|sa|complete")->capture_default_str();
  fit->add_option("--order", fit_order, "fixed|search")->capture_default_str();
  fit->add_option("--max-orders", fit_max_orders, "sample this many orderings instead of all");
  fit->add_option("--epsilon", fit_eps, "strict-improvement threshold")->capture_default_str();
  fit->add_option("--smooth", fit_smooth, "Laplace smoothing for the final refit");
  fit->add_option("--em-max-iter", fit_em_max_iter, "parameter-EM iteration cap");
  fit->add_option("--em-max-outer", fit_em_max_outer, "structural-EM outer iteration cap");
  fit->add_option("--em-tol", fit_em_tol, "EM loglik convergence tolerance");
  fit->add_option("--impute", fit_impute, "argmax|random")->capture_default_str();
  fit->add_option("--na", fit_na, "NA token")->capture_default_str();
  fit->add_option("--report", fit_report, "write the json report here instead of stdout");
  fit->add_option("--dump-groups", fit_dump_groups, "write grouped possible-path counts json");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "compare an estimated model against a reference");
  std::string eval_true, eval_est, eval_metrics = "hamming,kl,cd";
  eval->add_option("--true", eval_true, "reference model json")->required();
  eval->add_option("--est", eval_est, "estimated model json")->required();
  eval->add_option("--metrics", eval_metrics, "subset of hamming,kl,cd,kendall")
      ->capture_default_str();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "run a simulation study plan");
  std::string bench_plan, bench_times;
  bench->add_option("--plan", bench_plan, "plan json")->required();
  bench->add_option("--times", bench_times, "also write learn times to this csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto model = stm::load_model(sim_model);
      const auto data = stm::sample_data(model, sim_n, seed);
      if (out_path.empty())
        std::cout << stm::to_csv(data);
      else
        stm::write_csv(data, out_path);
      return 0;
    }
    if (*amp) {
      std::optional<stm::VariableSpec> spec;
      if (!amp_model.empty()) spec = stm::load_model(amp_model).tree->variables();
      const auto data = stm::read_csv(amp_in, amp_na, spec ? &*spec : nullptr);
      stm::AmputeSpec aspec;
      aspec.proportion = amp_p;
      aspec.mechanism = stm::mechanism_from_name(amp_mech);
      aspec.seed = seed;
      const auto amputed = stm::ampute(data, aspec);
      if (out_path.empty())
        std::cout << stm::to_csv(amputed);
      else
        stm::write_csv(amputed, out_path);
      return 0;
    }
    if (*fit) {
      return run_fit(fit_data, fit_na, fit_model, fit_algo, fit_score, fit_order, fit_max_orders,
                     seed, fit_eps, fit_smooth, fit_em_max_iter, fit_em_max_outer, fit_em_tol,
                     fit_impute, out_path, fit_report, fit_dump_groups);
    }
    if (*eval) {
      const auto truth = stm::load_model(eval_true);
      const auto est = stm::load_model(eval_est);
      json report;
      // json has no infinity; divergence sentinels become the string "inf".
      auto number = [](double v) {
        return std::isfinite(v) ? json(v) : json(stm::format_double(v));
      };
      std::stringstream names(eval_metrics);
      std::string metric;
      while (std::getline(names, metric, ',')) {
        if (metric == "hamming") report["hamming"] = stm::hamming_staging(truth, est);
        else if (metric == "kl") report["kl"] = number(stm::kl_joint(truth, est));
        else if (metric == "cd") report["cd"] = number(stm::cd_joint(truth, est));
        else if (metric == "kendall")
          report["kendall"] = stm::kendall_orderings(truth.tree->variables().names,
                                                     est.tree->variables().names);
        else
          throw std::runtime_error("unknown metric '" + metric + "'");
      }
      emit_report(report, out_path);
      return 0;
    }
    if (*bench) {
      const auto plan = stm::load_plan(bench_plan);
      const auto rows = stm::run_benchmark(plan, jobs);
      const std::string csv = stm::benchmark_csv(rows);
      if (out_path.empty())
        std::cout << csv;
      else
        write_text(out_path, csv);
      if (!bench_times.empty()) write_text(bench_times, stm::benchmark_times_csv(rows));
      long long errors = 0;
      for (const auto& row : rows) errors += !row.error.empty();
      if (errors > 0)
        stm::log_warn(std::to_string(errors) + " of " + std::to_string(rows.size()) +
                      " benchmark runs failed; see the status column");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "stm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
