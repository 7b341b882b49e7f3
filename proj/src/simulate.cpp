#include "stm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stm/log.hpp"
#include "stm/rng.hpp"

namespace stm {

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::MCAR: return "mcar";
    case Mechanism::MAR: return "mar";
    case Mechanism::MNAR: return "mnar";
  }
  return "?";
}

Mechanism mechanism_from_name(const std::string& name) {
  if (name == "mcar" || name == "MCAR") return Mechanism::MCAR;
  if (name == "mar" || name == "MAR") return Mechanism::MAR;
  if (name == "mnar" || name == "MNAR") return Mechanism::MNAR;
  throw std::invalid_argument("unknown missingness mechanism '" + name + "'");
}

DataSet sample_data(const StagedTreeModel& model, long long n, std::uint64_t seed) {
  const TransitionProbabilities& theta = model.require_theta();
  const EventTree& tree = *model.tree;
  if (n < 1) throw std::invalid_argument("sample_data: n must be at least 1");

  DataSet data;
  data.spec = tree.variables();
  data.origin = "simulated";
  data.rows.reserve(n);
  Rng rng(seed);
  const int k = data.spec.var_count();
  for (long long i = 0; i < n; ++i) {
    Sample row;
    row.values.resize(k);
    int v = 0;
    for (int d = 0; d < k; ++d) {
      const int slot = rng.categorical(theta.per_stage[model.staging.stage_of(v)]);
      row.values[d] = slot;
      v = tree.children(v)[slot];
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

DataSet ampute(const DataSet& data, const AmputeSpec& spec) {
  const int k = data.spec.var_count();
  const long long n = data.size();
  if (!(spec.proportion > 0.0 && spec.proportion < 1.0))
    throw std::invalid_argument("ampute: proportion must be in (0,1)");
  if (!data.complete())
    throw std::invalid_argument("ampute: input data already has missing values");
  const double row_fraction = spec.proportion * k;
  if (row_fraction > 1.0 + 1e-12)
    throw std::invalid_argument(
        "ampute: proportion * variable count exceeds 1; infeasible with one hole per row");
  if (spec.weights && static_cast<int>(spec.weights->size()) != k)
    throw std::invalid_argument("ampute: weights must have one entry per variable");

  const long long holes =
      std::min<long long>(n, static_cast<long long>(spec.proportion * n * k));
  DataSet out = data;
  if (holes == 0) {
    log_info("ampute: proportion too small for this data size, nothing amputed");
    return out;
  }

  Rng rng(spec.seed);
  std::vector<double> w(k, 1.0);
  if (spec.weights) w = *spec.weights;

  // Target variable per row, drawn up front so the mechanism score can
  // depend on it.
  std::vector<int> target(n);
  for (long long i = 0; i < n; ++i) target[i] = rng.uniform_int(k);

  std::vector<double> score(n, 0.0);
  if (spec.mechanism != Mechanism::MCAR) {
    for (long long i = 0; i < n; ++i) {
      const auto& values = data.rows[i].values;
      if (spec.mechanism == Mechanism::MAR) {
        double s = 0.0;
        for (int j = 0; j < k; ++j)
          if (j != target[i]) s += w[j] * values[j];
        score[i] = s;
      } else {
        score[i] = w[target[i]] * values[target[i]];
      }
    }
    const double mean = std::accumulate(score.begin(), score.end(), 0.0) / n;
    double var = 0.0;
    for (double s : score) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / n);
    for (double& s : score) s = sd > 0.0 ? (s - mean) / sd : 0.0;
  }

  // Weighted sampling without replacement (keys u^(1/w), keep the top
  // `holes`); MCAR weights are constant, reducing to a uniform subset.
  std::vector<std::pair<double, long long>> keys(n);
  for (long long i = 0; i < n; ++i) {
    const double weight =
        spec.mechanism == Mechanism::MCAR ? 1.0 : 1.0 / (1.0 + std::exp(-score[i]));
    const double u = rng.uniform01();
    keys[i] = {std::pow(u, 1.0 / weight), i};
  }
  std::nth_element(keys.begin(), keys.begin() + (holes - 1), keys.end(),
                   [](const auto& a, const auto& b) {
                     return a.first != b.first ? a.first > b.first : a.second < b.second;
                   });
  for (long long j = 0; j < holes; ++j) {
    const long long row = keys[j].second;
    out.rows[row].values[target[row]] = kMissing;
  }
  return out;
}

}  // namespace stm
