#pragma once

#include <cstdint>
#include <optional>

#include "stm/dataset.hpp"
#include "stm/model.hpp"

namespace stm {

enum class Mechanism { MCAR, MAR, MNAR };

const char* mechanism_name(Mechanism m);
Mechanism mechanism_from_name(const std::string& name);

struct AmputeSpec {
  double proportion = 0.1;  // overall fraction of cells set missing, in (0,1)
  Mechanism mechanism = Mechanism::MCAR;
  std::optional<std::vector<double>> weights;  // per-variable, default all 1
  std::uint64_t seed = 0;
};

// n i.i.d. rows by forward sampling root-to-leaf through the stage
// distributions; deterministic given the seed.
DataSet sample_data(const StagedTreeModel& model, long long n, std::uint64_t seed);

// Sets a proportion p of cells missing with at most one hole per row: the
// amputed-row fraction is p*k (k variables), each amputed row loses one value
// and the target variable is uniform over the k variables. Row selection is
// uniform for MCAR; for MAR it is logistic in the standardized weighted sum
// of the row's other variables' level indices, for MNAR logistic in the
// standardized level index of the target value itself.
DataSet ampute(const DataSet& data, const AmputeSpec& spec);

}  // namespace stm
