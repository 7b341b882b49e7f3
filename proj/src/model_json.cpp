#include "stm/model_json.hpp"

#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

namespace stm {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw std::runtime_error("model json: field '" + field + "': " + what);
}

}  // namespace

json model_to_json(const StagedTreeModel& model) {
  const EventTree& tree = *model.tree;
  const VariableSpec& spec = tree.variables();
  json j;
  j["variables"] = json::array();
  for (int v = 0; v < spec.var_count(); ++v)
    j["variables"].push_back({{"name", spec.names[v]}, {"levels", spec.levels[v]}});

  j["staging"] = json::array();
  for (int d = 0; d < spec.var_count(); ++d) {
    json row = json::array();
    for (int v : tree.situations_at_depth(d)) row.push_back(model.staging.stage_of(v));
    j["staging"].push_back(std::move(row));
  }

  if (model.theta) {
    json theta = json::object();
    for (int s = 0; s < model.staging.stage_count(); ++s) {
      const auto labels = tree.child_labels(model.staging.representative(s));
      json dist = json::object();
      for (std::size_t i = 0; i < labels.size(); ++i)
        dist[labels[i]] = model.theta->per_stage[s][i];
      theta[std::to_string(s)] = std::move(dist);
    }
    j["theta"] = std::move(theta);
  }
  return j;
}

StagedTreeModel model_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("model json: not an object");
  if (!j.contains("variables") || !j["variables"].is_array() || j["variables"].empty())
    schema_error("variables", "required non-empty array");

  VariableSpec spec;
  for (const auto& var : j["variables"]) {
    if (!var.contains("name") || !var["name"].is_string())
      schema_error("variables[].name", "required string");
    if (!var.contains("levels") || !var["levels"].is_array())
      schema_error("variables[].levels", "required array");
    spec.names.push_back(var["name"].get<std::string>());
    std::vector<std::string> levels;
    for (const auto& lv : var["levels"]) {
      if (!lv.is_string()) schema_error("variables[].levels", "levels must be strings");
      levels.push_back(lv.get<std::string>());
    }
    spec.levels.push_back(std::move(levels));
  }
  spec.validate();
  auto tree = std::make_shared<const EventTree>(EventTree::from_variables(spec));

  if (!j.contains("staging") || !j["staging"].is_array() ||
      static_cast<int>(j["staging"].size()) != spec.var_count())
    schema_error("staging", "required array with one entry per depth");
  std::vector<int> stage_of(tree->vertex_count(), -1);
  // File ids are arbitrary nonnegative integers; same-depth reuse groups
  // situations, cross-depth reuse stays distinct. Canonicalized below.
  std::map<std::pair<int, long long>, int> dense;
  for (int d = 0; d < spec.var_count(); ++d) {
    const auto& row = j["staging"][d];
    const auto& sits = tree->situations_at_depth(d);
    if (!row.is_array() || row.size() != sits.size())
      schema_error("staging[" + std::to_string(d) + "]",
                   "expected " + std::to_string(sits.size()) + " stage ids");
    for (std::size_t i = 0; i < sits.size(); ++i) {
      if (!row[i].is_number_integer() || row[i].get<long long>() < 0)
        schema_error("staging[" + std::to_string(d) + "]",
                     "stage ids must be nonnegative integers");
      const auto key = std::make_pair(d, row[i].get<long long>());
      const auto [it, inserted] = dense.emplace(key, static_cast<int>(dense.size()));
      stage_of[sits[i]] = it->second;
    }
  }
  Staging staging = Staging::from_stage_of(*tree, std::move(stage_of));

  std::optional<TransitionProbabilities> theta;
  if (j.contains("theta") && !j["theta"].is_null()) {
    if (!j["theta"].is_object()) schema_error("theta", "must be an object keyed by stage id");
    // Keys refer to the file's stage ids; map them through the situations.
    std::vector<long long> file_id_of_stage(staging.stage_count(), -1);
    for (int d = 0; d < spec.var_count(); ++d) {
      const auto& sits = tree->situations_at_depth(d);
      for (std::size_t i = 0; i < sits.size(); ++i)
        file_id_of_stage[staging.stage_of(sits[i])] = j["staging"][d][i].get<long long>();
    }
    TransitionProbabilities tp;
    tp.per_stage.resize(staging.stage_count());
    for (int s = 0; s < staging.stage_count(); ++s) {
      const std::string key = std::to_string(file_id_of_stage[s]);
      if (!j["theta"].contains(key)) schema_error("theta", "missing distribution for stage " + key);
      const auto& dist = j["theta"][key];
      if (!dist.is_object()) schema_error("theta." + key, "must map labels to probabilities");
      const auto labels = tree->child_labels(staging.representative(s));
      if (dist.size() != labels.size())
        schema_error("theta." + key, "expected " + std::to_string(labels.size()) + " labels");
      auto& out = tp.per_stage[s];
      out.reserve(labels.size());
      for (const auto& label : labels) {
        if (!dist.contains(label)) schema_error("theta." + key, "missing label '" + label + "'");
        if (!dist[label].is_number()) schema_error("theta." + key, "probabilities must be numbers");
        out.push_back(dist[label].get<double>());
      }
    }
    try {
      validate_theta(*tree, staging, tp);
    } catch (const std::invalid_argument& e) {
      schema_error("theta", e.what());
    }
    theta = std::move(tp);
  }
  return StagedTreeModel{std::move(tree), std::move(staging), std::move(theta)};
}

StagedTreeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
  return model_from_json(j);
}

void save_model(const StagedTreeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
}

}  // namespace stm
