#pragma once

#include <string>

#include "stm/model.hpp"

#include "json.hpp"

namespace stm {

// Model file schema:
//   {
//     "variables": [{"name": ..., "levels": [...]}, ...],
//     "staging":   [[stage ids per situation] per depth, vertex order],
//     "theta":     {"<stage id>": {"<label>": prob, ...}, ...}   (optional)
//   }
// Stage ids are canonicalized on load, so staging round-trips exactly;
// probabilities round-trip to full double precision.
nlohmann::json model_to_json(const StagedTreeModel& model);
StagedTreeModel model_from_json(const nlohmann::json& j);

StagedTreeModel load_model(const std::string& path);
void save_model(const StagedTreeModel& model, const std::string& path);

}  // namespace stm
