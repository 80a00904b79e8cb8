#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "patrec/action.hpp"

namespace patrec {

/// Spec tree as {"kind", "params"?, "children"?}. Keys are emitted sorted
/// and doubles in shortest round-trip form, so equal specs dump to equal
/// text.
nlohmann::json to_json(const ActionSpec& spec);
ActionSpec action_spec_from_json(const nlohmann::json& j);

/// Model as {"spec", "trained_input_dim", "state"}. Derived quantities
/// (the Cholesky factors inside a map state) are rebuilt on load from the
/// stored covariances, which reproduces them bit for bit.
nlohmann::json to_json(const TrainedAction& action);
TrainedAction trained_action_from_json(const nlohmann::json& j);

void save_model(const TrainedAction& action, const std::filesystem::path& path);
TrainedAction load_model(const std::filesystem::path& path);

}  // namespace patrec
