#pragma once

// Internal JSON conversions shared by model/config/report serialization.
// Kept out of public headers so the installed API stays STL-only.

#include <nlohmann/json.hpp>

#include "overlapcheck/classifier.hpp"
#include "overlapcheck/features.hpp"
#include "overlapcheck/selection.hpp"

namespace overlapcheck::detail {

nlohmann::json featurizer_to_json(const FeaturizerConfig& c);
FeaturizerConfig featurizer_from_json(const nlohmann::json& j);

nlohmann::json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json selection_config_to_json(const SelectionConfig& c);
SelectionConfig selection_config_from_json(const nlohmann::json& j);

// Parses text as JSON; wraps parse failures in ParseError mentioning `what`.
nlohmann::json parse_json(const std::string& text, const std::string& what);

}  // namespace overlapcheck::detail
