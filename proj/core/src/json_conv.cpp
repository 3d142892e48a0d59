#include "json_conv.hpp"

#include "overlapcheck/error.hpp"

namespace overlapcheck::detail {

using nlohmann::json;

json featurizer_to_json(const FeaturizerConfig& c) {
  return json{{"ngram_min", c.ngram_min},
              {"ngram_max", c.ngram_max},
              {"num_buckets", c.num_buckets},
              {"weighting", to_string(c.weighting)},
              {"l2_normalize", c.l2_normalize},
              {"lowercase", c.lowercase}};
}

FeaturizerConfig featurizer_from_json(const json& j) {
  FeaturizerConfig c;
  try {
    if (j.contains("ngram_min")) c.ngram_min = j["ngram_min"].get<int>();
    if (j.contains("ngram_max")) c.ngram_max = j["ngram_max"].get<int>();
    if (j.contains("num_buckets")) c.num_buckets = j["num_buckets"].get<std::uint32_t>();
    if (j.contains("weighting")) c.weighting = weighting_from_string(j["weighting"].get<std::string>());
    if (j.contains("l2_normalize")) c.l2_normalize = j["l2_normalize"].get<bool>();
    if (j.contains("lowercase")) c.lowercase = j["lowercase"].get<bool>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("featurizer config: ") + e.what());
  }
  c.validate();
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"l2_lambda", c.l2_lambda},
              {"patience", c.patience},
              {"min_delta", c.min_delta},
              {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  try {
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<int>();
    if (j.contains("l2_lambda")) c.l2_lambda = j["l2_lambda"].get<double>();
    if (j.contains("patience")) c.patience = j["patience"].get<int>();
    if (j.contains("min_delta")) c.min_delta = j["min_delta"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

json selection_config_to_json(const SelectionConfig& c) {
  return json{{"n", c.n},
              {"min_confidence", c.min_confidence},
              {"balanced", c.balanced},
              {"rank_by", to_string(c.rank_by)},
              {"pseudo_weight", c.pseudo_weight}};
}

SelectionConfig selection_config_from_json(const json& j) {
  SelectionConfig c;
  try {
    if (j.contains("n")) c.n = j["n"].get<std::size_t>();
    if (j.contains("min_confidence")) c.min_confidence = j["min_confidence"].get<double>();
    if (j.contains("balanced")) c.balanced = j["balanced"].get<bool>();
    if (j.contains("rank_by")) c.rank_by = rank_by_from_string(j["rank_by"].get<std::string>());
    if (j.contains("pseudo_weight")) c.pseudo_weight = j["pseudo_weight"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("selection config: ") + e.what());
  }
  c.validate();
  return c;
}

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError("malformed JSON in " + what);
  }
  return j;
}

}  // namespace overlapcheck::detail
