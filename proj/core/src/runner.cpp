#include "overlapcheck/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "json_conv.hpp"
#include "overlapcheck/error.hpp"
#include "rng.hpp"

namespace overlapcheck {

using nlohmann::json;

void ExperimentConfig::validate() const {
  featurizer.validate();
  train.validate();
  if (retrain) retrain->validate();
  selection.validate();
  if (!(pseudo_weight > 0.0) || !(pseudo_weight <= 1.0)) {
    throw ValidationError("pseudo_weight must lie in (0, 1]");
  }
  if (!(val_fraction > 0.0) || !(val_fraction < 1.0)) {
    throw ValidationError("val_fraction must lie in (0, 1)");
  }
  if (num_seeds < 1) throw ValidationError("num_seeds must be >= 1");
}

namespace {

// Seeded two-way partition of [0, n): a shuffled prefix trains, the
// remaining floor(n * val_fraction) indices validate.
void split_train_val(std::size_t n, double val_fraction, std::uint64_t seed,
                     std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = detail::rng_for(seed, 17);
  detail::shuffle_vec(order, rng);

  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * val_fraction));
  if (n_val == 0 || n_val >= n) {
    throw ValidationError("val_fraction " + std::to_string(val_fraction) +
                          " leaves an empty train or validation slice for n=" +
                          std::to_string(n));
  }
  const std::size_t n_train = n - n_val;
  train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  val_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
}

FeaturizedSet subset(const FeaturizedSet& full, const std::vector<std::size_t>& idx) {
  FeaturizedSet out;
  out.x.reserve(idx.size());
  out.y.reserve(idx.size());
  out.weight.reserve(idx.size());
  for (std::size_t i : idx) {
    out.x.push_back(full.x[i]);
    out.y.push_back(full.y[i]);
    out.weight.push_back(full.weight[i]);
  }
  return out;
}

SelectionSummary summarize(const SelectionReport& report) {
  SelectionSummary s;
  s.pool_size = report.pool_size;
  s.agreement_size = report.agreement_size;
  s.selected_count = report.selected.size();
  s.shortfall = report.shortfall;
  s.per_class_counts[0] = report.per_class_counts[0];
  s.per_class_counts[1] = report.per_class_counts[1];
  s.confidence = report.confidence;
  return s;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return a;
}

Label truth_for(const TruthTable& truth, const std::string& id) {
  auto it = truth.find(id);
  if (it == truth.end()) {
    throw ValidationError("truth table has no entry for pool example \"" + id + "\"");
  }
  return it->second;
}

}  // namespace

std::pair<Corpus, Corpus> train_val_split(const Corpus& labeled, double val_fraction,
                                          std::uint64_t seed) {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  split_train_val(labeled.size(), val_fraction, seed, train_idx, val_idx);
  Corpus train_c;
  Corpus val_c;
  train_c.role = labeled.role;
  val_c.role = labeled.role;
  for (std::size_t i : train_idx) train_c.examples.push_back(labeled.examples[i]);
  for (std::size_t i : val_idx) val_c.examples.push_back(labeled.examples[i]);
  return {std::move(train_c), std::move(val_c)};
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Corpus& labeled,
                                const Corpus& pool, const Corpus& test,
                                const TruthTable* truth) {
  config.validate();
  labeled.validate();
  pool.validate();
  test.validate();
  if (labeled.empty()) throw ValidationError("labeled corpus is empty");
  if (test.empty()) throw ValidationError("test corpus is empty");

  // Featurization is seed-independent; do it once.
  const FeaturizedSet labeled_features = featurize_labeled(labeled, config.featurizer);
  std::vector<SparseVector> pool_features;
  pool_features.reserve(pool.size());
  for (const Example& ex : pool.examples) {
    pool_features.push_back(featurize(ex.text, config.featurizer));
  }
  std::vector<SparseVector> test_features;
  test_features.reserve(test.size());
  for (const Example& ex : test.examples) {
    test_features.push_back(featurize(ex.text, config.featurizer));
  }
  std::unordered_map<std::string, std::size_t> pool_index;
  pool_index.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool_index.emplace(pool.examples[i].id, i);
  }

  std::optional<double> pool_noise;
  if (truth != nullptr) {
    std::size_t flipped = 0;
    for (const Example& ex : pool.examples) {
      if (!ex.label) throw ValidationError("pool example \"" + ex.id + "\" has no label");
      if (*ex.label != truth_for(*truth, ex.id)) ++flipped;
    }
    pool_noise = pool.empty() ? 0.0
                              : static_cast<double>(flipped) / static_cast<double>(pool.size());
  }

  SelectionConfig selection_config = config.selection;
  selection_config.pseudo_weight = config.pseudo_weight;

  ExperimentReport report;
  for (int run = 0; run < config.num_seeds; ++run) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(run);

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    split_train_val(labeled.size(), config.val_fraction, seed, train_idx, val_idx);
    const FeaturizedSet train_set = subset(labeled_features, train_idx);
    const FeaturizedSet val_set = subset(labeled_features, val_idx);

    TrainConfig step1 = config.train;
    step1.seed = seed;
    const TrainResult baseline = train_features(train_set, val_set, step1, config.featurizer);

    const std::vector<PseudoLabeled> pool_pseudo =
        pseudo_label(baseline.model, pool, pool_features);
    const SelectionReport selection = select_from_pseudo(pool, pool_pseudo, selection_config);

    SeedResult seed_result;
    seed_result.seed = seed;
    seed_result.selection = summarize(selection);
    seed_result.empty_selection = selection.selected.empty();
    if (seed_result.empty_selection) {
      report.flags.push_back("empty_selection(seed=" + std::to_string(seed) + ")");
    }

    if (truth != nullptr) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool_pseudo[i].pseudo_label == truth_for(*truth, pool.examples[i].id)) ++correct;
      }
      seed_result.pool_accuracy =
          pool.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(pool.size());
      seed_result.pool_noise_rate = pool_noise;
      if (!selection.selected.empty()) {
        std::size_t noisy = 0;
        for (const Candidate& c : selection.selected) {
          if (*c.example.label != truth_for(*truth, c.example.id)) ++noisy;
        }
        seed_result.selected_noise_rate =
            static_cast<double>(noisy) / static_cast<double>(selection.selected.size());
      } else {
        seed_result.selected_noise_rate = 0.0;
      }
    }

    // Joint set: the labelled train slice plus the selected pseudo samples.
    FeaturizedSet joint = train_set;
    for (const Candidate& c : selection.selected) {
      joint.x.push_back(pool_features[pool_index.at(c.example.id)]);
      joint.y.push_back(*c.example.label);
      joint.weight.push_back(c.example.weight);
    }

    TrainConfig step3 = config.retrain.value_or(config.train);
    step3.seed = seed;
    const TrainResult augmented =
        train_features(joint, val_set, step3, config.featurizer,
                       config.fine_tune ? &baseline.model : nullptr);

    seed_result.baseline =
        evaluate(baseline.model, test, test_features).metrics;
    seed_result.augmented =
        evaluate(augmented.model, test, test_features).metrics;
    report.per_seed.push_back(std::move(seed_result));
  }

  std::vector<double> baseline_acc, baseline_f1, aug_acc, aug_f1, sel_count, sel_noise, pool_acc;
  for (const SeedResult& r : report.per_seed) {
    baseline_acc.push_back(r.baseline.accuracy);
    baseline_f1.push_back(r.baseline.f1);
    aug_acc.push_back(r.augmented.accuracy);
    aug_f1.push_back(r.augmented.f1);
    sel_count.push_back(static_cast<double>(r.selection.selected_count));
    if (r.selected_noise_rate) sel_noise.push_back(*r.selected_noise_rate);
    if (r.pool_accuracy) pool_acc.push_back(*r.pool_accuracy);
  }
  report.baseline_accuracy = aggregate(baseline_acc);
  report.baseline_f1 = aggregate(baseline_f1);
  report.augmented_accuracy = aggregate(aug_acc);
  report.augmented_f1 = aggregate(aug_f1);
  report.selected_count = aggregate(sel_count);
  if (!sel_noise.empty()) report.selected_noise_rate = aggregate(sel_noise);
  if (!pool_acc.empty()) report.pool_accuracy = aggregate(pool_acc);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Corpus labeled = load_jsonl(config.labeled_path, Role::labeled);
  const Corpus pool = load_jsonl(config.pool_path, Role::pool);
  const Corpus test = load_jsonl(config.test_path, Role::test);
  std::optional<TruthTable> truth;
  if (config.truth_path) {
    truth = load_truth(*config.truth_path);
  }
  return run_experiment(config, labeled, pool, test, truth ? &*truth : nullptr);
}

namespace {

json metrics_to_json(const Metrics& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"flags", m.flags()}};
}

json aggregate_to_json(const Aggregate& a) {
  return json{{"mean", a.mean}, {"stddev", a.stddev}};
}

json selection_summary_to_json(const SelectionSummary& s) {
  return json{{"pool_size", s.pool_size},
              {"agreement_size", s.agreement_size},
              {"selected_count", s.selected_count},
              {"shortfall", s.shortfall},
              {"per_class_counts", {{"0", s.per_class_counts[0]}, {"1", s.per_class_counts[1]}}},
              {"confidence",
               {{"min", s.confidence.min},
                {"mean", s.confidence.mean},
                {"max", s.confidence.max}}}};
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string experiment_report_json(const ExperimentReport& report,
                                   const ExperimentConfig& config) {
  json per_seed = json::array();
  for (const SeedResult& r : report.per_seed) {
    json row{{"seed", r.seed},
             {"baseline", metrics_to_json(r.baseline)},
             {"augmented", metrics_to_json(r.augmented)},
             {"selection", selection_summary_to_json(r.selection)},
             {"empty_selection", r.empty_selection}};
    if (r.selected_noise_rate) row["selected_noise_rate"] = *r.selected_noise_rate;
    if (r.pool_noise_rate) row["pool_noise_rate"] = *r.pool_noise_rate;
    if (r.pool_accuracy) row["pool_accuracy"] = *r.pool_accuracy;
    per_seed.push_back(std::move(row));
  }

  json aggregates{{"baseline_accuracy", aggregate_to_json(report.baseline_accuracy)},
                  {"baseline_f1", aggregate_to_json(report.baseline_f1)},
                  {"augmented_accuracy", aggregate_to_json(report.augmented_accuracy)},
                  {"augmented_f1", aggregate_to_json(report.augmented_f1)},
                  {"selected_count", aggregate_to_json(report.selected_count)},
                  {"accuracy_delta",
                   report.augmented_accuracy.mean - report.baseline_accuracy.mean}};
  if (report.selected_noise_rate) {
    aggregates["selected_noise_rate"] = aggregate_to_json(*report.selected_noise_rate);
  }
  if (report.pool_accuracy) {
    aggregates["pool_accuracy"] = aggregate_to_json(*report.pool_accuracy);
  }

  json config_echo{{"featurizer", detail::featurizer_to_json(config.featurizer)},
                   {"train", detail::train_config_to_json(config.train)},
                   {"selection", detail::selection_config_to_json(config.selection)},
                   {"pseudo_weight", config.pseudo_weight},
                   {"val_fraction", config.val_fraction},
                   {"num_seeds", config.num_seeds},
                   {"base_seed", config.base_seed},
                   {"fine_tune", config.fine_tune}};
  if (config.retrain) config_echo["retrain"] = detail::train_config_to_json(*config.retrain);

  json j{{"config", std::move(config_echo)},
         {"num_seeds", config.num_seeds},
         {"per_seed", std::move(per_seed)},
         {"aggregates", std::move(aggregates)},
         {"flags", report.flags}};
  return j.dump(2) + "\n";
}

std::string per_seed_csv(const ExperimentReport& report) {
  std::string out = "seed,baseline_acc,baseline_f1,aug_acc,aug_f1,selected_count,selected_noise_rate\n";
  for (const SeedResult& r : report.per_seed) {
    out += std::to_string(r.seed) + "," + format17(r.baseline.accuracy) + "," +
           format17(r.baseline.f1) + "," + format17(r.augmented.accuracy) + "," +
           format17(r.augmented.f1) + "," + std::to_string(r.selection.selected_count) + ",";
    if (r.selected_noise_rate) out += format17(*r.selected_noise_rate);
    out += "\n";
  }
  return out;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const json j = detail::parse_json(detail::read_file(path), "config file " + path.string());
  ExperimentConfig config;
  try {
    if (!j.contains("data") || !j["data"].is_object()) {
      throw ValidationError("experiment config needs a \"data\" object");
    }
    const json& data = j["data"];
    config.labeled_path = data.at("labeled").get<std::string>();
    config.pool_path = data.at("pool").get<std::string>();
    config.test_path = data.at("test").get<std::string>();
    if (data.contains("truth")) config.truth_path = data["truth"].get<std::string>();

    if (j.contains("featurizer")) config.featurizer = detail::featurizer_from_json(j["featurizer"]);
    if (j.contains("train")) config.train = detail::train_config_from_json(j["train"]);
    if (j.contains("retrain")) config.retrain = detail::train_config_from_json(j["retrain"]);
    if (j.contains("selection")) config.selection = detail::selection_config_from_json(j["selection"]);
    if (j.contains("pseudo_weight")) config.pseudo_weight = j["pseudo_weight"].get<double>();
    if (j.contains("val_fraction")) config.val_fraction = j["val_fraction"].get<double>();
    if (j.contains("num_seeds")) config.num_seeds = j["num_seeds"].get<int>();
    if (j.contains("base_seed")) config.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("fine_tune")) config.fine_tune = j["fine_tune"].get<bool>();
    if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  config.validate();
  return config;
}

}  // namespace overlapcheck
