#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "overlapcheck/classifier.hpp"
#include "overlapcheck/corpus.hpp"
#include "overlapcheck/evaluation.hpp"
#include "overlapcheck/selection.hpp"
#include "overlapcheck/synthgen.hpp"

namespace overlapcheck {

// The three-step experiment: train a baseline on the labelled data, select
// pseudo-labelled pool samples whose model verdict agrees with their distant
// label, then retrain jointly and compare against the baseline.
struct ExperimentConfig {
  std::filesystem::path labeled_path;
  std::filesystem::path pool_path;
  std::filesystem::path test_path;
  std::optional<std::filesystem::path> truth_path;

  FeaturizerConfig featurizer;
  TrainConfig train;                   // step 1
  std::optional<TrainConfig> retrain;  // step 3 override; defaults to `train`
  SelectionConfig selection;

  double pseudo_weight = 1.0;  // loss weight for selected samples in (0, 1]
  double val_fraction = 0.2;   // labelled slice held out for early stopping
  int num_seeds = 1;
  std::uint64_t base_seed = 1;  // run i uses seed base_seed + i
  bool fine_tune = false;       // start step 3 from the baseline weights

  std::filesystem::path output_dir;

  void validate() const;
};

struct SelectionSummary {
  std::size_t pool_size = 0;
  std::size_t agreement_size = 0;
  std::size_t selected_count = 0;
  std::size_t shortfall = 0;
  std::size_t per_class_counts[2] = {0, 0};
  ConfidenceStats confidence;
};

struct SeedResult {
  std::uint64_t seed = 0;
  Metrics baseline;
  Metrics augmented;
  SelectionSummary selection;
  // Present when a truth side table was supplied.
  std::optional<double> selected_noise_rate;  // selected distant != true
  std::optional<double> pool_noise_rate;      // pool distant != true
  std::optional<double> pool_accuracy;        // step-1 pseudo-label == true
  bool empty_selection = false;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample stddev; 0 when fewer than 2 seeds
};

struct ExperimentReport {
  std::vector<SeedResult> per_seed;
  Aggregate baseline_accuracy;
  Aggregate baseline_f1;
  Aggregate augmented_accuracy;
  Aggregate augmented_f1;
  Aggregate selected_count;
  std::optional<Aggregate> selected_noise_rate;
  std::optional<Aggregate> pool_accuracy;
  std::vector<std::string> flags;
};

// Seeded two-way split used before each training step: floor(n * val_fraction)
// examples validate, the rest train. The same call with the same seed is what
// `experiment` performs internally, so chained CLI runs can reproduce it.
std::pair<Corpus, Corpus> train_val_split(const Corpus& labeled, double val_fraction,
                                          std::uint64_t seed);

// In-memory variant; corpora are shared across seeds and featurized once.
ExperimentReport run_experiment(const ExperimentConfig& config, const Corpus& labeled,
                                const Corpus& pool, const Corpus& test,
                                const TruthTable* truth);

// Loads the corpora (and optional truth table) from the configured paths.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string experiment_report_json(const ExperimentReport& report,
                                   const ExperimentConfig& config);

// seed,baseline_acc,baseline_f1,aug_acc,aug_f1,selected_count,selected_noise_rate
std::string per_seed_csv(const ExperimentReport& report);

// Reads the JSON experiment config; relative data paths resolve against the
// current working directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace overlapcheck
