#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "overlapcheck/corpus.hpp"
#include "overlapcheck/features.hpp"

namespace overlapcheck {

// Logistic-regression model over hashed n-gram features. Weights are dense
// with length featurizer.num_buckets; probabilities come from a sigmoid.
struct LinearModel {
  FeaturizerConfig featurizer;
  std::vector<double> weights;
  double bias = 0.0;

  bool operator==(const LinearModel&) const = default;
};

LinearModel zero_model(const FeaturizerConfig& config);

struct TrainConfig {
  double learning_rate = 0.1;
  int batch_size = 64;
  int max_epochs = 100;
  double l2_lambda = 1e-5;
  int patience = 5;
  double min_delta = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int stopped_epoch = 0;
  bool converged = false;  // true when early stopping fired before max_epochs
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

// Numerically stable sigmoid, clamped into [1e-15, 1 - 1e-15] so callers
// always see a probability strictly inside (0, 1).
double sigmoid(double z);

// sigma(w . x + b).
double predict_prob(const LinearModel& model, const SparseVector& x);

struct TrainItem {
  SparseVector features;
  Label label = Label::negative;
  double weight = 1.0;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<SparseVector::Entry> grad_weights;  // sorted by index, nonzero terms
  double grad_bias = 0.0;
};

// Weighted binary cross-entropy plus l2_lambda * |w|^2, with the analytic
// gradient. loss = sum_i weight_i * bce_i / sum_i weight_i + l2 term; the
// bce is computed in log-sum-exp form so extreme logits stay finite.
LossGrad loss_and_gradient(const LinearModel& model, std::span<const TrainItem> batch,
                           double l2_lambda);

// A corpus featurized once, ready for repeated epochs. Labels are required.
struct FeaturizedSet {
  std::vector<SparseVector> x;
  std::vector<Label> y;
  std::vector<double> weight;

  std::size_t size() const { return x.size(); }
};

FeaturizedSet featurize_labeled(const Corpus& corpus, const FeaturizerConfig& config);

struct TrainResult {
  LinearModel model;
  TrainHistory history;
};

// Mini-batch gradient descent from zero init (or from `init` when given),
// with a seeded per-epoch shuffle and early stopping on validation loss.
// Returns the snapshot with the best validation loss.
TrainResult train(const Corpus& train_set, const Corpus& val_set, const TrainConfig& config,
                  const FeaturizerConfig& featurizer, const LinearModel* init = nullptr);

// Same loop over pre-featurized sets; train() wraps this.
TrainResult train_features(const FeaturizedSet& train_set, const FeaturizedSet& val_set,
                           const TrainConfig& config, const FeaturizerConfig& featurizer,
                           const LinearModel* init = nullptr);

// JSON model artifact: featurizer config, bias, and the nonzero weights as
// (index, value) pairs. Doubles round-trip exactly.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

void save_history(const TrainHistory& history, const std::filesystem::path& path);

}  // namespace overlapcheck
