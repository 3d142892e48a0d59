#include "overlapcheck/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "io_util.hpp"
#include "json_conv.hpp"
#include "overlapcheck/error.hpp"
#include "rng.hpp"

namespace overlapcheck {

namespace {

constexpr double kProbClamp = 1e-15;

// log(1 + e^t) without overflow.
double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double weighted_bce(std::span<const SparseVector> x, std::span<const Label> y,
                    std::span<const double> w, const std::vector<double>& weights,
                    double bias) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = x[i].dot(weights) + bias;
    const double bce =
        y[i] == Label::positive ? softplus(-z) : softplus(z);
    num += w[i] * bce;
    den += w[i];
  }
  return num / den;
}

}  // namespace

LinearModel zero_model(const FeaturizerConfig& config) {
  config.validate();
  LinearModel m;
  m.featurizer = config;
  m.weights.assign(config.num_buckets, 0.0);
  m.bias = 0.0;
  return m;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (!(l2_lambda >= 0.0)) throw ValidationError("l2_lambda must be >= 0");
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (!(min_delta >= 0.0)) throw ValidationError("min_delta must be >= 0");
}

double sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double predict_prob(const LinearModel& model, const SparseVector& x) {
  return sigmoid(x.dot(model.weights) + model.bias);
}

LossGrad loss_and_gradient(const LinearModel& model, std::span<const TrainItem> batch,
                           double l2_lambda) {
  if (batch.empty()) throw ValidationError("loss_and_gradient: empty batch");

  double weight_sum = 0.0;
  for (const TrainItem& item : batch) weight_sum += item.weight;
  if (!(weight_sum > 0.0)) throw ValidationError("loss_and_gradient: batch weights sum to zero");

  double loss_num = 0.0;
  double grad_bias = 0.0;
  std::map<std::uint32_t, double> grad;
  for (const TrainItem& item : batch) {
    const double z = item.features.dot(model.weights) + model.bias;
    const double y = item.label == Label::positive ? 1.0 : 0.0;
    loss_num += item.weight * (y > 0.5 ? softplus(-z) : softplus(z));
    const double coef = item.weight * (sigmoid(z) - y) / weight_sum;
    grad_bias += coef;
    for (const SparseVector::Entry& e : item.features.entries) {
      grad[e.index] += coef * e.value;
    }
  }

  double l2_term = 0.0;
  if (l2_lambda > 0.0) {
    for (std::uint32_t j = 0; j < model.weights.size(); ++j) {
      const double wj = model.weights[j];
      if (wj != 0.0) {
        l2_term += wj * wj;
        grad[j] += 2.0 * l2_lambda * wj;
      }
    }
  }

  LossGrad out;
  out.loss = loss_num / weight_sum + l2_lambda * l2_term;
  out.grad_bias = grad_bias;
  out.grad_weights.reserve(grad.size());
  for (const auto& [index, value] : grad) {
    if (value != 0.0) out.grad_weights.push_back({index, value});
  }
  return out;
}

FeaturizedSet featurize_labeled(const Corpus& corpus, const FeaturizerConfig& config) {
  FeaturizedSet set;
  set.x.reserve(corpus.size());
  set.y.reserve(corpus.size());
  set.weight.reserve(corpus.size());
  for (const Example& ex : corpus.examples) {
    if (!ex.label) {
      throw ValidationError("unlabelled example \"" + ex.id + "\" in training data");
    }
    set.x.push_back(featurize(ex.text, config));
    set.y.push_back(*ex.label);
    set.weight.push_back(ex.weight);
  }
  return set;
}

TrainResult train_features(const FeaturizedSet& train_set, const FeaturizedSet& val_set,
                           const TrainConfig& config, const FeaturizerConfig& featurizer,
                           const LinearModel* init) {
  config.validate();
  featurizer.validate();
  if (val_set.size() == 0) throw ValidationError("validation set is empty");

  const double train_weight_total =
      std::accumulate(train_set.weight.begin(), train_set.weight.end(), 0.0);
  if (!(train_weight_total > 0.0)) throw ValidationError("train set weights sum to zero");
  const double val_weight_total =
      std::accumulate(val_set.weight.begin(), val_set.weight.end(), 0.0);
  if (!(val_weight_total > 0.0)) throw ValidationError("validation set weights sum to zero");

  std::vector<double> weights(featurizer.num_buckets, 0.0);
  double bias = 0.0;
  if (init != nullptr) {
    if (init->featurizer != featurizer || init->weights.size() != featurizer.num_buckets) {
      throw ValidationError("init model featurizer does not match");
    }
    weights = init->weights;
    bias = init->bias;
  }

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  TrainHistory history;
  history.best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<double> best_weights = weights;
  double best_bias = bias;
  int wait = 0;

  std::map<std::uint32_t, double> grad;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto rng = detail::rng_for(config.seed, static_cast<std::uint64_t>(epoch));
    detail::shuffle_vec(order, rng);

    double epoch_loss_num = 0.0;
    double epoch_weight = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t end = std::min(start + batch_size, n);

      grad.clear();
      double grad_bias = 0.0;
      double batch_weight = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        batch_weight += train_set.weight[order[k]];
      }
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const double w = train_set.weight[i];
        const double z = train_set.x[i].dot(weights) + bias;
        const double y = train_set.y[i] == Label::positive ? 1.0 : 0.0;
        epoch_loss_num += w * (y > 0.5 ? softplus(-z) : softplus(z));
        if (batch_weight > 0.0) {
          const double coef = w * (sigmoid(z) - y) / batch_weight;
          grad_bias += coef;
          for (const SparseVector::Entry& e : train_set.x[i].entries) {
            grad[e.index] += coef * e.value;
          }
        }
      }
      epoch_weight += batch_weight;
      if (batch_weight <= 0.0) continue;

      if (config.l2_lambda > 0.0) {
        const double decay = 1.0 - 2.0 * config.learning_rate * config.l2_lambda;
        for (double& wj : weights) wj *= decay;
      }
      for (const auto& [index, g] : grad) {
        weights[index] -= config.learning_rate * g;
      }
      bias -= config.learning_rate * grad_bias;
    }

    const double train_loss = epoch_loss_num / epoch_weight;
    const double val_loss =
        weighted_bce(val_set.x, val_set.y, val_set.weight, weights, bias);
    std::size_t val_correct = 0;
    for (std::size_t i = 0; i < val_set.size(); ++i) {
      const double p = sigmoid(val_set.x[i].dot(weights) + bias);
      const Label pred = p >= 0.5 ? Label::positive : Label::negative;
      if (pred == val_set.y[i]) ++val_correct;
    }
    const double val_accuracy = static_cast<double>(val_correct) / static_cast<double>(val_set.size());

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch));
    }
    history.epochs.push_back({epoch, train_loss, val_loss, val_accuracy});

    const bool improved_by_delta = val_loss < history.best_val_loss - config.min_delta;
    if (val_loss < history.best_val_loss) {
      history.best_val_loss = val_loss;
      history.best_epoch = epoch;
      best_weights = weights;
      best_bias = bias;
    }
    if (improved_by_delta) {
      wait = 0;
    } else {
      ++wait;
      if (wait >= config.patience) {
        history.stopped_epoch = epoch;
        history.converged = true;
        break;
      }
    }
    history.stopped_epoch = epoch;
  }

  TrainResult result;
  result.model.featurizer = featurizer;
  result.model.weights = std::move(best_weights);
  result.model.bias = best_bias;
  result.history = std::move(history);
  return result;
}

TrainResult train(const Corpus& train_set, const Corpus& val_set, const TrainConfig& config,
                  const FeaturizerConfig& featurizer, const LinearModel* init) {
  featurizer.validate();
  const FeaturizedSet ftrain = featurize_labeled(train_set, featurizer);
  const FeaturizedSet fval = featurize_labeled(val_set, featurizer);
  return train_features(ftrain, fval, config, featurizer, init);
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "overlapcheck.model.v1";
  j["featurizer"] = detail::featurizer_to_json(model.featurizer);
  j["bias"] = model.bias;
  nlohmann::json w = nlohmann::json::array();
  for (std::uint32_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) {
      w.push_back(nlohmann::json::array({i, model.weights[i]}));
    }
  }
  j["weights"] = std::move(w);
  detail::atomic_write_file(path, j.dump() + "\n");
}

LinearModel load_model(const std::filesystem::path& path) {
  const nlohmann::json j =
      detail::parse_json(detail::read_file(path), "model file " + path.string());
  try {
    if (!j.contains("format") || j["format"] != "overlapcheck.model.v1") {
      throw ValidationError("not an overlapcheck model file: " + path.string());
    }
    LinearModel model = zero_model(detail::featurizer_from_json(j.at("featurizer")));
    model.bias = j.at("bias").get<double>();
    for (const auto& pair : j.at("weights")) {
      const auto index = pair.at(0).get<std::uint32_t>();
      const auto value = pair.at(1).get<double>();
      if (index >= model.weights.size()) {
        throw ValidationError("weight index out of range in " + path.string());
      }
      if (!std::isfinite(value)) {
        throw ValidationError("non-finite weight in " + path.string());
      }
      model.weights[index] = value;
    }
    if (!std::isfinite(model.bias)) {
      throw ValidationError("non-finite bias in " + path.string());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model file " + path.string() + ": " + e.what());
  }
}

void save_history(const TrainHistory& history, const std::filesystem::path& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (const EpochRecord& r : history.epochs) {
    rows.push_back({{"epoch", r.epoch},
                    {"train_loss", r.train_loss},
                    {"val_loss", r.val_loss},
                    {"val_accuracy", r.val_accuracy}});
  }
  nlohmann::json j{{"epochs", std::move(rows)},
                   {"stopped_epoch", history.stopped_epoch},
                   {"converged", history.converged},
                   {"best_epoch", history.best_epoch},
                   {"best_val_loss", history.best_val_loss}};
  detail::atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace overlapcheck
