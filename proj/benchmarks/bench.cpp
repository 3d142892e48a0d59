#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "overlapcheck/classifier.hpp"
#include "overlapcheck/corpus.hpp"
#include "overlapcheck/features.hpp"
#include "overlapcheck/selection.hpp"
#include "overlapcheck/synthgen.hpp"

using namespace overlapcheck;

namespace {

const SynthData& corpus_fixture() {
  static const SynthData data = [] {
    SynthConfig c;
    c.vocab_size = 1000;
    c.n_labeled = 500;
    c.n_pool = 20000;
    c.n_test = 0;
    c.seed = 42;
    return generate(c);
  }();
  return data;
}

FeaturizerConfig default_featurizer() { return FeaturizerConfig{}; }

const LinearModel& model_fixture() {
  static const LinearModel model = [] {
    const SynthData& data = corpus_fixture();
    Corpus train_c = data.labeled;
    train_c.examples.resize(400);
    Corpus val_c = data.labeled;
    val_c.examples.erase(val_c.examples.begin(), val_c.examples.begin() + 400);
    TrainConfig tc;
    tc.learning_rate = 0.5;
    tc.max_epochs = 20;
    tc.patience = 20;
    tc.seed = 1;
    return train(train_c, val_c, tc, default_featurizer()).model;
  }();
  return model;
}

std::string sample_text() {
  std::string text;
  const Corpus& labeled = corpus_fixture().labeled;
  for (int i = 0; i < 4; ++i) text += labeled.examples[static_cast<std::size_t>(i)].text + " ";
  return text;  // a few hundred tokens
}

}  // namespace

static void BM_fnv1a64(benchmark::State& state) {
  const std::string text = sample_text();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fnv1a64(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_fnv1a64);

static void BM_tokenize(benchmark::State& state) {
  const std::string text = sample_text();
  const FeaturizerConfig fc = default_featurizer();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenize(text, fc));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_tokenize);

static void BM_featurize(benchmark::State& state) {
  const std::string text = sample_text();
  FeaturizerConfig fc = default_featurizer();
  fc.ngram_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(featurize(text, fc));
  }
}
BENCHMARK(BM_featurize)->Arg(1)->Arg(2)->Arg(3);

static void BM_predict_prob(benchmark::State& state) {
  const LinearModel& model = model_fixture();
  const SparseVector x = featurize(sample_text(), model.featurizer);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_prob(model, x));
  }
}
BENCHMARK(BM_predict_prob);

static void BM_train_epoch(benchmark::State& state) {
  const SynthData& data = corpus_fixture();
  const FeaturizerConfig fc = default_featurizer();
  Corpus train_c = data.labeled;
  train_c.examples.resize(400);
  Corpus val_c = data.labeled;
  val_c.examples.erase(val_c.examples.begin(), val_c.examples.begin() + 400);
  const FeaturizedSet train_set = featurize_labeled(train_c, fc);
  const FeaturizedSet val_set = featurize_labeled(val_c, fc);
  TrainConfig tc;
  tc.learning_rate = 0.5;
  tc.max_epochs = 1;
  tc.patience = 1;
  tc.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_features(train_set, val_set, tc, fc));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(train_set.size()));
}
BENCHMARK(BM_train_epoch)->Unit(benchmark::kMillisecond);

static void BM_pseudo_label(benchmark::State& state) {
  const SynthData& data = corpus_fixture();
  const LinearModel& model = model_fixture();
  Corpus pool = data.pool;
  pool.examples.resize(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pseudo_label(model, pool));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_pseudo_label)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_overlap_select(benchmark::State& state) {
  const SynthData& data = corpus_fixture();
  const LinearModel& model = model_fixture();
  Corpus pool = data.pool;
  pool.examples.resize(static_cast<std::size_t>(state.range(0)));
  SelectionConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(0)) / 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(overlap_select(model, pool, cfg));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_overlap_select)->Arg(1000)->Arg(10000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
