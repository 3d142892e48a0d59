#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overlapcheck/error.hpp"
#include "overlapcheck/runner.hpp"
#include "overlapcheck/synthgen.hpp"
#include "test_util.hpp"

using namespace overlapcheck;
using namespace testutil;

namespace {

SynthConfig data_config() {
  SynthConfig c;
  c.vocab_size = 300;
  c.n_labeled = 200;
  c.n_pool = 600;
  c.n_test = 300;
  c.noise_rate = 0.25;
  c.seed = 33;
  return c;
}

ExperimentConfig fast_config() {
  ExperimentConfig c;
  c.featurizer.ngram_max = 1;
  c.featurizer.num_buckets = 1u << 12;
  c.train.learning_rate = 0.5;
  c.train.max_epochs = 40;
  c.train.patience = 40;
  c.train.seed = 0;
  c.selection.n = 100;
  c.pseudo_weight = 1.0;
  c.val_fraction = 0.2;
  c.num_seeds = 3;
  c.base_seed = 7;
  return c;
}

Corpus tiny_labeled(int n) {
  Corpus c;
  c.role = Role::labeled;
  for (int i = 0; i < n; ++i) {
    Example ex;
    ex.id = "l" + std::to_string(i);
    ex.text = "tok" + std::to_string(i % 7);
    ex.label = i % 2 == 0 ? Label::positive : Label::negative;
    ex.source = Source::manual;
    c.examples.push_back(std::move(ex));
  }
  return c;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("experiment config validation") {
  ExperimentConfig c = fast_config();
  CHECK_NOTHROW(c.validate());
  c.pseudo_weight = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.pseudo_weight = 1.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.val_fraction = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.val_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.num_seeds = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.train.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.selection.n = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = fast_config();
  c.retrain = c.train;
  c.retrain->batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("train_val_split is a deterministic partition with floor sizing") {
  const Corpus labeled = tiny_labeled(23);
  const auto [train_set, val_set] = train_val_split(labeled, 0.2, 42);
  CHECK(val_set.size() == 4);  // floor(23 * 0.2)
  CHECK(train_set.size() == 19);
  CHECK(train_set.role == Role::labeled);
  CHECK(val_set.role == Role::labeled);

  std::set<std::string> seen;
  for (const Example& ex : train_set.examples) CHECK(seen.insert(ex.id).second);
  for (const Example& ex : val_set.examples) CHECK(seen.insert(ex.id).second);
  CHECK(seen.size() == 23);

  const auto [t2, v2] = train_val_split(labeled, 0.2, 42);
  CHECK(t2 == train_set);
  CHECK(v2 == val_set);

  const auto [t3, v3] = train_val_split(labeled, 0.2, 43);
  CHECK(t3 != train_set);  // different shuffle

  // The split actually shuffles rather than slicing in order.
  std::vector<std::string> train_ids;
  for (const Example& ex : train_set.examples) train_ids.push_back(ex.id);
  std::vector<std::string> head_ids;
  for (int i = 0; i < 19; ++i) head_ids.push_back("l" + std::to_string(i));
  CHECK(train_ids != head_ids);
}

TEST_CASE("train_val_split rejects degenerate slices") {
  CHECK_THROWS_AS(train_val_split(tiny_labeled(3), 0.2, 1), ValidationError);  // empty val
  CHECK_THROWS_AS(train_val_split(tiny_labeled(4), 1.0, 1), ValidationError);  // empty train
  CHECK_NOTHROW(train_val_split(tiny_labeled(5), 0.2, 1));
}

TEST_CASE("experiment produces per-seed rows, aggregates, and truth diagnostics") {
  const SynthData data = generate(data_config());
  const ExperimentConfig cfg = fast_config();
  const ExperimentReport r =
      run_experiment(cfg, data.labeled, data.pool, data.test, &data.pool_truth);

  REQUIRE(r.per_seed.size() == 3);
  std::vector<double> base_acc, base_f1, aug_acc, aug_f1, sel_count, sel_noise, pool_acc;
  for (int i = 0; i < 3; ++i) {
    const SeedResult& s = r.per_seed[static_cast<std::size_t>(i)];
    CHECK(s.seed == cfg.base_seed + static_cast<std::uint64_t>(i));
    CHECK(s.selection.pool_size == 600);
    CHECK(s.selection.selected_count <= cfg.selection.n);
    CHECK(s.selection.agreement_size <= s.selection.pool_size);
    CHECK(s.selection.selected_count <= s.selection.agreement_size);
    REQUIRE(s.selected_noise_rate.has_value());
    REQUIRE(s.pool_noise_rate.has_value());
    REQUIRE(s.pool_accuracy.has_value());
    CHECK(*s.pool_noise_rate == doctest::Approx(0.25).epsilon(0.25));
    base_acc.push_back(s.baseline.accuracy);
    base_f1.push_back(s.baseline.f1);
    aug_acc.push_back(s.augmented.accuracy);
    aug_f1.push_back(s.augmented.f1);
    sel_count.push_back(static_cast<double>(s.selection.selected_count));
    sel_noise.push_back(*s.selected_noise_rate);
    pool_acc.push_back(*s.pool_accuracy);
  }

  // Aggregates match an independent recomputation.
  CHECK(r.baseline_accuracy.mean == doctest::Approx(mean_of(base_acc)).epsilon(1e-12));
  CHECK(r.baseline_accuracy.stddev == doctest::Approx(stddev_of(base_acc)).epsilon(1e-12));
  CHECK(r.baseline_f1.mean == doctest::Approx(mean_of(base_f1)).epsilon(1e-12));
  CHECK(r.augmented_accuracy.mean == doctest::Approx(mean_of(aug_acc)).epsilon(1e-12));
  CHECK(r.augmented_f1.stddev == doctest::Approx(stddev_of(aug_f1)).epsilon(1e-12));
  CHECK(r.selected_count.mean == doctest::Approx(mean_of(sel_count)).epsilon(1e-12));
  REQUIRE(r.selected_noise_rate.has_value());
  CHECK(r.selected_noise_rate->mean == doctest::Approx(mean_of(sel_noise)).epsilon(1e-12));
  REQUIRE(r.pool_accuracy.has_value());
  CHECK(r.pool_accuracy->mean == doctest::Approx(mean_of(pool_acc)).epsilon(1e-12));
}

TEST_CASE("experiment runs without a truth table and leaves diagnostics absent") {
  const SynthData data = generate(data_config());
  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 1;
  const ExperimentReport r = run_experiment(cfg, data.labeled, data.pool, data.test, nullptr);
  REQUIRE(r.per_seed.size() == 1);
  CHECK_FALSE(r.per_seed[0].selected_noise_rate.has_value());
  CHECK_FALSE(r.per_seed[0].pool_accuracy.has_value());
  CHECK_FALSE(r.selected_noise_rate.has_value());
  CHECK_FALSE(r.pool_accuracy.has_value());

  // The CSV leaves the noise column empty.
  const std::string csv = per_seed_csv(r);
  CHECK(csv.find("selected_noise_rate") != std::string::npos);
  const auto line_start = csv.find('\n') + 1;
  const auto line = csv.substr(line_start, csv.find('\n', line_start) - line_start);
  CHECK(line.back() == ',');
}

TEST_CASE("an impossible selection bar yields the empty-selection fallback") {
  const SynthData data = generate(data_config());
  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 2;
  cfg.selection.min_confidence = 0.9999999;
  const ExperimentReport r =
      run_experiment(cfg, data.labeled, data.pool, data.test, &data.pool_truth);
  REQUIRE(r.per_seed.size() == 2);
  for (const SeedResult& s : r.per_seed) {
    CHECK(s.empty_selection);
    CHECK(s.selection.selected_count == 0);
    // With nothing selected the augmented model is the baseline retrained on
    // the same data, so the metrics coincide exactly.
    CHECK(s.augmented == s.baseline);
    CHECK(*s.selected_noise_rate == 0.0);
  }
  REQUIRE_FALSE(r.flags.empty());
  CHECK(r.flags[0].find("empty_selection") != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(experiment_report_json(r, cfg));
  CHECK(j["flags"].size() == 2);
}

TEST_CASE("experiment report json echoes the config and is byte-deterministic") {
  const SynthData data = generate(data_config());
  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 2;
  const ExperimentReport a =
      run_experiment(cfg, data.labeled, data.pool, data.test, &data.pool_truth);
  const ExperimentReport b =
      run_experiment(cfg, data.labeled, data.pool, data.test, &data.pool_truth);
  const std::string ja = experiment_report_json(a, cfg);
  CHECK(ja == experiment_report_json(b, cfg));
  CHECK(per_seed_csv(a) == per_seed_csv(b));

  const nlohmann::json j = nlohmann::json::parse(ja);
  CHECK(j["config"]["num_seeds"] == 2);
  CHECK(j["config"]["base_seed"] == 7);
  CHECK(j["config"]["pseudo_weight"] == 1.0);
  CHECK(j["config"]["featurizer"]["num_buckets"] == 4096);
  CHECK(j["config"]["selection"]["n"] == 100);
  CHECK(j["per_seed"].size() == 2);
  CHECK(j["per_seed"][0]["seed"] == 7);
  REQUIRE(j["aggregates"].contains("accuracy_delta"));
  const double delta = j["aggregates"]["accuracy_delta"].get<double>();
  CHECK(delta == doctest::Approx(j["aggregates"]["augmented_accuracy"]["mean"].get<double>() -
                                 j["aggregates"]["baseline_accuracy"]["mean"].get<double>())
                     .epsilon(1e-9));
}

TEST_CASE("csv rows agree with the report rows") {
  const SynthData data = generate(data_config());
  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 2;
  const ExperimentReport r =
      run_experiment(cfg, data.labeled, data.pool, data.test, &data.pool_truth);
  const std::string csv = per_seed_csv(r);

  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "seed,baseline_acc,baseline_f1,aug_acc,aug_f1,selected_count,selected_noise_rate");
  for (std::size_t i = 0; i < 2; ++i) {
    const SeedResult& s = r.per_seed[i];
    std::vector<std::string> cells;
    std::size_t c = 0;
    const std::string& line = lines[i + 1];
    while (true) {
      const std::size_t comma = line.find(',', c);
      cells.push_back(line.substr(c, comma - c));
      if (comma == std::string::npos) break;
      c = comma + 1;
    }
    REQUIRE(cells.size() == 7);
    CHECK(std::stoull(cells[0]) == s.seed);
    CHECK(std::stod(cells[1]) == doctest::Approx(s.baseline.accuracy).epsilon(1e-9));
    CHECK(std::stod(cells[2]) == doctest::Approx(s.baseline.f1).epsilon(1e-9));
    CHECK(std::stod(cells[3]) == doctest::Approx(s.augmented.accuracy).epsilon(1e-9));
    CHECK(std::stod(cells[4]) == doctest::Approx(s.augmented.f1).epsilon(1e-9));
    CHECK(std::stoull(cells[5]) == s.selection.selected_count);
    CHECK(std::stod(cells[6]) == doctest::Approx(*s.selected_noise_rate).epsilon(1e-9));
  }
}

TEST_CASE("the experiment equals the same steps composed by hand") {
  const SynthData data = generate(data_config());
  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 1;
  cfg.base_seed = 13;
  const ExperimentReport r = run_experiment(cfg, data.labeled, data.pool, data.test, nullptr);
  REQUIRE(r.per_seed.size() == 1);

  // Step 1: baseline on a seeded split.
  const std::uint64_t seed = 13;
  auto [train_set, val_set] = train_val_split(data.labeled, cfg.val_fraction, seed);
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const TrainResult baseline = train(train_set, val_set, tc, cfg.featurizer);
  const EvalResult base_eval = evaluate(baseline.model, data.test);
  CHECK(base_eval.metrics == r.per_seed[0].baseline);

  // Step 2: overlap selection.
  SelectionConfig sc = cfg.selection;
  sc.pseudo_weight = cfg.pseudo_weight;
  const SelectionReport sel = overlap_select(baseline.model, data.pool, sc);
  CHECK(sel.selected.size() == r.per_seed[0].selection.selected_count);
  CHECK(sel.agreement_size == r.per_seed[0].selection.agreement_size);

  // Step 3: joint retraining on train slice + selected pseudo examples.
  Corpus joint = train_set;
  joint.role = Role::mixed;
  for (const Example& ex : selected_corpus(sel).examples) joint.examples.push_back(ex);
  const TrainResult aug = train(joint, val_set, tc, cfg.featurizer);
  const EvalResult aug_eval = evaluate(aug.model, data.test);
  CHECK(aug_eval.metrics == r.per_seed[0].augmented);
}

TEST_CASE("fine_tune starts retraining from the baseline weights") {
  const SynthData data = generate(data_config());
  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 1;
  ExperimentConfig ft = cfg;
  ft.fine_tune = true;
  // One retrain epoch at a negligible learning rate: the cold model stays
  // near zero (chance-level) while the warm one keeps the baseline weights.
  cfg.retrain = cfg.train;
  cfg.retrain->max_epochs = 1;
  cfg.retrain->learning_rate = 1e-9;
  ft.retrain = cfg.retrain;
  const ExperimentReport cold = run_experiment(cfg, data.labeled, data.pool, data.test, nullptr);
  const ExperimentReport warm = run_experiment(ft, data.labeled, data.pool, data.test, nullptr);
  CHECK(warm.per_seed[0].augmented.accuracy > cold.per_seed[0].augmented.accuracy + 0.1);
  CHECK(warm.per_seed[0].augmented.accuracy >= warm.per_seed[0].baseline.accuracy - 0.02);
}

TEST_CASE("run_experiment loads corpora and truth from disk") {
  TempDir dir;
  SynthConfig sc = data_config();
  sc.n_pool = 300;
  const SynthData data = generate(sc);
  save_jsonl(data.labeled, dir / "labeled.jsonl");
  save_jsonl(data.pool, dir / "pool.jsonl");
  save_jsonl(data.test, dir / "test.jsonl");
  save_truth(data.pool_truth, dir / "truth.json");

  ExperimentConfig cfg = fast_config();
  cfg.num_seeds = 1;
  cfg.labeled_path = dir / "labeled.jsonl";
  cfg.pool_path = dir / "pool.jsonl";
  cfg.test_path = dir / "test.jsonl";
  cfg.truth_path = dir / "truth.json";
  const ExperimentReport from_disk = run_experiment(cfg);
  const ExperimentReport in_memory =
      run_experiment(cfg, data.labeled, data.pool, data.test, &data.pool_truth);
  CHECK(experiment_report_json(from_disk, cfg) == experiment_report_json(in_memory, cfg));

  cfg.truth_path.reset();
  const ExperimentReport no_truth = run_experiment(cfg);
  CHECK_FALSE(no_truth.selected_noise_rate.has_value());

  cfg.labeled_path = dir / "missing.jsonl";
  CHECK_THROWS_AS(run_experiment(cfg), IoError);
}

TEST_CASE("load_experiment_config reads the full schema") {
  TempDir dir;
  const std::string text = R"({
    "data": {
      "labeled": "data/labeled.jsonl",
      "pool": "data/pool.jsonl",
      "test": "data/test.jsonl",
      "truth": "data/truth.json"
    },
    "featurizer": {"ngram_max": 2, "num_buckets": 262144,
                   "weighting": "log_tf", "l2_normalize": true, "lowercase": true},
    "train": {"learning_rate": 0.5, "batch_size": 64, "max_epochs": 300,
              "l2_lambda": 1e-5, "patience": 10, "min_delta": 1e-4, "seed": 0},
    "selection": {"n": 2000, "min_confidence": 0.5, "balanced": false,
                  "rank_by": "confidence", "pseudo_weight": 1.0},
    "pseudo_weight": 0.75,
    "val_fraction": 0.25,
    "num_seeds": 4,
    "base_seed": 9,
    "fine_tune": true,
    "output_dir": "out"
  })";
  const auto path = dir / "experiment.json";
  spit(path, text);
  const ExperimentConfig c = load_experiment_config(path);
  CHECK(c.labeled_path == "data/labeled.jsonl");
  CHECK(c.truth_path.has_value());
  CHECK(c.featurizer.ngram_max == 2);
  CHECK(c.featurizer.num_buckets == 262144);
  CHECK(c.train.max_epochs == 300);
  CHECK(c.selection.n == 2000);
  CHECK(c.pseudo_weight == 0.75);
  CHECK(c.val_fraction == 0.25);
  CHECK(c.num_seeds == 4);
  CHECK(c.base_seed == 9);
  CHECK(c.fine_tune);
  CHECK(c.output_dir == "out");
  CHECK_FALSE(c.retrain.has_value());

  spit(path, "{\"data\": {\"labeled\": \"x\"}}");
  CHECK_THROWS_AS(load_experiment_config(path), ValidationError);  // missing pool/test
  spit(path, "{oops");
  CHECK_THROWS_WITH_AS(load_experiment_config(path), doctest::Contains("experiment.json"),
                       ValidationError);
  CHECK_THROWS_AS(load_experiment_config(dir / "nope.json"), IoError);
}
