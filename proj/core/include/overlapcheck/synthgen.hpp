#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "overlapcheck/corpus.hpp"

namespace overlapcheck {

// Two-class unigram-mixture corpus generator. A fraction class_signal of the
// vocabulary is class-indicative (half per class) and upweighted by
// signal_strength inside its own class, so the Bayes-optimal classifier is
// log-linear in token counts. Pool labels are true labels flipped with
// probability noise_rate.
struct SynthConfig {
  int vocab_size = 1000;
  double class_signal = 0.2;
  double signal_strength = 3.0;
  int doc_len_mean = 40;
  int n_labeled = 500;
  int n_pool = 20000;
  int n_test = 1000;
  double noise_rate = 0.3;   // eta in [0, 0.5)
  double class_prior = 0.5;  // P(class 1)
  std::uint64_t seed = 0;

  void validate() const;

  bool operator==(const SynthConfig&) const = default;
};

// Hidden truth for pool examples, kept out of the pool corpus itself.
using TruthTable = std::map<std::string, Label>;

struct SynthData {
  Corpus labeled;      // role=labeled, source=manual, true labels
  Corpus pool;         // role=pool, source=distant, noisy labels
  TruthTable pool_truth;
  Corpus test;         // role=test, source=manual, true labels
};

SynthData generate(const SynthConfig& config);

// {"id": 0|1, ...} sorted by id.
void save_truth(const TruthTable& truth, const std::filesystem::path& path);
TruthTable load_truth(const std::filesystem::path& path);

// Reads a SynthConfig from a JSON object file; absent keys keep defaults.
SynthConfig load_synth_config(const std::filesystem::path& path);

}  // namespace overlapcheck
