#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "overlapcheck/classifier.hpp"
#include "overlapcheck/corpus.hpp"

namespace overlapcheck {

// A pool example annotated with the model's verdict. probability is the
// positive-class output; confidence = max(p, 1-p).
struct PseudoLabeled {
  std::string example_id;
  Label pseudo_label = Label::negative;
  double probability = 0.5;
  double confidence = 0.5;

  bool operator==(const PseudoLabeled&) const = default;
};

// Argmax over (1-p, p); the tie at exactly 0.5 goes to class 1.
PseudoLabeled classify_probability(std::string example_id, double probability);

enum class RankBy { confidence, raw_p };

const char* to_string(RankBy r);
RankBy rank_by_from_string(const std::string& s);

struct SelectionConfig {
  std::size_t n = 1;              // expected number of pseudo samples
  double min_confidence = 0.5;    // 0.5 means no threshold
  bool balanced = false;          // top ceil(n/2) per class, truncated to n
  RankBy rank_by = RankBy::confidence;
  double pseudo_weight = 1.0;     // loss weight stamped on selected examples

  void validate() const;

  bool operator==(const SelectionConfig&) const = default;
};

struct Candidate {
  Example example;
  PseudoLabeled pseudo;

  bool operator==(const Candidate&) const = default;
};

struct ConfidenceStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;

  bool operator==(const ConfidenceStats&) const = default;
};

struct SelectionReport {
  std::size_t pool_size = 0;       // |A|
  std::size_t agreement_size = 0;  // |C|
  std::vector<Candidate> selected; // re-tagged source=pseudo, label=pseudo_label
  std::size_t per_class_counts[2] = {0, 0};
  ConfidenceStats confidence;
  std::size_t shortfall = 0;       // n - |selected| when the pool runs short

  bool operator==(const SelectionReport& o) const {
    return pool_size == o.pool_size && agreement_size == o.agreement_size &&
           selected == o.selected && per_class_counts[0] == o.per_class_counts[0] &&
           per_class_counts[1] == o.per_class_counts[1] && confidence == o.confidence &&
           shortfall == o.shortfall;
  }
};

// One PseudoLabeled per pool example, in pool order.
std::vector<PseudoLabeled> pseudo_label(const LinearModel& model, const Corpus& pool);

// Same, over pre-featurized pool texts (must align 1:1 with the pool).
std::vector<PseudoLabeled> pseudo_label(const LinearModel& model, const Corpus& pool,
                                        std::span<const SparseVector> features);

// Keeps exactly the pairs whose distant label equals the pseudo-label,
// in pool order. pseudo must align 1:1 with pool by id.
std::vector<Candidate> agreement_set(const Corpus& pool,
                                     const std::vector<PseudoLabeled>& pseudo);

// Filters by min_confidence, sorts by (rank key descending, id ascending),
// truncates to n (per class when balanced), and re-tags the survivors as
// pseudo-labelled examples.
SelectionReport select_top_n(std::vector<Candidate> candidates, const SelectionConfig& config);

// pseudo_label -> agreement_set -> select_top_n over precomputed verdicts.
SelectionReport select_from_pseudo(const Corpus& pool, const std::vector<PseudoLabeled>& pseudo,
                                   const SelectionConfig& config);

// The full mechanism in one call.
SelectionReport overlap_select(const LinearModel& model, const Corpus& pool,
                               const SelectionConfig& config);

// Selected examples as a corpus (source = pseudo), ready for joint training.
Corpus selected_corpus(const SelectionReport& report);

// Counts, confidence stats, and per-item verdicts as a JSON document.
std::string selection_report_json(const SelectionReport& report);

}  // namespace overlapcheck
