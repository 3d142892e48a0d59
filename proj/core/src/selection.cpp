#include "overlapcheck/selection.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "overlapcheck/error.hpp"

namespace overlapcheck {

PseudoLabeled classify_probability(std::string example_id, double probability) {
  PseudoLabeled out;
  out.example_id = std::move(example_id);
  out.probability = probability;
  out.pseudo_label = probability >= 0.5 ? Label::positive : Label::negative;
  out.confidence = std::max(probability, 1.0 - probability);
  return out;
}

const char* to_string(RankBy r) {
  return r == RankBy::confidence ? "confidence" : "raw-p";
}

RankBy rank_by_from_string(const std::string& s) {
  if (s == "confidence") return RankBy::confidence;
  if (s == "raw-p" || s == "raw_p") return RankBy::raw_p;
  throw ValidationError("unknown rank-by \"" + s + "\" (expected confidence or raw-p)");
}

void SelectionConfig::validate() const {
  if (n < 1) throw ValidationError("selection n must be >= 1");
  if (!(min_confidence >= 0.5) || !(min_confidence < 1.0)) {
    throw ValidationError("min_confidence must lie in [0.5, 1)");
  }
  if (!(pseudo_weight > 0.0) || !(pseudo_weight <= 1.0)) {
    throw ValidationError("pseudo_weight must lie in (0, 1]");
  }
}

namespace {

void check_pool(const LinearModel& model, const Corpus& pool) {
  if (pool.role != Role::pool) {
    throw ValidationError("pseudo_label expects a corpus with role pool");
  }
  if (model.weights.size() != model.featurizer.num_buckets) {
    throw ValidationError("model weight vector does not match featurizer num_buckets");
  }
}

}  // namespace

std::vector<PseudoLabeled> pseudo_label(const LinearModel& model, const Corpus& pool) {
  check_pool(model, pool);
  std::vector<PseudoLabeled> out;
  out.reserve(pool.size());
  for (const Example& ex : pool.examples) {
    const double p = predict_prob(model, featurize(ex.text, model.featurizer));
    out.push_back(classify_probability(ex.id, p));
  }
  return out;
}

std::vector<PseudoLabeled> pseudo_label(const LinearModel& model, const Corpus& pool,
                                        std::span<const SparseVector> features) {
  check_pool(model, pool);
  if (features.size() != pool.size()) {
    throw ValidationError("featurized pool does not align with pool corpus");
  }
  std::vector<PseudoLabeled> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.push_back(classify_probability(pool.examples[i].id, predict_prob(model, features[i])));
  }
  return out;
}

std::vector<Candidate> agreement_set(const Corpus& pool,
                                     const std::vector<PseudoLabeled>& pseudo) {
  if (pseudo.size() != pool.size()) {
    throw ValidationError("pseudo labels do not align 1:1 with pool (" +
                          std::to_string(pseudo.size()) + " vs " +
                          std::to_string(pool.size()) + ")");
  }
  std::vector<Candidate> agreement;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Example& ex = pool.examples[i];
    if (pseudo[i].example_id != ex.id) {
      throw ValidationError("pseudo label id mismatch at position " + std::to_string(i) +
                            ": \"" + pseudo[i].example_id + "\" vs \"" + ex.id + "\"");
    }
    if (!ex.label) {
      throw ValidationError("pool example \"" + ex.id + "\" has no distant label");
    }
    if (*ex.label == pseudo[i].pseudo_label) {
      agreement.push_back({ex, pseudo[i]});
    }
  }
  return agreement;
}

namespace {

double rank_key(const Candidate& c, RankBy rank_by) {
  return rank_by == RankBy::raw_p ? c.pseudo.probability : c.pseudo.confidence;
}

// Descending key, ascending id: a total order since ids are unique.
void sort_candidates(std::vector<Candidate>& v, RankBy rank_by) {
  std::sort(v.begin(), v.end(), [rank_by](const Candidate& a, const Candidate& b) {
    const double ka = rank_key(a, rank_by);
    const double kb = rank_key(b, rank_by);
    if (ka != kb) return ka > kb;
    return a.example.id < b.example.id;
  });
}

}  // namespace

SelectionReport select_top_n(std::vector<Candidate> candidates, const SelectionConfig& config) {
  config.validate();

  SelectionReport report;
  report.agreement_size = candidates.size();

  std::erase_if(candidates, [&](const Candidate& c) {
    return c.pseudo.confidence < config.min_confidence;
  });

  std::vector<Candidate> picked;
  if (config.balanced) {
    const std::size_t per_class = (config.n + 1) / 2;
    std::vector<Candidate> by_class[2];
    for (Candidate& c : candidates) {
      by_class[label_value(c.pseudo.pseudo_label)].push_back(std::move(c));
    }
    for (auto& side : by_class) {
      sort_candidates(side, config.rank_by);
      if (side.size() > per_class) side.resize(per_class);
      picked.insert(picked.end(), std::make_move_iterator(side.begin()),
                    std::make_move_iterator(side.end()));
    }
    sort_candidates(picked, config.rank_by);
    if (picked.size() > config.n) picked.resize(config.n);
  } else {
    sort_candidates(candidates, config.rank_by);
    if (candidates.size() > config.n) candidates.resize(config.n);
    picked = std::move(candidates);
  }

  report.shortfall = config.n > picked.size() ? config.n - picked.size() : 0;

  double conf_sum = 0.0;
  for (Candidate& c : picked) {
    c.example.source = Source::pseudo;
    c.example.label = c.pseudo.pseudo_label;
    c.example.weight = config.pseudo_weight;
    ++report.per_class_counts[label_value(c.pseudo.pseudo_label)];
    conf_sum += c.pseudo.confidence;
  }
  if (!picked.empty()) {
    report.confidence.min = picked.back().pseudo.confidence;
    report.confidence.max = picked.front().pseudo.confidence;
    if (config.rank_by == RankBy::raw_p) {
      auto [lo, hi] = std::minmax_element(
          picked.begin(), picked.end(), [](const Candidate& a, const Candidate& b) {
            return a.pseudo.confidence < b.pseudo.confidence;
          });
      report.confidence.min = lo->pseudo.confidence;
      report.confidence.max = hi->pseudo.confidence;
    }
    report.confidence.mean = conf_sum / static_cast<double>(picked.size());
  }
  report.selected = std::move(picked);
  return report;
}

SelectionReport select_from_pseudo(const Corpus& pool, const std::vector<PseudoLabeled>& pseudo,
                                   const SelectionConfig& config) {
  SelectionReport report = select_top_n(agreement_set(pool, pseudo), config);
  report.pool_size = pool.size();
  return report;
}

SelectionReport overlap_select(const LinearModel& model, const Corpus& pool,
                               const SelectionConfig& config) {
  config.validate();
  return select_from_pseudo(pool, pseudo_label(model, pool), config);
}

Corpus selected_corpus(const SelectionReport& report) {
  Corpus out;
  out.role = Role::mixed;
  out.examples.reserve(report.selected.size());
  for (const Candidate& c : report.selected) {
    out.examples.push_back(c.example);
  }
  return out;
}

std::string selection_report_json(const SelectionReport& report) {
  nlohmann::json items = nlohmann::json::array();
  for (const Candidate& c : report.selected) {
    items.push_back({{"id", c.example.id},
                     {"pseudo_label", label_value(c.pseudo.pseudo_label)},
                     {"probability", c.pseudo.probability},
                     {"confidence", c.pseudo.confidence}});
  }
  nlohmann::json j{
      {"pool_size", report.pool_size},
      {"agreement_size", report.agreement_size},
      {"selected_count", report.selected.size()},
      {"shortfall", report.shortfall},
      {"per_class_counts",
       {{"0", report.per_class_counts[0]}, {"1", report.per_class_counts[1]}}},
      {"confidence",
       {{"min", report.confidence.min},
        {"mean", report.confidence.mean},
        {"max", report.confidence.max}}},
      {"selected", std::move(items)}};
  return j.dump(2) + "\n";
}

}  // namespace overlapcheck
