#include "overlapcheck/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "overlapcheck/error.hpp"

namespace overlapcheck {

std::vector<std::string> Metrics::flags() const {
  std::vector<std::string> out;
  if (!precision_defined) out.push_back("precision_undefined");
  if (!recall_defined) out.push_back("recall_undefined");
  if (!f1_defined) out.push_back("f1_undefined");
  return out;
}

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> golds) {
  if (predictions.size() != golds.size()) {
    throw ValidationError("confusion: predictions and golds differ in length (" +
                          std::to_string(predictions.size()) + " vs " +
                          std::to_string(golds.size()) + ")");
  }
  if (predictions.empty()) {
    throw ValidationError("confusion: empty inputs");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred = predictions[i] == Label::positive;
    const bool gold = golds[i] == Label::positive;
    if (pred && gold) ++cm.tp;
    else if (pred && !gold) ++cm.fp;
    else if (!pred && gold) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw ValidationError("metrics_from_confusion: empty matrix");

  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp > 0) {
    m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  } else {
    m.precision = 0.0;
    m.precision_defined = false;
  }
  if (cm.tp + cm.fn > 0) {
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  } else {
    m.recall = 0.0;
    m.recall_defined = false;
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1 = 0.0;
    m.f1_defined = false;
  }
  return m;
}

EvalResult evaluate(const LinearModel& model, const Corpus& test, double threshold) {
  std::vector<SparseVector> features;
  features.reserve(test.size());
  for (const Example& ex : test.examples) {
    features.push_back(featurize(ex.text, model.featurizer));
  }
  return evaluate(model, test, features, threshold);
}

EvalResult evaluate(const LinearModel& model, const Corpus& test,
                    std::span<const SparseVector> features, double threshold) {
  if (features.size() != test.size()) {
    throw ValidationError("evaluate: features do not align with corpus");
  }
  std::vector<Label> preds;
  std::vector<Label> golds;
  preds.reserve(test.size());
  golds.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Example& ex = test.examples[i];
    if (!ex.label) {
      throw ValidationError("evaluate: unlabelled example \"" + ex.id + "\"");
    }
    golds.push_back(*ex.label);
    const double p = predict_prob(model, features[i]);
    preds.push_back(p >= threshold ? Label::positive : Label::negative);
  }
  EvalResult result;
  result.confusion = confusion(preds, golds);
  result.metrics = metrics_from_confusion(result.confusion);
  return result;
}

std::vector<ReportRow> leaderboard_reference_rows() {
  auto row = [](const char* name, double acc, double prec, double rec, double f1) {
    ReportRow r;
    r.name = name;
    r.metrics.accuracy = acc;
    r.metrics.precision = prec;
    r.metrics.recall = rec;
    r.metrics.f1 = f1;
    return r;
  };
  return {
      row("Tom Jumbo Grumbo", 0.806, 0.858, 0.732, 0.790),
      row("Sally Smedley", 0.809, 0.823, 0.787, 0.805),
      row("Vernon Fenwick", 0.820, 0.815, 0.828, 0.821),
      row("Bertha von Suttner", 0.822, 0.871, 0.755, 0.809),
      row("Otto Cheirk", 0.831, 0.823, 0.844, 0.834),
  };
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string join_flags(const Metrics& m, char sep) {
  std::string out;
  for (const std::string& f : m.flags()) {
    if (!out.empty()) out.push_back(sep);
    out += f;
  }
  return out;
}

}  // namespace

std::string render_text_table(std::span<const ReportRow> rows) {
  if (rows.empty()) throw ValidationError("render: no rows");
  std::size_t name_width = 4;  // "name"
  for (const ReportRow& r : rows) name_width = std::max(name_width, r.name.size());

  std::string out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out += s;
    out.append(w > s.size() ? w - s.size() : 0, ' ');
  };
  pad("name", name_width);
  out += "  acc    prec   recall f1\n";
  for (const ReportRow& r : rows) {
    pad(r.name, name_width);
    out += "  " + fixed3(r.metrics.accuracy) + "  " + fixed3(r.metrics.precision) + "  " +
           fixed3(r.metrics.recall) + "  " + fixed3(r.metrics.f1);
    const std::string flags = join_flags(r.metrics, ',');
    if (!flags.empty()) out += "  [" + flags + "]";
    out += '\n';
  }
  return out;
}

std::string render_json(std::span<const ReportRow> rows) {
  if (rows.empty()) throw ValidationError("render: no rows");
  nlohmann::json out_rows = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    out_rows.push_back({{"name", r.name},
                        {"accuracy", r.metrics.accuracy},
                        {"precision", r.metrics.precision},
                        {"recall", r.metrics.recall},
                        {"f1", r.metrics.f1},
                        {"flags", r.metrics.flags()}});
  }
  return nlohmann::json{{"rows", std::move(out_rows)}}.dump(2) + "\n";
}

std::string render_csv(std::span<const ReportRow> rows) {
  if (rows.empty()) throw ValidationError("render: no rows");
  std::string out = "name,accuracy,precision,recall,f1,flags\n";
  for (const ReportRow& r : rows) {
    std::string name = r.name;
    if (name.find(',') != std::string::npos || name.find('"') != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
      }
      quoted += "\"";
      name = quoted;
    }
    out += name + "," + fixed3(r.metrics.accuracy) + "," + fixed3(r.metrics.precision) + "," +
           fixed3(r.metrics.recall) + "," + fixed3(r.metrics.f1) + "," + join_flags(r.metrics, ';') +
           "\n";
  }
  return out;
}

}  // namespace overlapcheck
