#include "overlapcheck/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "json_conv.hpp"
#include "overlapcheck/error.hpp"
#include "rng.hpp"

namespace overlapcheck {

void SynthConfig::validate() const {
  if (vocab_size < 2) throw ValidationError("vocab_size must be >= 2");
  if (!(class_signal > 0.0) || !(class_signal < 1.0)) {
    throw ValidationError("class_signal must lie in (0, 1)");
  }
  if (!(signal_strength >= 1.0)) throw ValidationError("signal_strength must be >= 1");
  if (doc_len_mean < 1) throw ValidationError("doc_len_mean must be >= 1");
  if (n_labeled < 0 || n_pool < 0 || n_test < 0) {
    throw ValidationError("corpus sizes must be >= 0");
  }
  if (!(noise_rate >= 0.0) || !(noise_rate < 0.5)) {
    throw ValidationError("noise_rate must lie in [0, 0.5)");
  }
  if (!(class_prior > 0.0) || !(class_prior < 1.0)) {
    throw ValidationError("class_prior must lie in (0, 1)");
  }
}

namespace {

constexpr int kMinDocLen = 5;

// Knuth's product-of-uniforms sampler; exp(-lambda) stays above double
// underflow for every doc_len_mean this generator accepts at desk scale.
int sample_poisson(std::mt19937_64& rng, double lambda) {
  const double threshold = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= detail::next_unit(rng);
  } while (p > threshold);
  return k - 1;
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

struct Vocab {
  std::vector<std::string> words;
  std::vector<double> cdf_class0;
  std::vector<double> cdf_class1;
};

Vocab build_vocab(const SynthConfig& config) {
  Vocab v;
  const int vocab = config.vocab_size;
  v.words.reserve(vocab);
  char buf[24];
  for (int i = 0; i < vocab; ++i) {
    std::snprintf(buf, sizeof(buf), "w%04d", i);
    v.words.emplace_back(buf);
  }

  // Indicative words come first: [0, n0) lean class 0, [n0, n0+n1) class 1.
  const int n_indicative = static_cast<int>(std::lround(vocab * config.class_signal));
  const int n1 = n_indicative / 2;
  const int n0 = n_indicative - n1;

  auto build_cdf = [&](Label cls) {
    std::vector<double> weights(vocab, 1.0);
    for (int i = 0; i < vocab; ++i) {
      const bool class0_word = i < n0;
      const bool class1_word = i >= n0 && i < n0 + n1;
      if ((cls == Label::negative && class0_word) || (cls == Label::positive && class1_word)) {
        weights[i] = config.signal_strength;
      }
    }
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> cdf(vocab);
    double acc = 0.0;
    for (int i = 0; i < vocab; ++i) {
      acc += weights[i] / total;
      cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
  };
  v.cdf_class0 = build_cdf(Label::negative);
  v.cdf_class1 = build_cdf(Label::positive);
  return v;
}

std::string make_doc(std::mt19937_64& rng, const Vocab& vocab, const SynthConfig& config,
                     Label cls) {
  const int len = std::max(kMinDocLen, sample_poisson(rng, config.doc_len_mean));
  const std::vector<double>& cdf =
      cls == Label::positive ? vocab.cdf_class1 : vocab.cdf_class0;
  std::string text;
  text.reserve(static_cast<std::size_t>(len) * 6);
  for (int t = 0; t < len; ++t) {
    if (t > 0) text.push_back(' ');
    text += vocab.words[sample_cdf(cdf, detail::next_unit(rng))];
  }
  return text;
}

std::string make_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06d", prefix, i + 1);
  return buf;
}

}  // namespace

SynthData generate(const SynthConfig& config) {
  config.validate();
  const Vocab vocab = build_vocab(config);

  SynthData data;
  data.labeled.role = Role::labeled;
  data.pool.role = Role::pool;
  data.test.role = Role::test;

  // Independent streams per section, so the pool does not shift when only
  // n_labeled changes.
  {
    auto rng = detail::rng_for(config.seed, 1);
    for (int i = 0; i < config.n_labeled; ++i) {
      const Label cls =
          detail::next_unit(rng) < config.class_prior ? Label::positive : Label::negative;
      Example ex;
      ex.id = make_id("lab", i);
      ex.text = make_doc(rng, vocab, config, cls);
      ex.label = cls;
      ex.source = Source::manual;
      data.labeled.examples.push_back(std::move(ex));
    }
  }
  {
    auto rng = detail::rng_for(config.seed, 2);
    for (int i = 0; i < config.n_pool; ++i) {
      const Label cls =
          detail::next_unit(rng) < config.class_prior ? Label::positive : Label::negative;
      Example ex;
      ex.id = make_id("pool", i);
      ex.text = make_doc(rng, vocab, config, cls);
      const bool flip = detail::next_unit(rng) < config.noise_rate;
      const Label distant =
          flip ? (cls == Label::positive ? Label::negative : Label::positive) : cls;
      ex.label = distant;
      ex.source = Source::distant;
      data.pool_truth.emplace(ex.id, cls);
      data.pool.examples.push_back(std::move(ex));
    }
  }
  {
    auto rng = detail::rng_for(config.seed, 3);
    for (int i = 0; i < config.n_test; ++i) {
      const Label cls =
          detail::next_unit(rng) < config.class_prior ? Label::positive : Label::negative;
      Example ex;
      ex.id = make_id("test", i);
      ex.text = make_doc(rng, vocab, config, cls);
      ex.label = cls;
      ex.source = Source::manual;
      data.test.examples.push_back(std::move(ex));
    }
  }
  return data;
}

void save_truth(const TruthTable& truth, const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, label] : truth) {
    j[id] = label_value(label);
  }
  detail::atomic_write_file(path, j.dump() + "\n");
}

TruthTable load_truth(const std::filesystem::path& path) {
  const nlohmann::json j =
      detail::parse_json(detail::read_file(path), "truth file " + path.string());
  if (!j.is_object()) {
    throw ValidationError("truth file must be a JSON object: " + path.string());
  }
  TruthTable truth;
  for (const auto& [id, value] : j.items()) {
    if (!value.is_number_integer()) {
      throw ValidationError("truth file entry \"" + id + "\" must be 0 or 1");
    }
    truth.emplace(id, label_from_int(value.get<int>()));
  }
  return truth;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  const nlohmann::json j =
      detail::parse_json(detail::read_file(path), "config file " + path.string());
  SynthConfig c;
  try {
    if (j.contains("vocab_size")) c.vocab_size = j["vocab_size"].get<int>();
    if (j.contains("class_signal")) c.class_signal = j["class_signal"].get<double>();
    if (j.contains("signal_strength")) c.signal_strength = j["signal_strength"].get<double>();
    if (j.contains("doc_len_mean")) c.doc_len_mean = j["doc_len_mean"].get<int>();
    if (j.contains("n_labeled")) c.n_labeled = j["n_labeled"].get<int>();
    if (j.contains("n_pool")) c.n_pool = j["n_pool"].get<int>();
    if (j.contains("n_test")) c.n_test = j["n_test"].get<int>();
    if (j.contains("noise_rate")) c.noise_rate = j["noise_rate"].get<double>();
    if (j.contains("class_prior")) c.class_prior = j["class_prior"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace overlapcheck
