#include "overlapcheck/features.hpp"

#include <cmath>
#include <map>

#include "overlapcheck/error.hpp"

namespace overlapcheck {

const char* to_string(Weighting w) {
  switch (w) {
    case Weighting::binary: return "binary";
    case Weighting::tf: return "tf";
    case Weighting::log_tf: return "log_tf";
  }
  return "?";
}

Weighting weighting_from_string(const std::string& s) {
  if (s == "binary") return Weighting::binary;
  if (s == "tf") return Weighting::tf;
  if (s == "log_tf") return Weighting::log_tf;
  throw ValidationError("unknown weighting \"" + s + "\"");
}

void FeaturizerConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max || ngram_max > 5) {
    throw ValidationError("require 1 <= ngram_min <= ngram_max <= 5");
  }
  const bool power_of_two = num_buckets != 0 && (num_buckets & (num_buckets - 1)) == 0;
  if (!power_of_two || num_buckets < (1u << 10) || num_buckets > (1u << 24)) {
    throw ValidationError("num_buckets must be a power of two in [2^10, 2^24]");
  }
}

double SparseVector::dot(std::span<const double> weights) const {
  double acc = 0.0;
  for (const Entry& e : entries) {
    if (e.index >= weights.size()) {
      throw ValidationError("feature index " + std::to_string(e.index) +
                            " out of range for weight vector of size " +
                            std::to_string(weights.size()));
    }
    acc += e.value * weights[e.index];
  }
  return acc;
}

double SparseVector::l2_norm() const {
  double sq = 0.0;
  for (const Entry& e : entries) sq += e.value * e.value;
  return std::sqrt(sq);
}

namespace {

inline bool is_word_byte(unsigned char c) {
  if (c >= 0x80) return true;
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

inline char fold_case(unsigned char c, bool lowercase) {
  if (lowercase && c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const FeaturizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(fold_case(c, config.lowercase));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

HashedFeature hash_ngram(std::string_view joined_ngram, std::uint32_t num_buckets) {
  if (num_buckets == 0 || (num_buckets & (num_buckets - 1)) != 0) {
    throw ValidationError("num_buckets must be a power of two");
  }
  const std::uint64_t h = fnv1a64(joined_ngram);
  HashedFeature f;
  f.index = static_cast<std::uint32_t>(h & (num_buckets - 1));
  f.sign = (h >> 63) == 0 ? +1 : -1;
  return f;
}

SparseVector featurize(std::string_view text, const FeaturizerConfig& config) {
  config.validate();
  const std::vector<std::string> tokens = tokenize(text, config);

  // Count occurrences per distinct n-gram. Ordered map keeps the later
  // floating-point accumulation order canonical.
  constexpr char kSep = '\x1f';
  std::map<std::string, std::uint32_t> counts;
  std::string key;
  for (int n = config.ngram_min; n <= config.ngram_max; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      key.clear();
      for (int k = 0; k < n; ++k) {
        if (k > 0) key.push_back(kSep);
        key += tokens[i + k];
      }
      ++counts[key];
    }
  }

  std::map<std::uint32_t, double> buckets;
  for (const auto& [ngram, count] : counts) {
    double w = 1.0;
    switch (config.weighting) {
      case Weighting::binary: w = 1.0; break;
      case Weighting::tf: w = static_cast<double>(count); break;
      case Weighting::log_tf: w = 1.0 + std::log(static_cast<double>(count)); break;
    }
    const HashedFeature f = hash_ngram(ngram, config.num_buckets);
    buckets[f.index] += static_cast<double>(f.sign) * w;
  }

  SparseVector vec;
  vec.entries.reserve(buckets.size());
  for (const auto& [index, value] : buckets) {
    if (value != 0.0) vec.entries.push_back({index, value});
  }

  if (config.l2_normalize && !vec.entries.empty()) {
    const double norm = vec.l2_norm();
    for (auto& e : vec.entries) e.value /= norm;
  }
  return vec;
}

}  // namespace overlapcheck
