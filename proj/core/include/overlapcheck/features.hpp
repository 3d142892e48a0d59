#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace overlapcheck {

enum class Weighting { binary, tf, log_tf };

const char* to_string(Weighting w);
Weighting weighting_from_string(const std::string& s);

struct FeaturizerConfig {
  int ngram_min = 1;
  int ngram_max = 2;
  std::uint32_t num_buckets = 1u << 18;
  Weighting weighting = Weighting::log_tf;
  bool l2_normalize = true;
  bool lowercase = true;

  // 1 <= ngram_min <= ngram_max <= 5; num_buckets a power of two in [2^10, 2^24].
  void validate() const;

  bool operator==(const FeaturizerConfig&) const = default;
};

// Sparse feature vector with strictly increasing indices and nonzero values.
struct SparseVector {
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }

  // w . x; throws when an index falls outside the weight vector.
  double dot(std::span<const double> weights) const;
  double l2_norm() const;

  bool operator==(const SparseVector&) const = default;
};

// Splits text into maximal runs of word characters. Word characters are ASCII
// alphanumerics plus all non-ASCII bytes, so multi-byte UTF-8 letters stay
// inside tokens while ASCII punctuation and whitespace separate them.
// Lowercasing (ASCII-only) is applied when configured.
std::vector<std::string> tokenize(std::string_view text, const FeaturizerConfig& config);

// 64-bit FNV-1a over the UTF-8 bytes of data. Bit-exact on every platform.
std::uint64_t fnv1a64(std::string_view data);

struct HashedFeature {
  std::uint32_t index;
  int sign;  // +1 or -1
  bool operator==(const HashedFeature&) const = default;
};

// Hashes one n-gram (tokens joined with a single 0x1f separator) into a
// bucket index plus a sign: index = fnv1a64 mod num_buckets, sign from the
// high bit. num_buckets must be a power of two.
HashedFeature hash_ngram(std::string_view joined_ngram, std::uint32_t num_buckets);

// Tokenize, extract n-grams for n in [ngram_min, ngram_max], weight each
// distinct n-gram (binary: 1, tf: count, log_tf: 1 + ln count), accumulate
// sign * weight per bucket, drop exact-zero buckets, L2-normalize if enabled.
SparseVector featurize(std::string_view text, const FeaturizerConfig& config);

}  // namespace overlapcheck
