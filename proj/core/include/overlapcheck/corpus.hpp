#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace overlapcheck {

// Binary class. positive (1) = hyperpartisan/biased, negative (0) = mainstream.
enum class Label : int { negative = 0, positive = 1 };

inline int label_value(Label l) { return static_cast<int>(l); }
Label label_from_int(int v);  // throws ValidationError unless v is 0 or 1

// How an example's label came to be.
enum class Source { manual, distant, pseudo };

// What a corpus is used for.
enum class Role { labeled, pool, test, mixed };

const char* to_string(Source s);
const char* to_string(Role r);
Source source_from_string(const std::string& s);

struct Example {
  std::string id;
  std::string text;
  std::optional<Label> label;
  Source source = Source::manual;
  double weight = 1.0;

  bool operator==(const Example&) const = default;
};

struct Corpus {
  std::vector<Example> examples;
  Role role = Role::mixed;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  // Checks id uniqueness, per-example invariants, and role constraints
  // (labeled/test corpora must be fully labelled). Throws on violation.
  void validate() const;

  bool operator==(const Corpus&) const = default;
};

// Reads a JSONL corpus. One JSON object per line with fields
// {id, text, label?, source?, weight?}. Missing source defaults to manual
// when a label is present, distant otherwise. Missing weight defaults to 1.
Corpus load_jsonl(const std::filesystem::path& path, Role role = Role::mixed);

// Writes one JSON object per line, UTF-8 with LF endings. Atomic: the file
// appears only after a successful write. load_jsonl(save_jsonl(c)) == c.
void save_jsonl(const Corpus& corpus, const std::filesystem::path& path);

struct SplitFractions {
  double train = 0.0;
  double val = 0.0;
};

struct SplitResult {
  Corpus train;
  Corpus val;
  Corpus test;
};

// Seeded shuffle followed by contiguous slicing. Sizes are
// floor(n*train) and floor(n*val); the remainder is test. Requires
// train > 0, val > 0, train + val < 1.
SplitResult split(const Corpus& corpus, SplitFractions fractions, std::uint64_t seed);

}  // namespace overlapcheck
