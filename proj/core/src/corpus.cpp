#include "overlapcheck/corpus.hpp"

#include <cmath>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "overlapcheck/error.hpp"
#include "rng.hpp"

namespace overlapcheck {

using nlohmann::json;

Label label_from_int(int v) {
  if (v == 0) return Label::negative;
  if (v == 1) return Label::positive;
  throw ValidationError("label must be 0 or 1, got " + std::to_string(v));
}

const char* to_string(Source s) {
  switch (s) {
    case Source::manual: return "manual";
    case Source::distant: return "distant";
    case Source::pseudo: return "pseudo";
  }
  return "?";
}

const char* to_string(Role r) {
  switch (r) {
    case Role::labeled: return "labeled";
    case Role::pool: return "pool";
    case Role::test: return "test";
    case Role::mixed: return "mixed";
  }
  return "?";
}

Source source_from_string(const std::string& s) {
  if (s == "manual") return Source::manual;
  if (s == "distant") return Source::distant;
  if (s == "pseudo") return Source::pseudo;
  throw ValidationError("unknown source \"" + s + "\"");
}

void Corpus::validate() const {
  std::unordered_set<std::string> seen;
  seen.reserve(examples.size());
  for (const Example& ex : examples) {
    if (ex.id.empty()) {
      throw ValidationError("example with empty id");
    }
    if (!seen.insert(ex.id).second) {
      throw IntegrityError("duplicate example id \"" + ex.id + "\"");
    }
    if (!(ex.weight >= 0.0) || !std::isfinite(ex.weight)) {
      throw ValidationError("example \"" + ex.id + "\": weight must be finite and >= 0");
    }
    if ((ex.source == Source::manual || ex.source == Source::pseudo) && !ex.label) {
      throw ValidationError("example \"" + ex.id + "\": source " +
                            std::string(to_string(ex.source)) + " requires a label");
    }
  }
  if (role == Role::labeled || role == Role::test) {
    for (const Example& ex : examples) {
      if (!ex.label) {
        throw ValidationError(std::string("corpus with role ") + to_string(role) +
                              " requires labels; example \"" + ex.id + "\" has none");
      }
    }
  }
}

namespace {

Example example_from_json(const json& j, std::size_t line_no) {
  auto fail = [line_no](const std::string& what) -> ValidationError {
    return ValidationError("line " + std::to_string(line_no) + ": " + what);
  };
  if (!j.is_object()) throw fail("expected a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw fail("missing or non-string \"id\"");
  if (!j.contains("text") || !j["text"].is_string()) throw fail("missing or non-string \"text\"");

  Example ex;
  ex.id = j["id"].get<std::string>();
  ex.text = j["text"].get<std::string>();

  if (j.contains("label")) {
    const json& l = j["label"];
    if (!l.is_number_integer()) throw fail("\"label\" must be the integer 0 or 1");
    auto v = l.get<std::int64_t>();
    if (v != 0 && v != 1) {
      throw fail("label must be 0 or 1, got " + std::to_string(v));
    }
    ex.label = label_from_int(static_cast<int>(v));
  }

  if (j.contains("source")) {
    if (!j["source"].is_string()) throw fail("\"source\" must be a string");
    try {
      ex.source = source_from_string(j["source"].get<std::string>());
    } catch (const ValidationError& e) {
      throw fail(e.what());
    }
  } else {
    ex.source = ex.label ? Source::manual : Source::distant;
  }

  if (j.contains("weight")) {
    if (!j["weight"].is_number()) throw fail("\"weight\" must be a number");
    ex.weight = j["weight"].get<double>();
    if (!(ex.weight >= 0.0) || !std::isfinite(ex.weight)) {
      throw fail("weight must be finite and >= 0");
    }
  }
  return ex;
}

}  // namespace

Corpus load_jsonl(const std::filesystem::path& path, Role role) {
  const std::string content = detail::read_file(path);

  Corpus corpus;
  corpus.role = role;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view line(content.data() + pos,
                          (eol == std::string::npos ? content.size() : eol) - pos);
    pos = (eol == std::string::npos) ? content.size() : eol + 1;
    ++line_no;

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": malformed JSON");
    }
    corpus.examples.push_back(example_from_json(j, line_no));
  }
  corpus.validate();
  return corpus;
}

namespace {

json example_to_json(const Example& ex) {
  json j;
  j["id"] = ex.id;
  if (ex.label) j["label"] = label_value(*ex.label);
  j["source"] = to_string(ex.source);
  j["text"] = ex.text;
  j["weight"] = ex.weight;
  return j;
}

}  // namespace

void save_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const Example& ex : corpus.examples) {
    try {
      out += example_to_json(ex).dump();
    } catch (const json::exception& e) {
      throw ValidationError("example \"" + ex.id + "\": " + e.what());
    }
    out += '\n';
  }
  detail::atomic_write_file(path, out);
}

SplitResult split(const Corpus& corpus, SplitFractions fractions, std::uint64_t seed) {
  if (!(fractions.train > 0.0) || !(fractions.val > 0.0)) {
    throw ValidationError("split fractions must be positive");
  }
  if (!(fractions.train + fractions.val < 1.0)) {
    throw ValidationError("split fractions must satisfy train + val < 1");
  }

  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = detail::rng_for(seed, 0);
  detail::shuffle_vec(order, rng);

  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.train));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions.val));

  SplitResult result;
  result.train.role = corpus.role;
  result.val.role = corpus.role;
  result.test.role = corpus.role;
  for (std::size_t i = 0; i < n; ++i) {
    const Example& ex = corpus.examples[order[i]];
    if (i < n_train) {
      result.train.examples.push_back(ex);
    } else if (i < n_train + n_val) {
      result.val.examples.push_back(ex);
    } else {
      result.test.examples.push_back(ex);
    }
  }
  return result;
}

}  // namespace overlapcheck
