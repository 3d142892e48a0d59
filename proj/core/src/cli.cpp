#include "overlapcheck/cli.hpp"

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "json_conv.hpp"
#include "overlapcheck/classifier.hpp"
#include "overlapcheck/corpus.hpp"
#include "overlapcheck/error.hpp"
#include "overlapcheck/evaluation.hpp"
#include "overlapcheck/runner.hpp"
#include "overlapcheck/selection.hpp"
#include "overlapcheck/synthgen.hpp"

namespace overlapcheck {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Config file dialect shared by `train` and `retrain`.
struct StepConfig {
  FeaturizerConfig featurizer;
  TrainConfig train;
  double val_fraction = 0.2;
};

StepConfig load_step_config(const fs::path& path) {
  const json j = detail::parse_json(detail::read_file(path), "config file " + path.string());
  StepConfig c;
  try {
    if (j.contains("featurizer")) c.featurizer = detail::featurizer_from_json(j["featurizer"]);
    if (j.contains("train")) c.train = detail::train_config_from_json(j["train"]);
    if (j.contains("val_fraction")) c.val_fraction = j["val_fraction"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  if (!(c.val_fraction > 0.0) || !(c.val_fraction < 1.0)) {
    throw ValidationError("val_fraction must lie in (0, 1)");
  }
  return c;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

int run_synth(const fs::path& config_path, const fs::path& out_dir) {
  const SynthConfig config = load_synth_config(config_path);
  const SynthData data = generate(config);
  ensure_dir(out_dir);
  save_jsonl(data.labeled, out_dir / "labeled.jsonl");
  save_jsonl(data.pool, out_dir / "pool.jsonl");
  save_jsonl(data.test, out_dir / "test.jsonl");
  save_truth(data.pool_truth, out_dir / "truth.json");
  std::cout << "wrote " << data.labeled.size() << " labeled, " << data.pool.size() << " pool, "
            << data.test.size() << " test examples to " << out_dir.string() << "\n";
  return 0;
}

int run_train(const fs::path& labeled_path, const fs::path& config_path, const fs::path& model_out,
              const std::optional<fs::path>& history_out) {
  const StepConfig cfg = load_step_config(config_path);
  const Corpus labeled = load_jsonl(labeled_path, Role::labeled);
  auto [train_c, val_c] = train_val_split(labeled, cfg.val_fraction, cfg.train.seed);
  const TrainResult result = train(train_c, val_c, cfg.train, cfg.featurizer);
  save_model(result.model, model_out);
  save_history(result.history,
               history_out.value_or(fs::path(model_out.string() + ".history.json")));
  std::cout << "stopped at epoch " << result.history.stopped_epoch << " (best epoch "
            << result.history.best_epoch << ", val loss " << result.history.best_val_loss
            << "); model written to " << model_out.string() << "\n";
  return 0;
}

int run_select(const fs::path& model_path, const fs::path& pool_path,
               const SelectionConfig& config, const fs::path& out_path,
               const fs::path& report_path) {
  const LinearModel model = load_model(model_path);
  const Corpus pool = load_jsonl(pool_path, Role::pool);
  const SelectionReport report = overlap_select(model, pool, config);
  save_jsonl(selected_corpus(report), out_path);
  detail::atomic_write_file(report_path, selection_report_json(report));
  std::cout << "selected " << report.selected.size() << " of " << report.agreement_size
            << " agreeing examples (pool size " << report.pool_size << ")\n";
  return 0;
}

int run_retrain(const fs::path& labeled_path, const fs::path& pseudo_path, double pseudo_weight,
                const fs::path& config_path, const fs::path& model_out,
                const std::optional<fs::path>& history_out) {
  if (!(pseudo_weight > 0.0) || !(pseudo_weight <= 1.0)) {
    throw ValidationError("--pseudo-weight must lie in (0, 1]");
  }
  const StepConfig cfg = load_step_config(config_path);
  const Corpus labeled = load_jsonl(labeled_path, Role::labeled);
  Corpus pseudo = load_jsonl(pseudo_path);
  for (Example& ex : pseudo.examples) {
    if (!ex.label) throw ValidationError("pseudo example \"" + ex.id + "\" has no label");
    ex.weight = pseudo_weight;
  }
  auto [train_c, val_c] = train_val_split(labeled, cfg.val_fraction, cfg.train.seed);
  Corpus joint = std::move(train_c);
  joint.role = Role::mixed;
  joint.examples.insert(joint.examples.end(), pseudo.examples.begin(), pseudo.examples.end());
  const TrainResult result = train(joint, val_c, cfg.train, cfg.featurizer);
  save_model(result.model, model_out);
  save_history(result.history,
               history_out.value_or(fs::path(model_out.string() + ".history.json")));
  std::cout << "joint set: " << joint.size() << " examples (" << pseudo.size()
            << " pseudo at weight " << pseudo_weight << "); model written to "
            << model_out.string() << "\n";
  return 0;
}

int run_eval(const fs::path& model_path, const fs::path& test_path, const fs::path& report_path) {
  const LinearModel model = load_model(model_path);
  const Corpus test = load_jsonl(test_path, Role::test);
  const EvalResult result = evaluate(model, test);
  const std::vector<ReportRow> rows{{model_path.filename().string(), result.metrics}};
  detail::atomic_write_file(report_path,
                            report_path.extension() == ".csv" ? render_csv(rows) : render_json(rows));
  std::cout << render_text_table(rows);
  return 0;
}

int run_experiment_cmd(const fs::path& config_path, const std::optional<fs::path>& out_dir) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (out_dir) config.output_dir = *out_dir;
  if (config.output_dir.empty()) {
    throw ValidationError("experiment needs an output directory (--out or \"output_dir\")");
  }
  const ExperimentReport report = run_experiment(config);
  ensure_dir(config.output_dir);
  detail::atomic_write_file(config.output_dir / "report.json",
                            experiment_report_json(report, config));
  detail::atomic_write_file(config.output_dir / "per_seed.csv", per_seed_csv(report));
  std::cout << "seeds: " << report.per_seed.size() << "\n"
            << "baseline accuracy:  " << report.baseline_accuracy.mean << "\n"
            << "augmented accuracy: " << report.augmented_accuracy.mean << "\n"
            << "delta:              "
            << report.augmented_accuracy.mean - report.baseline_accuracy.mean << "\n";
  if (report.selected_noise_rate) {
    std::cout << "selected noise rate: " << report.selected_noise_rate->mean << "\n";
  }
  for (const std::string& flag : report.flags) std::cout << "flag: " << flag << "\n";
  std::cout << "report written to " << (config.output_dir / "report.json").string() << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Overlap-filtered pseudo-labelling pipeline for noisy distant supervision",
               "overlapcheck"};
  app.require_subcommand(1);

  std::string synth_config, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate labeled/pool/test corpora plus a truth table");
  synth->add_option("--config", synth_config, "Generator config JSON")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::string train_labeled, train_config, train_model_out, train_history_out;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier on a labelled corpus");
  train_cmd->add_option("--labeled", train_labeled, "Labelled corpus (JSONL)")->required();
  train_cmd->add_option("--config", train_config, "Featurizer/train config JSON")->required();
  train_cmd->add_option("--model-out", train_model_out, "Model artifact path")->required();
  train_cmd->add_option("--history-out", train_history_out,
                        "Training history path (default: <model-out>.history.json)");

  std::string sel_model, sel_pool, sel_out, sel_report, sel_rank_by = "confidence";
  SelectionConfig sel_config;
  auto* select_cmd =
      app.add_subcommand("select", "Pseudo-label a pool and keep agreeing high-confidence samples");
  select_cmd->add_option("--model", sel_model, "Model artifact")->required();
  select_cmd->add_option("--pool", sel_pool, "Distantly labelled pool (JSONL)")->required();
  select_cmd->add_option("--n", sel_config.n, "Number of samples to select")->required();
  select_cmd->add_option("--min-confidence", sel_config.min_confidence,
                         "Drop candidates below this confidence");
  select_cmd->add_flag("--balanced", sel_config.balanced, "Select per class, ceil(n/2) each");
  select_cmd->add_option("--rank-by", sel_rank_by, "Ranking key: confidence or raw-p");
  select_cmd->add_option("--out", sel_out, "Selected corpus path (JSONL)")->required();
  select_cmd->add_option("--report", sel_report, "Selection report path (JSON)")->required();

  std::string re_labeled, re_pseudo, re_config, re_model_out, re_history_out;
  double re_pseudo_weight = 1.0;
  auto* retrain_cmd =
      app.add_subcommand("retrain", "Train jointly on labelled plus pseudo-labelled data");
  retrain_cmd->add_option("--labeled", re_labeled, "Labelled corpus (JSONL)")->required();
  retrain_cmd->add_option("--pseudo", re_pseudo, "Pseudo-labelled corpus (JSONL)")->required();
  retrain_cmd->add_option("--pseudo-weight", re_pseudo_weight, "Loss weight for pseudo samples")
      ->required();
  retrain_cmd->add_option("--config", re_config, "Featurizer/train config JSON")->required();
  retrain_cmd->add_option("--model-out", re_model_out, "Model artifact path")->required();
  retrain_cmd->add_option("--history-out", re_history_out,
                          "Training history path (default: <model-out>.history.json)");

  std::string eval_model, eval_test, eval_report;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labelled test corpus");
  eval_cmd->add_option("--model", eval_model, "Model artifact")->required();
  eval_cmd->add_option("--test", eval_test, "Test corpus (JSONL)")->required();
  eval_cmd->add_option("--report", eval_report, "Report path (.json or .csv)")->required();

  std::string exp_config, exp_out;
  auto* exp_cmd = app.add_subcommand("experiment", "Run the full multi-seed experiment");
  exp_cmd->add_option("--config", exp_config, "Experiment config JSON")->required();
  exp_cmd->add_option("--out", exp_out, "Output directory (overrides config output_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return run_synth(synth_config, synth_out);
    if (train_cmd->parsed()) {
      return run_train(train_labeled, train_config, train_model_out,
                       train_history_out.empty()
                           ? std::nullopt
                           : std::optional<fs::path>(train_history_out));
    }
    if (select_cmd->parsed()) {
      sel_config.rank_by = rank_by_from_string(sel_rank_by);
      sel_config.validate();
      return run_select(sel_model, sel_pool, sel_config, sel_out, sel_report);
    }
    if (retrain_cmd->parsed()) {
      return run_retrain(re_labeled, re_pseudo, re_pseudo_weight, re_config, re_model_out,
                         re_history_out.empty() ? std::nullopt
                                                : std::optional<fs::path>(re_history_out));
    }
    if (eval_cmd->parsed()) return run_eval(eval_model, eval_test, eval_report);
    if (exp_cmd->parsed()) {
      return run_experiment_cmd(exp_config, exp_out.empty() ? std::nullopt
                                                            : std::optional<fs::path>(exp_out));
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace overlapcheck
