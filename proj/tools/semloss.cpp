// Command-line front end: prepare / train / eval / generate / compare-beams.
// Exit codes: 0 success, 1 runtime failure (bad data, divergence,
// incompatible checkpoint), 2 usage or config errors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "semloss/checkpoint.hpp"
#include "semloss/config.hpp"
#include "semloss/corpus.hpp"
#include "semloss/decoding.hpp"
#include "semloss/embeddings.hpp"
#include "semloss/errors.hpp"
#include "semloss/metrics.hpp"
#include "semloss/model.hpp"
#include "semloss/rng.hpp"
#include "semloss/trainer.hpp"

namespace fs = std::filesystem;
using namespace semloss;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

// Sorted listing of every artifact under out_dir, one relative path per line.
void write_manifest(const fs::path& out_dir) {
  std::vector<std::string> rel;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.txt") continue;
    rel.push_back(fs::relative(entry.path(), out_dir).generic_string());
  }
  std::sort(rel.begin(), rel.end());
  fs::path path = out_dir / "manifest.txt";
  std::ofstream out = open_out(path);
  for (const auto& r : rel) out << r << "\n";
  finish_out(out, path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

std::vector<Dialogue> load_corpus_reporting(const std::string& path) {
  LoadReport report;
  std::vector<Dialogue> dialogues = load_corpus(path, &report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return dialogues;
}

// Checkpoint plus everything needed to run it: config, vocabulary, weights.
struct LoadedModel {
  TrainingConfig cfg;
  Vocabulary vocab;
  ParamStore store;
  Model model;

  explicit LoadedModel(const Checkpoint& ck)
      : cfg(TrainingConfig::from_text(ck.config_text)),
        vocab(ck.vocabulary()),
        model(ModelConfig{vocab.size(), cfg.embedding_size, cfg.hidden_size}, store) {
    ck.restore_into(store);
  }
};

std::vector<int> encode_context(const Vocabulary& vocab, const std::string& line) {
  std::vector<std::string> tokens = tokenize(line);
  if (tokens.empty()) tokens.push_back("<sep>");  // same placeholder pairing uses
  return vocab.encode(tokens);
}

// ---------------------------------------------------------------- prepare

struct PrepareCmd {
  CLI::App* sub = nullptr;
  std::string corpus;
  std::string out_dir;
  std::string valid_ids_file;
  long min_count = 1;
  long context_cap = 256;
  long valid_percent = 10;

  void attach(CLI::App& app) {
    sub = app.add_subcommand("prepare",
                             "Split a corpus, build the vocabulary, and write bigram statistics");
    sub->add_option("--corpus", corpus, "Dialogue corpus, one JSON object per line")->required();
    sub->add_option("--out-dir", out_dir, "Directory for the prepared artifacts")->required();
    sub->add_option("--min-count", min_count, "Minimum token frequency kept in the vocabulary");
    sub->add_option("--context-cap", context_cap, "Maximum context length in tokens");
    sub->add_option("--valid-percent", valid_percent,
                    "Share of dialogues held out for validation (0-99)");
    sub->add_option("--valid-ids-file", valid_ids_file,
                    "Explicit validation dialogue ids, one per line (overrides --valid-percent)");
  }

  void write_pairs(const fs::path& path, const std::vector<TrainingPair>& pairs) const {
    std::ofstream out = open_out(path);
    for (const auto& p : pairs)
      out << p.dialogue_id << "\t" << join(p.context) << "\t" << join(p.target) << "\n";
    finish_out(out, path);
  }

  static BigramStats side_bigrams(const std::vector<TrainingPair>& pairs, bool target_side) {
    std::vector<std::vector<std::string>> sentences;
    sentences.reserve(pairs.size());
    for (const auto& p : pairs) sentences.push_back(strip_specials(target_side ? p.target : p.context));
    return bigram_stats(sentences);
  }

  static void write_bigrams(const fs::path& path, const BigramStats& stats) {
    std::map<std::string, long> sorted(stats.counts.begin(), stats.counts.end());
    std::ofstream out = open_out(path);
    for (const auto& [bigram, count] : sorted) out << bigram << "\t" << count << "\n";
    finish_out(out, path);
  }

  int run() const {
    std::string problems;
    if (min_count < 1) problems += "min-count must be >= 1; ";
    if (context_cap < 1) problems += "context-cap must be >= 1; ";
    if (valid_percent < 0 || valid_percent > 99) problems += "valid-percent must be in [0, 99]; ";
    if (!problems.empty()) throw ConfigError(problems.substr(0, problems.size() - 2));

    TrainingConfig cfg;
    cfg.min_count = min_count;
    cfg.context_cap = context_cap;
    cfg.valid_percent = valid_percent;
    cfg.valid_ids_file = valid_ids_file;

    std::vector<Dialogue> dialogues = load_corpus_reporting(corpus);
    SplitResult split = split_corpus(dialogues, cfg);
    Vocabulary vocab = Vocabulary::build(split.train, min_count);

    ensure_dir(out_dir);
    fs::path root(out_dir);
    vocab.save((root / "vocab.txt").string());
    write_pairs(root / "train_pairs.tsv", split.train);
    write_pairs(root / "valid_pairs.tsv", split.valid);

    BigramStats ctx = side_bigrams(split.train, false);
    BigramStats tgt = side_bigrams(split.train, true);
    write_bigrams(root / "context_bigrams.tsv", ctx);
    write_bigrams(root / "target_bigrams.tsv", tgt);

    std::string summary;
    summary += "dialogues=" + std::to_string(static_cast<long>(dialogues.size())) + "\n";
    summary += "train_pairs=" + std::to_string(static_cast<long>(split.train.size())) + "\n";
    summary += "valid_pairs=" + std::to_string(static_cast<long>(split.valid.size())) + "\n";
    summary += "vocab_size=" + std::to_string(vocab.size()) + "\n";
    summary += "context_bigrams_total=" + std::to_string(ctx.total) + "\n";
    summary += "context_bigrams_unique=" + std::to_string(ctx.unique()) + "\n";
    summary += "context_bigrams_average_occurrence=" + fmt17(ctx.average_occurrence()) + "\n";
    summary += "target_bigrams_total=" + std::to_string(tgt.total) + "\n";
    summary += "target_bigrams_unique=" + std::to_string(tgt.unique()) + "\n";
    summary += "target_bigrams_average_occurrence=" + fmt17(tgt.average_occurrence()) + "\n";

    fs::path summary_path = root / "summary.txt";
    std::ofstream out = open_out(summary_path);
    out << summary;
    finish_out(out, summary_path);
    write_manifest(root);

    std::cout << summary;
    return 0;
  }
};

// ------------------------------------------------------------------ train

struct TrainCmd {
  CLI::App* sub = nullptr;
  std::string corpus;
  std::string out_dir;
  std::string config_file;
  bool alpha_sweep = false;

  struct Override {
    CLI::Option* opt;
    std::string key;
    std::shared_ptr<std::string> value;
  };
  std::vector<Override> overrides;

  void add(const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = sub->add_option(flag, *value, help);
    overrides.push_back({opt, key, value});
  }

  void attach(CLI::App& app) {
    sub = app.add_subcommand("train", "Train one model per seed and write all run artifacts");
    sub->add_option("--corpus", corpus, "Dialogue corpus, one JSON object per line")->required();
    sub->add_option("--out-dir", out_dir, "Directory for checkpoints, logs, and reports")->required();
    sub->add_option("--config", config_file, "key=value config file; flags below override it");
    sub->add_flag("--alpha-sweep", alpha_sweep,
                  "Repeat the run for each grid value of the semantic weight");
    add("--alpha", "alpha", "Weight of the semantic reward term");
    add("--learning-rate", "learning_rate", "Adam learning rate");
    add("--hidden-size", "hidden_size", "Recurrent state width");
    add("--embedding-size", "embedding_size", "Input embedding width");
    add("--batch-size", "batch_size", "Pairs per optimizer step");
    add("--epochs", "epochs", "Passes over the training pairs");
    add("--seeds", "seeds", "Comma-separated seeds, one training run each");
    add("--p-drop", "p_drop", "Chance of masking the argmax token while sampling");
    add("--baseline-window", "baseline_window", "Reward baseline window length");
    add("--eval-every", "eval_every", "Steps between validation evaluations");
    add("--embedding-file", "embedding_file", "Word embedding table (text format)");
    add("--init-mode", "init_mode", "Input embedding init: random or from-table");
    add("--max-decode-len", "max_decode_len", "Response length cap when decoding");
    add("--context-cap", "context_cap", "Maximum context length in tokens");
    add("--min-count", "min_count", "Minimum token frequency kept in the vocabulary");
    add("--valid-percent", "valid_percent", "Share of dialogues held out for validation");
    add("--valid-ids-file", "valid_ids_file", "Explicit validation dialogue ids, one per line");
  }

  TrainingConfig build_config() const {
    TrainingConfig cfg =
        config_file.empty() ? TrainingConfig() : TrainingConfig::load(config_file);
    for (const auto& o : overrides)
      if (o.opt->count() > 0) cfg.apply(o.key, *o.value);
    cfg.validate();
    return cfg;
  }

  static bool report_runs(const std::vector<RunRecord>& records, const std::string& run_root) {
    bool any_diverged = false;
    for (const auto& r : records) {
      std::string line = "seed " + std::to_string(r.seed) + ": steps=" +
                         std::to_string(static_cast<long>(r.loss_series.size()));
      if (!r.eval_series.empty()) {
        const MetricsReport& m = r.eval_series.back().metrics;
        line += " bleu=" + fmt_short(m.bleu) + " distinct2=" + fmt_short(m.distinct2) +
                " unseen=" + fmt_short(m.unseen_frac);
      }
      if (r.diverged) {
        any_diverged = true;
        line += " DIVERGED at step " + std::to_string(r.divergence_step) + " (" +
                r.divergence_reason + "); last good checkpoint kept at " + r.checkpoint_path;
      }
      std::cout << line << "\n";
    }
    if (!any_diverged) {
      bool have_evals = false;
      for (const auto& r : records) have_evals = have_evals || !r.eval_series.empty();
      if (have_evals) {
        const RunRecord& best = select_run(records, SelectCriterion::best_bleu);
        std::cout << "best run (final bleu): seed " << best.seed << " -> " << best.checkpoint_path
                  << "\n";
      }
    }
    std::cout << "artifacts under " << run_root << "\n";
    return any_diverged;
  }

  int run() const {
    TrainingConfig cfg = build_config();
    std::vector<Dialogue> dialogues = load_corpus_reporting(corpus);

    bool any_diverged = false;
    if (alpha_sweep) {
      std::string sweep_csv =
          "alpha,seed,steps,diverged,bleu,distinct1,distinct2,unseen_frac,word_repeat_frac,"
          "mean_d_sem\n";
      for (double alpha : alpha_sweep_values()) {
        char tag[32];
        std::snprintf(tag, sizeof(tag), "alpha_%g", alpha);
        TrainingConfig variant = cfg;
        variant.alpha = alpha;
        std::string sub_dir = out_dir + "/" + tag;
        std::cout << "== " << tag << "\n";
        std::vector<RunRecord> records = train(variant, dialogues, sub_dir);
        any_diverged = report_runs(records, sub_dir) || any_diverged;
        for (const auto& r : records) {
          sweep_csv += fmt17(alpha) + "," + std::to_string(r.seed) + "," +
                       std::to_string(static_cast<long>(r.loss_series.size())) + "," +
                       (r.diverged ? "1" : "0");
          if (r.eval_series.empty()) {
            sweep_csv += ",,,,,,";
          } else {
            const MetricsReport& m = r.eval_series.back().metrics;
            for (double v : {m.bleu, m.distinct1, m.distinct2,
                             m.unseen_frac, m.word_repeat_frac, m.mean_d_sem})
              sweep_csv += "," + fmt17(v);
          }
          sweep_csv += "\n";
        }
      }
      fs::path path = fs::path(out_dir) / "sweep_summary.csv";
      std::ofstream out = open_out(path);
      out << sweep_csv;
      finish_out(out, path);
    } else {
      std::vector<RunRecord> records = train(cfg, dialogues, out_dir);
      any_diverged = report_runs(records, out_dir);
    }

    write_manifest(out_dir);
    if (any_diverged) {
      std::cerr << "error: at least one run diverged; see logs above\n";
      return 1;
    }
    return 0;
  }
};

// ------------------------------------------------------------------- eval

struct EvalCmd {
  CLI::App* sub = nullptr;
  std::string checkpoint;
  std::string corpus;
  std::string embedding_file;
  std::string split = "valid";

  void attach(CLI::App& app) {
    sub = app.add_subcommand("eval", "Score a checkpoint's responses on held-out dialogues");
    sub->add_option("--checkpoint", checkpoint, "Model checkpoint to evaluate")->required();
    sub->add_option("--corpus", corpus, "Corpus the checkpoint was trained from")->required();
    sub->add_option("--embedding-file", embedding_file,
                    "Word embedding table; defaults to the one recorded in the checkpoint");
    sub->add_option("--split", split, "Which pairs to score")
        ->check(CLI::IsMember({"valid", "all"}));
  }

  int run() const {
    Checkpoint ck = Checkpoint::load(checkpoint);
    TrainingConfig cfg = TrainingConfig::from_text(ck.config_text);
    if (!embedding_file.empty()) cfg.embedding_file = embedding_file;

    std::vector<Dialogue> dialogues = load_corpus_reporting(corpus);
    SplitResult sp = split_corpus(dialogues, cfg);
    Vocabulary vocab = Vocabulary::build(sp.train, cfg.min_count);
    ck.require_vocab(vocab);  // refuses checkpoints trained against another vocabulary

    ParamStore store;
    Model model(ModelConfig{vocab.size(), cfg.embedding_size, cfg.hidden_size}, store);
    ck.restore_into(store);

    EmbeddingTable table;
    if (!cfg.embedding_file.empty()) table = EmbeddingTable::load(cfg.embedding_file);

    std::vector<std::vector<std::string>> train_targets;
    train_targets.reserve(sp.train.size());
    for (const auto& p : sp.train) train_targets.push_back(strip_specials(p.target));
    BigramStats bigrams = bigram_stats(train_targets);

    std::vector<TrainingPair> pairs = sp.valid;
    if (split == "all") pairs.insert(pairs.begin(), sp.train.begin(), sp.train.end());

    MetricsReport metrics = evaluate(model, vocab, pairs, bigrams, table, cfg.max_decode_len);
    std::cout << "pairs scored    " << pairs.size() << "\n" << metrics.pretty();
    return 0;
  }
};

// --------------------------------------------------------------- generate

struct GenerateCmd {
  CLI::App* sub = nullptr;
  std::string checkpoint;
  std::string mode = "greedy";
  long beam_width = 5;
  long max_len = 0;
  uint64_t seed = 1;

  void attach(CLI::App& app) {
    sub = app.add_subcommand("generate",
                             "Read contexts from stdin and stream one response per line");
    sub->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
    sub->add_option("--mode", mode, "Decoding strategy")
        ->check(CLI::IsMember({"greedy", "sample", "beam"}));
    sub->add_option("--beam-width", beam_width, "Beam width for --mode beam")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-len", max_len,
                    "Response length cap; 0 keeps the checkpoint's setting");
    sub->add_option("--seed", seed, "Sampling seed for --mode sample");
  }

  int run() const {
    LoadedModel lm{Checkpoint::load(checkpoint)};
    long limit = max_len > 0 ? max_len : lm.cfg.max_decode_len;
    Rng rng(seed);

    std::string line;
    while (std::getline(std::cin, line)) {
      std::vector<int> ctx = encode_context(lm.vocab, line);
      std::vector<int> ids;
      if (mode == "greedy") {
        ids = greedy_decode(lm.model, ctx, limit);
      } else if (mode == "sample") {
        ids = sample_decode(lm.model, ctx, limit, rng);
      } else {
        std::vector<Hypothesis> hyps = beam_search(lm.model, ctx, beam_width, limit);
        if (!hyps.empty()) ids = hyps.front().ids;
      }
      std::cout << join(strip_specials(lm.vocab.decode(ids))) << "\n" << std::flush;
    }
    return 0;
  }
};

// ----------------------------------------------------------- compare-beams

struct CompareCmd {
  CLI::App* sub = nullptr;
  std::string checkpoint_a;
  std::string checkpoint_b;
  std::string contexts_file;
  std::string out_file;
  long beam_width = 5;

  void attach(CLI::App& app) {
    sub = app.add_subcommand("compare-beams",
                             "Decode the same contexts with two checkpoints, side by side");
    sub->add_option("--checkpoint-a", checkpoint_a, "First model checkpoint")->required();
    sub->add_option("--checkpoint-b", checkpoint_b, "Second model checkpoint")->required();
    sub->add_option("--contexts", contexts_file, "Context lines to decode")->required();
    sub->add_option("--beam-width", beam_width, "Hypotheses kept per model per context")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_file, "Write the comparison here instead of stdout");
  }

  static void emit(std::ostream& out, const std::string& label, const LoadedModel& lm,
                   const std::string& line, long beam_width) {
    std::vector<int> ctx = encode_context(lm.vocab, line);
    std::vector<Hypothesis> hyps = beam_search(lm.model, ctx, beam_width, lm.cfg.max_decode_len);
    out << label << ":\n";
    for (size_t i = 0; i < hyps.size(); ++i)
      out << "  " << (i + 1) << ". score=" << fmt17(hyps[i].score) << "  "
          << join(strip_specials(lm.vocab.decode(hyps[i].ids))) << "\n";
  }

  int run() const {
    LoadedModel a{Checkpoint::load(checkpoint_a)};
    LoadedModel b{Checkpoint::load(checkpoint_b)};

    std::ifstream in(contexts_file, std::ios::binary);
    if (!in) throw IoError("cannot read " + contexts_file);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_file.empty()) {
      file = open_out(out_file);
      out = &file;
    }

    *out << "model-a: " << checkpoint_a << "\n";
    *out << "model-b: " << checkpoint_b << "\n";
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
      *out << "== context " << ++n << ": " << line << "\n";
      emit(*out, "model-a", a, line, beam_width);
      emit(*out, "model-b", b, line, beam_width);
    }
    out->flush();
    if (!*out) throw IoError("failed writing comparison");
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Dialogue response models: likelihood training with a semantic reward term,\n"
      "decoding, and diversity metrics"};
  app.require_subcommand(1);

  PrepareCmd prepare;
  TrainCmd train;
  EvalCmd eval;
  GenerateCmd generate;
  CompareCmd compare;
  prepare.attach(app);
  train.attach(app);
  eval.attach(app);
  generate.attach(app);
  compare.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean, everything else is a usage error
  }

  try {
    if (*prepare.sub) return prepare.run();
    if (*train.sub) return train.run();
    if (*eval.sub) return eval.run();
    if (*generate.sub) return generate.run();
    if (*compare.sub) return compare.run();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
