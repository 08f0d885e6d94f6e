#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "semloss/adam.hpp"
#include "semloss/checkpoint.hpp"
#include "semloss/decoding.hpp"
#include "semloss/errors.hpp"
#include "semloss/trainer.hpp"
#include "support/tmpfile.hpp"

using namespace semloss;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed on destruction.
struct TmpDir {
  std::string dir;
  TmpDir() {
    static int counter = 0;
    dir = (fs::temp_directory_path() /
           ("semloss_train_" + std::to_string(::getpid()) + "_" + std::to_string(counter++)))
              .string();
    fs::create_directories(dir);
  }
  ~TmpDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return dir + "/" + name; }
};

// Copy task: the agent repeats the user's two words. Learnable by a tiny
// model in a couple hundred steps.
std::vector<Dialogue> copy_corpus(int count) {
  const char* words[] = {"red", "blue", "green", "gold", "pink", "gray", "teal", "plum"};
  std::vector<Dialogue> out;
  for (int i = 0; i < count; ++i) {
    std::string a = words[i % 8], b = words[(i / 8 + i) % 8];
    Dialogue d;
    d.id = "copy-" + std::to_string(i);
    d.turns.push_back({Turn::Speaker::user, a + " " + b, {a, b}});
    d.turns.push_back({Turn::Speaker::agent, a + " " + b, {a, b}});
    out.push_back(std::move(d));
  }
  return out;
}

TrainingConfig small_config() {
  TrainingConfig cfg;
  cfg.alpha = 0.0;
  cfg.hidden_size = 8;
  cfg.embedding_size = 8;
  cfg.batch_size = 8;
  cfg.epochs = 2;
  cfg.seeds = {1};
  cfg.eval_every = 4;
  cfg.max_decode_len = 6;
  cfg.valid_percent = 0;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// 8-dim vectors for the copy-task words, one distinct axis each.
std::string copy_embeddings_text() {
  const char* words[] = {"red", "blue", "green", "gold", "pink", "gray", "teal", "plum"};
  std::string text;
  for (int i = 0; i < 8; ++i) {
    text += words[i];
    for (int k = 0; k < 8; ++k) text += k == i ? " 1.0" : " 0.0";
    text += "\n";
  }
  return text;
}

// Minimal likelihood-only loop sharing the seeding, shuffling, and update
// rule. Its per-step losses define the reference trace.
std::vector<double> likelihood_only_trace(const TrainingConfig& cfg, const TrainInputs& in,
                                          uint64_t seed) {
  Rng rng(seed);
  ParamStore store;
  Model model(
      ModelConfig{static_cast<long>(in.vocab->size()), cfg.embedding_size, cfg.hidden_size},
      store);
  model.init(rng);
  Adam opt(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});

  const size_t n = in.train->size();
  std::vector<std::vector<int>> ctx(n), tgt(n);
  for (size_t i = 0; i < n; ++i) {
    ctx[i] = in.vocab->encode((*in.train)[i].context);
    tgt[i] = in.vocab->encode((*in.train)[i].target);
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> trace;
  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(Stream::data, order);
    for (size_t start = 0; start < n; start += static_cast<size_t>(cfg.batch_size)) {
      size_t stop = std::min(n, start + static_cast<size_t>(cfg.batch_size));
      Graph g;
      std::vector<std::vector<NodeId>> lps;
      for (size_t b = start; b < stop; ++b)
        lps.push_back(model.teacher_forced_logprobs(g, ctx[order[b]], tgt[order[b]]));
      NodeId loss = nll_loss(g, lps);
      trace.push_back(g.value(loss).item());
      g.backward(loss);
      opt.step(g.param_grads());
    }
  }
  return trace;
}

// Split + vocab + bigrams bundle so tests can call train_single directly.
struct Prepared {
  SplitResult split;
  Vocabulary vocab;
  EmbeddingTable table;
  BigramStats bigrams;
  TrainInputs inputs;

  Prepared(const std::vector<Dialogue>& dialogues, const TrainingConfig& cfg)
      : split(split_corpus(dialogues, cfg)), vocab(Vocabulary::build(split.train, cfg.min_count)) {
    if (!cfg.embedding_file.empty()) table = EmbeddingTable::load(cfg.embedding_file);
    std::vector<std::vector<std::string>> targets;
    for (const auto& p : split.train) targets.push_back(strip_specials(p.target));
    bigrams = bigram_stats(targets);
    inputs = {&split.train, &split.valid, &vocab, &table, &bigrams};
  }
};

// Tag-stack well-formedness scan, enough to catch unbalanced or unquoted
// SVG output.
bool xml_well_formed(const std::string& text) {
  size_t i = text.find('<');
  std::vector<std::string> stack;
  while (i != std::string::npos) {
    size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    if (!tag.empty() && tag[0] == '?') {
      // declaration
    } else if (!tag.empty() && tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (!tag.empty() && tag.back() == '/') {
      // self-closing
    } else if (!tag.empty()) {
      size_t sp = tag.find_first_of(" \t\n");
      stack.push_back(sp == std::string::npos ? tag : tag.substr(0, sp));
    }
    i = text.find('<', end);
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("split is deterministic and keyed by dialogue id, not position") {
  auto dialogues = copy_corpus(200);
  TrainingConfig cfg;
  cfg.valid_percent = 10;

  SplitResult a = split_corpus(dialogues, cfg);
  SplitResult b = split_corpus(dialogues, cfg);
  REQUIRE(a.valid_dialogues.size() == b.valid_dialogues.size());
  for (size_t i = 0; i < a.valid_dialogues.size(); ++i)
    CHECK(a.valid_dialogues[i].id == b.valid_dialogues[i].id);

  // membership survives reordering the input
  auto shuffled = dialogues;
  std::reverse(shuffled.begin(), shuffled.end());
  SplitResult c = split_corpus(shuffled, cfg);
  std::set<std::string> want, got;
  for (const auto& d : a.valid_dialogues) want.insert(d.id);
  for (const auto& d : c.valid_dialogues) got.insert(d.id);
  CHECK(want == got);

  // a 10% target lands in a plausible band over 200 dialogues
  CHECK(a.valid_dialogues.size() >= 8);
  CHECK(a.valid_dialogues.size() <= 40);
  CHECK(a.train_dialogues.size() + a.valid_dialogues.size() == dialogues.size());

  cfg.valid_percent = 0;
  SplitResult none = split_corpus(dialogues, cfg);
  CHECK(none.valid_dialogues.empty());
  CHECK(none.train.size() == dialogues.size());
}

TEST_CASE("explicit id file overrides the hash split") {
  auto dialogues = copy_corpus(10);
  testsupport::TmpFile ids("copy-3\ncopy-7\n");
  TrainingConfig cfg;
  cfg.valid_ids_file = ids.path();
  SplitResult s = split_corpus(dialogues, cfg);
  REQUIRE(s.valid_dialogues.size() == 2);
  CHECK(s.valid_dialogues[0].id == "copy-3");
  CHECK(s.valid_dialogues[1].id == "copy-7");
  CHECK(s.train_dialogues.size() == 8);

  cfg.valid_ids_file = "/nonexistent/ids.txt";
  CHECK_THROWS_AS(split_corpus(dialogues, cfg), IoError);
}

TEST_CASE("likelihood on the copy task falls across every 50-step window") {
  auto dialogues = copy_corpus(16);
  TrainingConfig cfg = small_config();
  cfg.epochs = 100;  // 2 steps per epoch -> 200 steps
  Prepared prep(dialogues, cfg);
  TmpDir out;

  RunRecord rec = train_single(cfg, prep.inputs, 1, out.path("run"));
  REQUIRE(!rec.diverged);
  REQUIRE(rec.loss_series.size() == 200);

  constexpr size_t W = 50;
  auto window_mean = [&](size_t start) {
    double s = 0.0;
    for (size_t i = start; i < start + W; ++i) s += rec.loss_series[i].loss.mle_loss;
    return s / W;
  };
  for (size_t start = 1; start + W <= rec.loss_series.size(); ++start)
    CHECK(window_mean(start) < window_mean(start - 1));
  CHECK(rec.loss_series.back().loss.mle_loss < rec.loss_series.front().loss.mle_loss);
}

TEST_CASE("same seed, same trace; the training log file is byte-stable") {
  auto dialogues = copy_corpus(12);
  TrainingConfig cfg = small_config();
  cfg.epochs = 6;
  Prepared prep(dialogues, cfg);

  TmpDir out;
  RunRecord a = train_single(cfg, prep.inputs, 5, out.path("a"));
  RunRecord b = train_single(cfg, prep.inputs, 5, out.path("b"));
  REQUIRE(a.loss_series.size() == b.loss_series.size());
  for (size_t i = 0; i < a.loss_series.size(); ++i) {
    CHECK(a.loss_series[i].loss.total == b.loss_series[i].loss.total);  // bitwise
    CHECK(a.loss_series[i].loss.mle_loss == b.loss_series[i].loss.mle_loss);
  }
  CHECK(read_file(out.path("a") + "/train_log.csv") == read_file(out.path("b") + "/train_log.csv"));
  CHECK(read_file(out.path("a") + "/model.ckpt") == read_file(out.path("b") + "/model.ckpt"));

  RunRecord c = train_single(cfg, prep.inputs, 6, out.path("c"));
  bool same = a.loss_series.size() == c.loss_series.size();
  if (same)
    for (size_t i = 0; i < a.loss_series.size(); ++i)
      same = same && a.loss_series[i].loss.total == c.loss_series[i].loss.total;
  CHECK(!same);  // a different seed takes a different path
}

TEST_CASE("with the reinforcement term off, the trace matches a likelihood-only loop bitwise") {
  auto dialogues = copy_corpus(12);
  TrainingConfig cfg = small_config();
  cfg.epochs = 8;
  Prepared prep(dialogues, cfg);
  TmpDir out;

  RunRecord rec = train_single(cfg, prep.inputs, 3, out.path("run"));
  std::vector<double> reference = likelihood_only_trace(cfg, prep.inputs, 3);
  REQUIRE(rec.loss_series.size() == reference.size());
  for (size_t i = 0; i < reference.size(); ++i) {
    CHECK(rec.loss_series[i].loss.mle_loss == reference[i]);  // bitwise
    CHECK(rec.loss_series[i].loss.total == reference[i]);
    CHECK(rec.loss_series[i].loss.sem_loss == 0.0);
    CHECK(rec.loss_series[i].loss.advantage == 0.0);
  }
}

TEST_CASE("reinforcement term on: runs, logs the extra columns, stays deterministic") {
  auto dialogues = copy_corpus(12);
  testsupport::TmpFile emb(copy_embeddings_text());
  TrainingConfig cfg = small_config();
  cfg.alpha = 0.1;
  cfg.embedding_file = emb.path();
  cfg.epochs = 4;
  Prepared prep(dialogues, cfg);
  TmpDir out;

  RunRecord a = train_single(cfg, prep.inputs, 2, out.path("a"));
  REQUIRE(!a.diverged);
  bool saw_distance = false;
  for (const auto& p : a.loss_series) {
    CHECK(p.loss.alpha == 0.1);
    CHECK(p.loss.total == doctest::Approx(p.loss.mle_loss + 0.1 * p.loss.sem_loss));
    if (p.loss.d_sem != 0.0) saw_distance = true;
  }
  CHECK(saw_distance);

  RunRecord b = train_single(cfg, prep.inputs, 2, out.path("b"));
  CHECK(read_file(out.path("a") + "/train_log.csv") == read_file(out.path("b") + "/train_log.csv"));
}

TEST_CASE("evaluation: a model trained to a constant reply scores BLEU 1 on matching references") {
  // every target is the same two-token reply, so greedy decoding must
  // reproduce the references exactly once trained
  std::vector<Dialogue> dialogues;
  const char* contexts[] = {"red blue", "green gold", "pink gray", "teal plum"};
  for (int i = 0; i < 4; ++i) {
    Dialogue d;
    d.id = "const-" + std::to_string(i);
    d.turns.push_back({Turn::Speaker::user, contexts[i], tokenize(contexts[i])});
    d.turns.push_back({Turn::Speaker::agent, "ok sure", {"ok", "sure"}});
    dialogues.push_back(std::move(d));
  }
  TrainingConfig cfg = small_config();
  cfg.epochs = 150;  // 1 step per epoch at batch 8
  Prepared prep(dialogues, cfg);
  TmpDir out;
  RunRecord rec = train_single(cfg, prep.inputs, 1, out.path("run"));
  REQUIRE(!rec.diverged);

  ParamStore store;
  Model model(ModelConfig{static_cast<long>(prep.vocab.size()), cfg.embedding_size,
                          cfg.hidden_size},
              store);
  Checkpoint::load(rec.checkpoint_path).restore_into(store);
  MetricsReport report =
      evaluate(model, prep.vocab, prep.split.train, prep.bigrams, prep.table, cfg.max_decode_len);
  CHECK(report.bleu == 1.0);
  CHECK(report.unseen_frac == 0.0);  // replies were memorized from training
}

TEST_CASE("evaluation: an untrained near-uniform model scores essentially zero BLEU") {
  // wide vocabulary, so chance unigram overlap cannot prop up the score
  std::vector<Dialogue> dialogues;
  for (int i = 0; i < 40; ++i) {
    std::string a = "item" + std::to_string(i), b = "item" + std::to_string((i + 11) % 40);
    Dialogue d;
    d.id = "wide-" + std::to_string(i);
    d.turns.push_back({Turn::Speaker::user, a + " " + b, {a, b}});
    d.turns.push_back({Turn::Speaker::agent, b + " " + a, {b, a}});
    dialogues.push_back(std::move(d));
  }
  TrainingConfig cfg = small_config();
  Prepared prep(dialogues, cfg);

  ParamStore store;
  Model model(ModelConfig{static_cast<long>(prep.vocab.size()), cfg.embedding_size,
                          cfg.hidden_size},
              store);
  Rng rng(1234);
  model.init(rng);
  MetricsReport report =
      evaluate(model, prep.vocab, prep.split.train, prep.bigrams, prep.table, cfg.max_decode_len);
  CHECK(report.bleu < 0.01);
}

TEST_CASE("evaluation refuses an empty validation set") {
  auto dialogues = copy_corpus(4);
  TrainingConfig cfg = small_config();
  Prepared prep(dialogues, cfg);
  ParamStore store;
  Model model(ModelConfig{static_cast<long>(prep.vocab.size()), 4, 4}, store);
  std::vector<TrainingPair> empty;
  CHECK_THROWS_AS(evaluate(model, prep.vocab, empty, prep.bigrams, prep.table, 5), ContractError);
}

TEST_CASE("checkpoint from a run reproduces the final evaluation exactly") {
  auto dialogues = copy_corpus(30);
  TrainingConfig cfg = small_config();
  cfg.valid_percent = 20;
  cfg.epochs = 5;
  cfg.eval_every = 3;
  Prepared prep(dialogues, cfg);
  REQUIRE(!prep.split.valid.empty());
  TmpDir out;

  RunRecord rec = train_single(cfg, prep.inputs, 9, out.path("run"));
  REQUIRE(!rec.eval_series.empty());
  const MetricsReport& want = rec.eval_series.back().metrics;

  Checkpoint ck = Checkpoint::load(rec.checkpoint_path);
  ck.require_vocab(prep.vocab);
  TrainingConfig from_snapshot = TrainingConfig::from_text(ck.config_text);
  CHECK(from_snapshot.hidden_size == cfg.hidden_size);

  ParamStore store;
  Model model(ModelConfig{static_cast<long>(prep.vocab.size()), from_snapshot.embedding_size,
                          from_snapshot.hidden_size},
              store);
  ck.restore_into(store);
  MetricsReport got =
      evaluate(model, prep.vocab, prep.split.valid, prep.bigrams, prep.table, cfg.max_decode_len);

  CHECK(got.bleu == want.bleu);  // bitwise, all of them
  CHECK(got.distinct1 == want.distinct1);
  CHECK(got.distinct2 == want.distinct2);
  CHECK(got.unseen_frac == want.unseen_frac);
  CHECK(got.word_repeat_frac == want.word_repeat_frac);
  CHECK(got.mean_d_sem == want.mean_d_sem);
}

TEST_CASE("an absurd learning rate trips the divergence detector, not a crash") {
  auto dialogues = copy_corpus(16);
  TrainingConfig cfg = small_config();
  cfg.learning_rate = 30.0;
  cfg.epochs = 40;
  Prepared prep(dialogues, cfg);
  TmpDir out;

  RunRecord rec = train_single(cfg, prep.inputs, 1, out.path("run"));
  CHECK(rec.diverged);
  CHECK(rec.divergence_step >= 1);
  CHECK(!rec.divergence_reason.empty());
  CHECK(rec.loss_series.size() == static_cast<size_t>(rec.divergence_step));

  // the last healthy snapshot survives and still loads
  CHECK(fs::exists(rec.checkpoint_path));
  Checkpoint ck = Checkpoint::load(rec.checkpoint_path);
  ParamStore store;
  Model model(ModelConfig{static_cast<long>(prep.vocab.size()), cfg.embedding_size,
                          cfg.hidden_size},
              store);
  CHECK_NOTHROW(ck.restore_into(store));
  CHECK(fs::exists(out.path("run") + "/train_log.csv"));
}

TEST_CASE("run selection: highest final BLEU") {
  auto record_with_bleus = [](uint64_t seed, std::vector<double> bleus) {
    RunRecord r;
    r.seed = seed;
    long step = 0;
    for (double b : bleus) {
      MetricsReport m;
      m.bleu = b;
      r.eval_series.push_back({step += 10, m});
    }
    return r;
  };
  std::vector<RunRecord> records;
  records.push_back(record_with_bleus(1, {0.30, 0.10}));  // high early, low final
  records.push_back(record_with_bleus(2, {0.05, 0.12}));
  records.push_back(record_with_bleus(3, {0.08, 0.11}));
  CHECK(select_run(records, SelectCriterion::best_bleu).seed == 2);

  CHECK_THROWS_AS(select_run({}, SelectCriterion::best_bleu), ContractError);
  std::vector<RunRecord> no_evals(2);
  CHECK_THROWS_AS(select_run(no_evals, SelectCriterion::best_bleu), ContractError);
}

TEST_CASE("run selection: earliest to reach 98 percent of its own distinct-2 peak") {
  auto record_with_d2 = [](uint64_t seed, std::vector<double> d2s) {
    RunRecord r;
    r.seed = seed;
    long step = 0;
    for (double d : d2s) {
      MetricsReport m;
      m.distinct2 = d;
      r.eval_series.push_back({step += 50, m});
    }
    return r;
  };
  std::vector<RunRecord> records;
  records.push_back(record_with_d2(1, {0.10, 0.50, 0.51}));  // saturates at step 100
  records.push_back(record_with_d2(2, {0.52, 0.50, 0.52}));  // already at peak at step 50
  CHECK(select_run(records, SelectCriterion::distinct2_early_saturation).seed == 2);

  // ties go to the first record
  std::vector<RunRecord> tied;
  tied.push_back(record_with_d2(7, {0.40, 0.40}));
  tied.push_back(record_with_d2(8, {0.40, 0.40}));
  CHECK(select_run(tied, SelectCriterion::distinct2_early_saturation).seed == 7);
}

TEST_CASE("csv writers: exact headers, one parseable row per point") {
  RunRecord r;
  r.seed = 4;
  LossBreakdown bd{1.5, -0.25, 0.5, 0.125, 0.1, 1.5};
  r.loss_series.push_back({1, bd});
  MetricsReport m;
  m.bleu = 0.5;
  r.eval_series.push_back({10, m});

  TmpDir out;
  write_train_log_csv(r, out.path("log.csv"));
  std::string log = read_file(out.path("log.csv"));
  CHECK(log == "step,mle_loss,sem_loss,d_sem,advantage,alpha,total\n"
               "1,1.5,-0.25,0.5,0.125,0.10000000000000001,1.5\n");

  write_metrics_csv(r, out.path("metrics.csv"));
  std::string metrics = read_file(out.path("metrics.csv"));
  CHECK(metrics.substr(0, metrics.find('\n')) ==
        "step,bleu,distinct1,distinct2,unseen_frac,word_repeat_frac,mean_d_sem");
  CHECK(metrics.find("\n10,0.5,") != std::string::npos);
}

TEST_CASE("combined report: per-step mean with min and max across runs") {
  auto rec = [](uint64_t seed, double bleu_at_50) {
    RunRecord r;
    r.seed = seed;
    MetricsReport m;
    m.bleu = bleu_at_50;
    m.distinct1 = 0.5;
    r.eval_series.push_back({50, m});
    return r;
  };
  std::vector<RunRecord> records{rec(1, 0.2), rec(2, 0.4)};
  TmpDir out;
  emit_reports(records, out.dir);

  std::string csv = read_file(out.path("metrics_combined.csv"));
  std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "step,bleu_mean,bleu_min,bleu_max,distinct1_mean,distinct1_min,distinct1_max,"
        "distinct2_mean,distinct2_min,distinct2_max,unseen_frac_mean,unseen_frac_min,"
        "unseen_frac_max,word_repeat_frac_mean,word_repeat_frac_min,word_repeat_frac_max,"
        "mean_d_sem_mean,mean_d_sem_min,mean_d_sem_max");
  CHECK(csv.find("\n50,0.3,0.2,0.4,0.5,0.5,0.5,") != std::string::npos);

  for (const char* name : {"bleu", "distinct1", "distinct2", "unseen_frac", "word_repeat_frac",
                           "mean_d_sem"}) {
    std::string svg = read_file(out.path(std::string(name) + ".svg"));
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(xml_well_formed(svg));
    CHECK(svg.find("<polyline") != std::string::npos);
  }

  CHECK_THROWS_AS(emit_reports({}, out.dir), ContractError);
}

TEST_CASE("reports refuse an unwritable destination") {
  TmpDir out;
  std::ofstream(out.path("blocker")) << "x";
  RunRecord r;
  r.seed = 1;
  MetricsReport m;
  r.eval_series.push_back({1, m});
  CHECK_THROWS_AS(emit_reports({r}, out.path("blocker")), IoError);
}

TEST_CASE("full pipeline: per-seed artifacts, shared vocabulary, reproducible logs") {
  auto dialogues = copy_corpus(30);
  TrainingConfig cfg = small_config();
  cfg.seeds = {3, 4};
  cfg.valid_percent = 20;
  cfg.epochs = 3;
  cfg.eval_every = 2;
  TmpDir out_a, out_b;

  std::vector<RunRecord> records = train(cfg, dialogues, out_a.dir);
  REQUIRE(records.size() == 2);
  CHECK(records[0].seed == 3);
  CHECK(records[1].seed == 4);
  for (const auto& r : records) {
    CHECK(!r.diverged);
    CHECK(!r.eval_series.empty());
    std::string run_dir = out_a.dir + "/seed_" + std::to_string(r.seed);
    CHECK(fs::exists(run_dir + "/train_log.csv"));
    CHECK(fs::exists(run_dir + "/metrics.csv"));
    CHECK(fs::exists(run_dir + "/model.ckpt"));
  }
  CHECK(fs::exists(out_a.path("vocab.txt")));
  CHECK(fs::exists(out_a.path("config.txt")));
  CHECK(fs::exists(out_a.path("metrics_combined.csv")));
  CHECK(fs::exists(out_a.path("bleu.svg")));

  Vocabulary vocab = Vocabulary::load(out_a.path("vocab.txt"));
  Checkpoint ck = Checkpoint::load(out_a.dir + "/seed_3/model.ckpt");
  CHECK_NOTHROW(ck.require_vocab(vocab));

  // a second pipeline run reproduces the logs byte for byte
  train(cfg, dialogues, out_b.dir);
  CHECK(read_file(out_a.dir + "/seed_3/train_log.csv") ==
        read_file(out_b.dir + "/seed_3/train_log.csv"));
  CHECK(read_file(out_a.dir + "/seed_4/metrics.csv") ==
        read_file(out_b.dir + "/seed_4/metrics.csv"));
  CHECK(read_file(out_a.path("metrics_combined.csv")) ==
        read_file(out_b.path("metrics_combined.csv")));

  // invalid configs are rejected before any work happens
  TrainingConfig bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(train(bad, dialogues, out_a.dir), ConfigError);
}
