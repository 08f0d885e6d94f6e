#include "semloss/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "semloss/adam.hpp"
#include "semloss/decoding.hpp"
#include "semloss/errors.hpp"
#include "semloss/rng.hpp"

namespace fs = std::filesystem;

namespace semloss {

namespace {

// Loss must grow more than tenfold over this many steps (and be clearly
// above the noise floor) before the run is declared divergent.
constexpr long kDivergenceWindow = 100;
constexpr double kDivergenceRatio = 10.0;
constexpr double kDivergenceFloor = 1.0;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::unordered_set<std::string> read_id_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open validation id file: " + path);
  std::unordered_set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.insert(line);
  }
  return ids;
}

void require_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir);
}

}  // namespace

SplitResult split_corpus(const std::vector<Dialogue>& dialogues, const TrainingConfig& cfg) {
  SplitResult out;
  if (!cfg.valid_ids_file.empty()) {
    auto valid_ids = read_id_file(cfg.valid_ids_file);
    for (const auto& d : dialogues)
      (valid_ids.count(d.id) ? out.valid_dialogues : out.train_dialogues).push_back(d);
  } else {
    for (const auto& d : dialogues) {
      bool valid = static_cast<long>(fnv1a64(d.id) % 100) < cfg.valid_percent;
      (valid ? out.valid_dialogues : out.train_dialogues).push_back(d);
    }
  }
  out.train = make_pairs(out.train_dialogues, cfg.context_cap);
  out.valid = make_pairs(out.valid_dialogues, cfg.context_cap);
  return out;
}

MetricsReport evaluate(const Model& model, const Vocabulary& vocab,
                       const std::vector<TrainingPair>& valid,
                       const BigramStats& train_target_bigrams, const EmbeddingTable& table,
                       long max_decode_len) {
  if (valid.empty()) throw ContractError("evaluate: validation set is empty");
  std::vector<std::vector<std::string>> candidates, references;
  candidates.reserve(valid.size());
  references.reserve(valid.size());
  for (const auto& pair : valid) {
    std::vector<int> ids = greedy_decode(model, vocab.encode(pair.context), max_decode_len);
    candidates.push_back(vocab.decode(ids));
    references.push_back(pair.target);
  }
  return compute_metrics(candidates, references, train_target_bigrams, table);
}

RunRecord train_single(const TrainingConfig& cfg, const TrainInputs& in, uint64_t seed,
                       const std::string& run_dir) {
  if (!in.train || !in.valid || !in.vocab || !in.table || !in.train_target_bigrams)
    throw ContractError("train_single: missing inputs");
  if (in.train->empty()) throw ContractError("train_single: no training pairs");
  require_dir(run_dir);

  const Vocabulary& vocab = *in.vocab;
  Rng rng(seed);
  ParamStore store;
  Model model(ModelConfig{static_cast<long>(vocab.size()), cfg.embedding_size, cfg.hidden_size},
              store);
  model.init(rng);
  if (cfg.init_mode == "from-table") {
    CoverageReport coverage;
    model.set_input_embeddings(
        init_input_embeddings(vocab, *in.table, cfg.embedding_size, rng, &coverage));
  }
  Adam opt(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
  RewardBaseline baseline(cfg.baseline_window);

  const size_t n = in.train->size();
  std::vector<std::vector<int>> ctx_ids(n), tgt_ids(n);
  for (size_t i = 0; i < n; ++i) {
    ctx_ids[i] = vocab.encode((*in.train)[i].context);
    tgt_ids[i] = vocab.encode((*in.train)[i].target);
  }

  RunRecord rec;
  rec.seed = seed;
  const std::string config_text = cfg.to_text();
  const std::string final_path = run_dir + "/model.ckpt";
  std::string last_good;
  auto snapshot = [&](long step) {
    std::string path = run_dir + "/ckpt_step" + std::to_string(step) + ".bin";
    Checkpoint::capture(store, vocab, config_text).save(path);
    last_good = path;
    rec.checkpoint_path = path;
  };
  snapshot(0);

  auto finish = [&]() {
    // model.ckpt mirrors the last healthy snapshot even after divergence.
    fs::copy_file(last_good, final_path, fs::copy_options::overwrite_existing);
    rec.checkpoint_path = final_path;
    write_train_log_csv(rec, run_dir + "/train_log.csv");
    write_metrics_csv(rec, run_dir + "/metrics.csv");
  };
  auto diverge = [&](long step, const std::string& why) {
    rec.diverged = true;
    rec.divergence_step = step;
    rec.divergence_reason = why;
    finish();
  };

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> mle_history;
  long step = 0;

  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(Stream::data, order);
    for (size_t start = 0; start < n; start += static_cast<size_t>(cfg.batch_size)) {
      ++step;
      size_t stop = std::min(n, start + static_cast<size_t>(cfg.batch_size));
      Graph g;
      std::vector<std::vector<NodeId>> batch_logprobs;
      for (size_t b = start; b < stop; ++b) {
        size_t i = order[b];
        batch_logprobs.push_back(model.teacher_forced_logprobs(g, ctx_ids[i], tgt_ids[i]));
      }
      NodeId mle = nll_loss(g, batch_logprobs);

      std::optional<NodeId> sem;
      SemanticLossResult sem_result;
      if (cfg.alpha > 0.0) {
        std::vector<SemanticSample> samples;
        for (size_t b = start; b < stop; ++b) {
          size_t i = order[b];
          SampledResponse sr =
              model.sample_response(g, ctx_ids[i], cfg.max_decode_len, cfg.p_drop, rng);
          samples.push_back({sr.logprobs, vocab.decode(sr.ids), (*in.train)[i].target});
        }
        sem_result = semantic_loss(g, samples, *in.table, baseline);
        sem = sem_result.node;
      }

      LossBreakdown bd;
      NodeId total = combined_loss(g, mle, sem, cfg.alpha, &bd);
      bd.d_sem = sem_result.d_sem;
      bd.advantage = sem_result.advantage;
      rec.loss_series.push_back({step, bd});

      if (!std::isfinite(bd.total)) {
        diverge(step, "loss is not finite at step " + std::to_string(step));
        return rec;
      }
      if (step >= 2) {
        // Compare against the loss up to one window back; early steps use
        // the truncated window so a fast explosion is still caught before
        // probabilities underflow.
        long ref_step = std::max<long>(1, step - kDivergenceWindow);
        double before = mle_history[static_cast<size_t>(ref_step - 1)];
        if (bd.mle_loss > kDivergenceRatio * before && bd.mle_loss > kDivergenceFloor) {
          diverge(step, "loss grew more than tenfold within " +
                            std::to_string(kDivergenceWindow) + " steps at step " +
                            std::to_string(step));
          return rec;
        }
      }
      mle_history.push_back(bd.mle_loss);

      g.backward(total);
      try {
        opt.step(g.param_grads());
      } catch (const DivergenceError& e) {
        diverge(step, e.what());
        return rec;
      }

      if (step % cfg.eval_every == 0 && !in.valid->empty()) {
        rec.eval_series.push_back(
            {step, evaluate(model, vocab, *in.valid, *in.train_target_bigrams, *in.table,
                            cfg.max_decode_len)});
        snapshot(step);
      }
    }
  }

  if (!in.valid->empty() && (rec.eval_series.empty() || rec.eval_series.back().step != step)) {
    rec.eval_series.push_back(
        {step, evaluate(model, vocab, *in.valid, *in.train_target_bigrams, *in.table,
                        cfg.max_decode_len)});
    snapshot(step);
  } else if (rec.eval_series.empty()) {
    snapshot(step);
  }
  finish();
  return rec;
}

std::vector<RunRecord> train(const TrainingConfig& cfg, const std::vector<Dialogue>& dialogues,
                             const std::string& out_dir) {
  cfg.validate();
  require_dir(out_dir);

  SplitResult split = split_corpus(dialogues, cfg);
  if (split.train.empty()) throw ContractError("training split is empty");
  Vocabulary vocab = Vocabulary::build(split.train, cfg.min_count);
  vocab.save(out_dir + "/vocab.txt");
  cfg.save(out_dir + "/config.txt");

  EmbeddingTable table;
  if (!cfg.embedding_file.empty()) table = EmbeddingTable::load(cfg.embedding_file);

  std::vector<std::vector<std::string>> train_targets;
  train_targets.reserve(split.train.size());
  for (const auto& p : split.train) train_targets.push_back(strip_specials(p.target));
  BigramStats bigrams = bigram_stats(train_targets);

  TrainInputs in{&split.train, &split.valid, &vocab, &table, &bigrams};

  std::vector<std::future<RunRecord>> futures;
  futures.reserve(cfg.seeds.size());
  for (uint64_t seed : cfg.seeds) {
    std::string run_dir = out_dir + "/seed_" + std::to_string(seed);
    futures.push_back(std::async(std::launch::async, [&cfg, in, seed, run_dir]() {
      return train_single(cfg, in, seed, run_dir);
    }));
  }
  std::vector<RunRecord> records;
  records.reserve(futures.size());
  for (auto& f : futures) records.push_back(f.get());

  emit_reports(records, out_dir);
  return records;
}

const RunRecord& select_run(const std::vector<RunRecord>& records, SelectCriterion criterion) {
  const RunRecord* best = nullptr;
  if (criterion == SelectCriterion::best_bleu) {
    double best_bleu = -1.0;
    for (const auto& r : records) {
      if (r.eval_series.empty()) continue;
      double b = r.eval_series.back().metrics.bleu;
      if (b > best_bleu) {
        best_bleu = b;
        best = &r;
      }
    }
  } else {
    long best_step = std::numeric_limits<long>::max();
    for (const auto& r : records) {
      if (r.eval_series.empty()) continue;
      double peak = 0.0;
      for (const auto& e : r.eval_series) peak = std::max(peak, e.metrics.distinct2);
      long sat = r.eval_series.back().step;
      for (const auto& e : r.eval_series) {
        if (e.metrics.distinct2 >= 0.98 * peak) {
          sat = e.step;
          break;
        }
      }
      if (sat < best_step) {
        best_step = sat;
        best = &r;
      }
    }
  }
  if (!best) throw ContractError("select_run: no run has evaluation points");
  return *best;
}

void write_train_log_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "step,mle_loss,sem_loss,d_sem,advantage,alpha,total\n";
  for (const auto& p : record.loss_series) {
    out << p.step << ',' << fmt17(p.loss.mle_loss) << ',' << fmt17(p.loss.sem_loss) << ','
        << fmt17(p.loss.d_sem) << ',' << fmt17(p.loss.advantage) << ',' << fmt17(p.loss.alpha)
        << ',' << fmt17(p.loss.total) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_metrics_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << MetricsReport::csv_header() << '\n';
  for (const auto& e : record.eval_series) out << e.metrics.csv_row(e.step) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

namespace {

const std::vector<std::pair<std::string, double MetricsReport::*>>& metric_fields() {
  static const std::vector<std::pair<std::string, double MetricsReport::*>> fields = {
      {"bleu", &MetricsReport::bleu},
      {"distinct1", &MetricsReport::distinct1},
      {"distinct2", &MetricsReport::distinct2},
      {"unseen_frac", &MetricsReport::unseen_frac},
      {"word_repeat_frac", &MetricsReport::word_repeat_frac},
      {"mean_d_sem", &MetricsReport::mean_d_sem},
  };
  return fields;
}

std::string fmt10(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

/// One metric, one chart: a polyline per seed over the eval steps.
void write_metric_svg(const std::vector<RunRecord>& records, const std::string& name,
                      double MetricsReport::*field, const std::string& path) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 30, B = 40;
  double min_x = std::numeric_limits<double>::max(), max_x = std::numeric_limits<double>::lowest();
  double min_y = min_x, max_y = max_x;
  for (const auto& r : records) {
    for (const auto& e : r.eval_series) {
      min_x = std::min(min_x, static_cast<double>(e.step));
      max_x = std::max(max_x, static_cast<double>(e.step));
      min_y = std::min(min_y, e.metrics.*field);
      max_y = std::max(max_y, e.metrics.*field);
    }
  }
  if (min_x > max_x) {  // nothing to plot
    min_x = 0, max_x = 1, min_y = 0, max_y = 1;
  }
  if (max_x == min_x) max_x = min_x + 1;
  if (max_y == min_y) max_y = min_y + 1;
  auto sx = [&](double v) { return L + (v - min_x) / (max_x - min_x) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (v - min_y) / (max_y - min_y) * (H - T - B); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"14\">" << name << "</text>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << (H - B) << "\" x2=\"" << (W - R) << "\" y2=\""
      << (H - B) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << (H - B)
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << L << "\" y=\"" << (H - B + 16) << "\" font-family=\"sans-serif\""
      << " font-size=\"11\">" << fmt10(min_x) << "</text>\n";
  svg << "<text x=\"" << (W - R) << "\" y=\"" << (H - B + 16) << "\" text-anchor=\"end\""
      << " font-family=\"sans-serif\" font-size=\"11\">" << fmt10(max_x) << "</text>\n";
  svg << "<text x=\"" << (L - 4) << "\" y=\"" << (H - B) << "\" text-anchor=\"end\""
      << " font-family=\"sans-serif\" font-size=\"11\">" << fmt10(min_y) << "</text>\n";
  svg << "<text x=\"" << (L - 4) << "\" y=\"" << (T + 4) << "\" text-anchor=\"end\""
      << " font-family=\"sans-serif\" font-size=\"11\">" << fmt10(max_y) << "</text>\n";

  for (size_t ri = 0; ri < records.size(); ++ri) {
    const auto& r = records[ri];
    if (r.eval_series.empty()) continue;
    const char* color = kPalette[ri % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (const auto& e : r.eval_series) {
      if (!points.empty()) points += ' ';
      points += fmt2(sx(static_cast<double>(e.step))) + "," + fmt2(sy(e.metrics.*field));
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n";
    for (const auto& e : r.eval_series) {
      svg << "<circle cx=\"" << fmt2(sx(static_cast<double>(e.step))) << "\" cy=\""
          << fmt2(sy(e.metrics.*field)) << "\" r=\"2\" fill=\"" << color << "\"/>\n";
    }
    svg << "<text x=\"" << (W - R - 120) << "\" y=\"" << (T + 14 * (ri + 1))
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">seed "
        << r.seed << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << svg.str();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace

void emit_reports(const std::vector<RunRecord>& records, const std::string& out_dir) {
  if (records.empty()) throw ContractError("emit_reports: no runs");
  require_dir(out_dir);

  std::set<long> steps;
  for (const auto& r : records)
    for (const auto& e : r.eval_series) steps.insert(e.step);

  std::ofstream out(out_dir + "/metrics_combined.csv", std::ios::binary);
  if (!out) throw IoError("cannot write " + out_dir + "/metrics_combined.csv");
  out << "step";
  for (const auto& [name, field] : metric_fields()) {
    (void)field;
    out << ',' << name << "_mean," << name << "_min," << name << "_max";
  }
  out << '\n';
  for (long step : steps) {
    out << step;
    for (const auto& [name, field] : metric_fields()) {
      (void)name;
      double sum = 0.0, lo = std::numeric_limits<double>::max(),
             hi = std::numeric_limits<double>::lowest();
      long count = 0;
      for (const auto& r : records) {
        for (const auto& e : r.eval_series) {
          if (e.step != step) continue;
          double v = e.metrics.*field;
          sum += v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          ++count;
        }
      }
      if (count == 0) {
        out << ",,,";
      } else {
        out << ',' << fmt10(sum / count) << ',' << fmt10(lo) << ',' << fmt10(hi);
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + out_dir + "/metrics_combined.csv");
  for (const auto& [name, field] : metric_fields())
    write_metric_svg(records, name, field, out_dir + "/" + name + ".svg");
}

}  // namespace semloss
