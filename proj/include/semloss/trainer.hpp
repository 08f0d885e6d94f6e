#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semloss/checkpoint.hpp"
#include "semloss/config.hpp"
#include "semloss/corpus.hpp"
#include "semloss/embeddings.hpp"
#include "semloss/metrics.hpp"
#include "semloss/model.hpp"
#include "semloss/objectives.hpp"

namespace semloss {

/// Train/validation partition. Whole dialogues move together: membership is
/// decided by a hash of the dialogue id (or an explicit id list), never by
/// row position, so the split is stable across runs and reorderings.
struct SplitResult {
  std::vector<Dialogue> train_dialogues;
  std::vector<Dialogue> valid_dialogues;
  std::vector<TrainingPair> train;
  std::vector<TrainingPair> valid;
};

SplitResult split_corpus(const std::vector<Dialogue>& dialogues, const TrainingConfig& cfg);

struct LossPoint {
  long step = 0;
  LossBreakdown loss;
};

struct EvalPoint {
  long step = 0;
  MetricsReport metrics;
};

struct RunRecord {
  uint64_t seed = 0;
  std::vector<LossPoint> loss_series;
  std::vector<EvalPoint> eval_series;
  std::string checkpoint_path;  // last good snapshot, survives divergence
  bool diverged = false;
  long divergence_step = -1;
  std::string divergence_reason;
};

/// Shared, read-only inputs for one or more seeded runs.
struct TrainInputs {
  const std::vector<TrainingPair>* train = nullptr;
  const std::vector<TrainingPair>* valid = nullptr;
  const Vocabulary* vocab = nullptr;
  const EmbeddingTable* table = nullptr;
  const BigramStats* train_target_bigrams = nullptr;
};

/// One seeded run. Writes train_log.csv, metrics.csv, and checkpoints under
/// run_dir; model.ckpt always points at the last healthy snapshot. A NaN
/// loss, a NaN gradient, or a more-than-tenfold loss increase over a
/// 100-step window stops the run and marks the record diverged instead of
/// crashing.
RunRecord train_single(const TrainingConfig& cfg, const TrainInputs& in, uint64_t seed,
                       const std::string& run_dir);

/// Full pipeline: split, vocabulary, embeddings, one worker thread per seed,
/// then combined reports under out_dir.
std::vector<RunRecord> train(const TrainingConfig& cfg, const std::vector<Dialogue>& dialogues,
                             const std::string& out_dir);

/// Greedy-decodes every validation context and scores the responses against
/// the references. Raises a contract error on an empty validation set.
MetricsReport evaluate(const Model& model, const Vocabulary& vocab,
                       const std::vector<TrainingPair>& valid,
                       const BigramStats& train_target_bigrams, const EmbeddingTable& table,
                       long max_decode_len);

enum class SelectCriterion {
  best_bleu,                  // highest final BLEU
  distinct2_early_saturation  // first to reach 98% of its own distinct-2 peak
};

const RunRecord& select_run(const std::vector<RunRecord>& records, SelectCriterion criterion);

void write_train_log_csv(const RunRecord& record, const std::string& path);
void write_metrics_csv(const RunRecord& record, const std::string& path);

/// Combined CSV (per-step mean with min/max across seeds) plus one SVG line
/// chart per metric.
void emit_reports(const std::vector<RunRecord>& records, const std::string& out_dir);

}  // namespace semloss
