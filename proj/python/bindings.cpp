// Python surface for the toolkit: corpus loading, diversity metrics,
// embedding distances, training, and decoding from saved checkpoints.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "semloss/checkpoint.hpp"
#include "semloss/config.hpp"
#include "semloss/corpus.hpp"
#include "semloss/decoding.hpp"
#include "semloss/embeddings.hpp"
#include "semloss/metrics.hpp"
#include "semloss/model.hpp"
#include "semloss/rng.hpp"
#include "semloss/trainer.hpp"

namespace py = pybind11;
using namespace semloss;

namespace {

std::string join(const std::vector<std::string>& toks) {
  std::string s;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) s += ' ';
    s += toks[i];
  }
  return s;
}

// A trained model restored from disk, ready to decode. Member order matters:
// the model wraps the store, the store is filled from the checkpoint.
class ResponseModel {
 public:
  explicit ResponseModel(const std::string& checkpoint_path)
      : ck_(Checkpoint::load(checkpoint_path)),
        cfg_(TrainingConfig::from_text(ck_.config_text)),
        vocab_(ck_.vocabulary()),
        model_(ModelConfig{vocab_.size(), cfg_.embedding_size, cfg_.hidden_size}, store_) {
    ck_.restore_into(store_);
  }

  std::string greedy(const std::string& context, long max_len) const {
    return join(strip_specials(vocab_.decode(
        greedy_decode(model_, encode(context), effective_len(max_len)))));
  }

  std::vector<std::pair<std::string, double>> beam(const std::string& context, long width,
                                                   long max_len) const {
    std::vector<std::pair<std::string, double>> out;
    for (const Hypothesis& h : beam_search(model_, encode(context), width, effective_len(max_len)))
      out.emplace_back(join(strip_specials(vocab_.decode(h.ids))), h.score);
    return out;
  }

  std::string sample(const std::string& context, uint64_t seed, long max_len) const {
    Rng rng(seed);
    return join(strip_specials(
        vocab_.decode(sample_decode(model_, encode(context), effective_len(max_len), rng))));
  }

  long vocab_size() const { return vocab_.size(); }
  std::string config_text() const { return ck_.config_text; }

 private:
  std::vector<int> encode(const std::string& context) const {
    std::vector<std::string> toks = tokenize(context);
    if (toks.empty()) toks.push_back("<sep>");
    return vocab_.encode(toks);
  }
  long effective_len(long max_len) const { return max_len > 0 ? max_len : cfg_.max_decode_len; }

  Checkpoint ck_;
  TrainingConfig cfg_;
  Vocabulary vocab_;
  ParamStore store_;
  Model model_;
};

py::dict run_summary(const RunRecord& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["steps"] = r.loss_series.empty() ? 0L : r.loss_series.back().step;
  d["checkpoint"] = r.checkpoint_path;
  d["diverged"] = r.diverged;
  if (r.diverged) {
    d["divergence_step"] = r.divergence_step;
    d["divergence_reason"] = r.divergence_reason;
  }
  if (!r.eval_series.empty()) {
    const MetricsReport& m = r.eval_series.back().metrics;
    py::dict metrics;
    metrics["step"] = r.eval_series.back().step;
    metrics["bleu"] = m.bleu;
    metrics["distinct1"] = m.distinct1;
    metrics["distinct2"] = m.distinct2;
    metrics["unseen_frac"] = m.unseen_frac;
    metrics["word_repeat_frac"] = m.word_repeat_frac;
    metrics["mean_d_sem"] = m.mean_d_sem;
    d["final_metrics"] = metrics;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dialogue response models: likelihood training with a semantic reward term";

  m.def("tokenize", &tokenize, py::arg("text"),
        "Lowercased whitespace/punctuation tokenization used everywhere else.");
  m.def("strip_specials", &strip_specials, py::arg("tokens"));

  py::class_<BigramStats>(m, "BigramStats")
      .def_readonly("total", &BigramStats::total)
      .def("unique", &BigramStats::unique)
      .def("average_occurrence", &BigramStats::average_occurrence)
      .def("contains", &BigramStats::contains, py::arg("first"), py::arg("second"));
  m.def("bigram_stats", &bigram_stats, py::arg("sentences"));

  m.def(
      "bleu",
      [](const std::vector<std::vector<std::string>>& c,
         const std::vector<std::vector<std::string>>& r) { return bleu(c, r); },
      py::arg("candidates"), py::arg("references"));
  m.def(
      "distinct_n",
      [](const std::vector<std::vector<std::string>>& responses, int n) {
        return distinct_n(responses, n);
      },
      py::arg("responses"), py::arg("n"));
  m.def(
      "unseen_bigram_fraction",
      [](const std::vector<std::vector<std::string>>& responses, const BigramStats& stats) {
        return unseen_bigram_fraction(responses, stats);
      },
      py::arg("responses"), py::arg("training_targets"));
  m.def(
      "word_repeat_fraction",
      [](const std::vector<std::vector<std::string>>& responses) {
        return word_repeat_fraction(responses);
      },
      py::arg("responses"));

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def_static(
          "load", [](const std::string& path) { return EmbeddingTable::load(path); },
          py::arg("path"))
      .def_property_readonly("dim", &EmbeddingTable::dim)
      .def("__len__", &EmbeddingTable::size)
      .def("__contains__",
           [](const EmbeddingTable& t, const std::string& tok) { return t.find(tok) != nullptr; });
  m.def("semantic_distance", &semantic_distance, py::arg("a"), py::arg("b"), py::arg("table"),
        "L2 distance between the mean word vectors of two token sequences.");

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &TrainingConfig::alpha)
      .def_readwrite("learning_rate", &TrainingConfig::learning_rate)
      .def_readwrite("hidden_size", &TrainingConfig::hidden_size)
      .def_readwrite("embedding_size", &TrainingConfig::embedding_size)
      .def_readwrite("batch_size", &TrainingConfig::batch_size)
      .def_readwrite("epochs", &TrainingConfig::epochs)
      .def_readwrite("seeds", &TrainingConfig::seeds)
      .def_readwrite("p_drop", &TrainingConfig::p_drop)
      .def_readwrite("eval_every", &TrainingConfig::eval_every)
      .def_readwrite("embedding_file", &TrainingConfig::embedding_file)
      .def_readwrite("max_decode_len", &TrainingConfig::max_decode_len)
      .def_readwrite("valid_percent", &TrainingConfig::valid_percent)
      .def_readwrite("min_count", &TrainingConfig::min_count)
      .def("apply", &TrainingConfig::apply, py::arg("key"), py::arg("value"),
           "Set a field from its config-file key and string value.")
      .def("validate", &TrainingConfig::validate);

  m.def(
      "train",
      [](const TrainingConfig& cfg, const std::string& corpus_path, const std::string& out_dir) {
        std::vector<Dialogue> dialogues = load_corpus(corpus_path);
        py::list out;
        for (const RunRecord& r : train(cfg, dialogues, out_dir)) out.append(run_summary(r));
        return out;
      },
      py::arg("config"), py::arg("corpus"), py::arg("out_dir"),
      "Trains one model per seed; returns a summary dict per run.");

  py::class_<ResponseModel>(m, "ResponseModel")
      .def(py::init<const std::string&>(), py::arg("checkpoint"))
      .def("greedy", &ResponseModel::greedy, py::arg("context"), py::arg("max_len") = 0)
      .def("beam", &ResponseModel::beam, py::arg("context"), py::arg("width") = 5,
           py::arg("max_len") = 0,
           "Scored hypotheses, best first; scores are length-normalized log-probabilities.")
      .def("sample", &ResponseModel::sample, py::arg("context"), py::arg("seed") = 1,
           py::arg("max_len") = 0)
      .def_property_readonly("vocab_size", &ResponseModel::vocab_size)
      .def_property_readonly("config_text", &ResponseModel::config_text);
}
