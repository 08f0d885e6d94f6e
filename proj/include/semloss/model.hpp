#pragma once

#include <cstdint>
#include <vector>

#include "semloss/corpus.hpp"
#include "semloss/graph.hpp"
#include "semloss/params.hpp"
#include "semloss/rng.hpp"
#include "semloss/tensor.hpp"

namespace semloss {

struct ModelConfig {
  long vocab_size = 0;
  long embed_dim = 128;
  long hidden_dim = 128;
};

/// Inference-side decoder state: recurrent vectors plus the token whose
/// embedding feeds the next step.
struct DecoderState {
  Tensor h;
  Tensor c;
  int last_token = Vocabulary::kBos;
};

struct StepResult {
  Tensor probs;  // |V|, masked entries exactly 0, sums to 1
  DecoderState state;  // h/c advanced; caller stores its chosen token in last_token
};

/// Response sampled on-graph so the per-token log-probabilities stay
/// differentiable. ids includes the terminating EOS when one was emitted.
struct SampledResponse {
  std::vector<int> ids;
  std::vector<NodeId> logprobs;  // log P under the post-mask distribution
};

/// Single-layer unidirectional LSTM encoder-decoder with a linear output
/// head. The graph path and the plain path below run the identical kernel
/// sequence, so their values agree bitwise.
class Model {
 public:
  Model(const ModelConfig& cfg, ParamStore& store);

  /// Seeded init: recurrent/output weights U(-1/sqrt(H), 1/sqrt(H)),
  /// embeddings U(-0.1, 0.1), biases 0 except forget-gate biases 1.
  /// Draws come from the init stream in parameter creation order.
  void init(Rng& rng);
  void set_input_embeddings(const Tensor& emb);

  const ModelConfig& config() const { return cfg_; }
  std::vector<Parameter*> parameters() const;

  /// Emittable ids: everything except PAD/BOS/SEP, which never appear in
  /// decoder output.
  std::vector<uint8_t> base_allowed() const;

  // Plain paths (no tape, frozen parameters).
  DecoderState encode(const std::vector<int>& context_ids) const;
  /// One decoder step from `state`. With no mask the distribution is the
  /// full softmax of the logits; with a mask, disallowed ids get probability
  /// exactly 0 and the rest renormalize. EOS is unmaskable (contract error).
  StepResult decode_step(const DecoderState& state,
                         const std::vector<uint8_t>* allowed = nullptr) const;

  // Graph paths.
  struct GraphState {
    NodeId h;
    NodeId c;
  };
  GraphState encode_graph(Graph& g, const std::vector<int>& context_ids) const;
  /// Per-target-step log-probabilities under the full (unmasked) softmax,
  /// teacher-forced on the target.
  std::vector<NodeId> teacher_forced_logprobs(Graph& g, const std::vector<int>& context_ids,
                                              const std::vector<int>& target_ids) const;
  /// Ancestral sampling with optional per-step vocabulary dropping. Each
  /// non-reserved id draws one masking-stream uniform per step when
  /// p_drop > 0; the emitted token costs one sampling-stream draw.
  SampledResponse sample_response(Graph& g, const std::vector<int>& context_ids, long max_len,
                                  double p_drop, Rng& rng) const;

 private:
  struct CellRef {
    const Parameter* W;
    const Parameter* b;
  };
  void check_ids(const std::vector<int>& ids, const char* what) const;
  // Shared LSTM cell decomposition; both overloads perform the same kernel
  // calls in the same order.
  void cell_plain(const CellRef& cell, const Tensor& x, Tensor& h, Tensor& c) const;
  void cell_graph(Graph& g, NodeId W, NodeId b, NodeId x, NodeId& h, NodeId& c) const;
  Tensor head_plain(const Tensor& h) const;
  NodeId head_graph(Graph& g, NodeId h) const;

  ModelConfig cfg_;
  Parameter* embedding_;
  Parameter* enc_W_;
  Parameter* enc_b_;
  Parameter* dec_W_;
  Parameter* dec_b_;
  Parameter* out_W_;
  Parameter* out_b_;
};

}  // namespace semloss
