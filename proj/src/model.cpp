#include "semloss/model.hpp"

#include <cmath>
#include <string>

#include "semloss/errors.hpp"
#include "semloss/kernels.hpp"

namespace semloss {

Model::Model(const ModelConfig& cfg, ParamStore& store) : cfg_(cfg) {
  if (cfg.vocab_size < Vocabulary::kNumReserved) {
    throw ConfigError("vocab_size must cover the reserved tokens");
  }
  if (cfg.embed_dim < 1 || cfg.hidden_dim < 1) {
    throw ConfigError("embed_dim and hidden_dim must be positive");
  }
  const long V = cfg.vocab_size, E = cfg.embed_dim, H = cfg.hidden_dim;
  embedding_ = &store.create("embedding", Tensor({V, E}));
  enc_W_ = &store.create("encoder.W", Tensor({4 * H, E + H}));
  enc_b_ = &store.create("encoder.b", Tensor({4 * H}));
  dec_W_ = &store.create("decoder.W", Tensor({4 * H, E + H}));
  dec_b_ = &store.create("decoder.b", Tensor({4 * H}));
  out_W_ = &store.create("out.W", Tensor({H, V}));
  out_b_ = &store.create("out.b", Tensor({V}));
}

void Model::init(Rng& rng) {
  const long H = cfg_.hidden_dim;
  const double s = 1.0 / std::sqrt(static_cast<double>(H));
  auto fill_uniform = [&](Tensor& t, double half_range) {
    for (long i = 0; i < t.size(); ++i) {
      t[i] = (rng.uniform(Stream::init) * 2.0 - 1.0) * half_range;
    }
  };
  auto fill_bias = [&](Tensor& t) {
    t.zero();
    for (long i = H; i < 2 * H; ++i) t[i] = 1.0;  // open forget gates
  };
  fill_uniform(embedding_->value, 0.1);
  fill_uniform(enc_W_->value, s);
  fill_bias(enc_b_->value);
  fill_uniform(dec_W_->value, s);
  fill_bias(dec_b_->value);
  fill_uniform(out_W_->value, s);
  out_b_->value.zero();
}

void Model::set_input_embeddings(const Tensor& emb) {
  if (emb.shape() != embedding_->value.shape()) {
    throw ShapeError("input embeddings " + emb.shape_str() + " do not match model " +
                     embedding_->value.shape_str());
  }
  embedding_->value = emb;
}

std::vector<Parameter*> Model::parameters() const {
  return {embedding_, enc_W_, enc_b_, dec_W_, dec_b_, out_W_, out_b_};
}

std::vector<uint8_t> Model::base_allowed() const {
  std::vector<uint8_t> allowed(static_cast<size_t>(cfg_.vocab_size), 1);
  allowed[Vocabulary::kPad] = 0;
  allowed[Vocabulary::kBos] = 0;
  allowed[Vocabulary::kSep] = 0;
  return allowed;
}

void Model::check_ids(const std::vector<int>& ids, const char* what) const {
  for (int id : ids) {
    if (id < 0 || id >= cfg_.vocab_size) {
      throw ContractError(std::string(what) + " id out of vocabulary range: " + std::to_string(id));
    }
  }
}

void Model::cell_plain(const CellRef& cell, const Tensor& x, Tensor& h, Tensor& c) const {
  const long H = cfg_.hidden_dim;
  Tensor xh = kernels::concat({&x, &h});
  Tensor z = kernels::add(kernels::matmul(cell.W->value, xh), cell.b->value);
  Tensor i = kernels::sigmoid(kernels::slice(z, 0, H));
  Tensor f = kernels::sigmoid(kernels::slice(z, H, H));
  Tensor gate = kernels::tanh(kernels::slice(z, 2 * H, H));
  Tensor o = kernels::sigmoid(kernels::slice(z, 3 * H, H));
  c = kernels::add(kernels::mul(f, c), kernels::mul(i, gate));
  h = kernels::mul(o, kernels::tanh(c));
}

void Model::cell_graph(Graph& g, NodeId W, NodeId b, NodeId x, NodeId& h, NodeId& c) const {
  const long H = cfg_.hidden_dim;
  const NodeId parts[] = {x, h};
  NodeId xh = g.concat(parts);
  NodeId z = g.add(g.matmul(W, xh), b);
  NodeId i = g.sigmoid(g.slice(z, 0, H));
  NodeId f = g.sigmoid(g.slice(z, H, H));
  NodeId gate = g.tanh(g.slice(z, 2 * H, H));
  NodeId o = g.sigmoid(g.slice(z, 3 * H, H));
  c = g.add(g.mul(f, c), g.mul(i, gate));
  h = g.mul(o, g.tanh(c));
}

Tensor Model::head_plain(const Tensor& h) const {
  return kernels::add(kernels::matmul(h, out_W_->value), out_b_->value);
}

NodeId Model::head_graph(Graph& g, NodeId h) const {
  return g.add(g.matmul(h, g.param(*out_W_)), g.param(*out_b_));
}

DecoderState Model::encode(const std::vector<int>& context_ids) const {
  if (context_ids.empty()) throw ContractError("encode: empty context");
  check_ids(context_ids, "context");
  DecoderState s;
  s.h = Tensor::zeros({cfg_.hidden_dim});
  s.c = Tensor::zeros({cfg_.hidden_dim});
  CellRef cell{enc_W_, enc_b_};
  for (int id : context_ids) {
    Tensor x = kernels::gather_row(embedding_->value, id);
    cell_plain(cell, x, s.h, s.c);
  }
  s.last_token = Vocabulary::kBos;
  return s;
}

StepResult Model::decode_step(const DecoderState& state, const std::vector<uint8_t>* allowed) const {
  if (allowed != nullptr) {
    if (static_cast<long>(allowed->size()) != cfg_.vocab_size) {
      throw ContractError("decode_step: mask size " + std::to_string(allowed->size()) +
                          " != vocab size " + std::to_string(cfg_.vocab_size));
    }
    if (!(*allowed)[Vocabulary::kEos]) throw ContractError("decode_step: EOS cannot be masked");
  }
  StepResult r;
  r.state = state;
  Tensor x = kernels::gather_row(embedding_->value, state.last_token);
  CellRef cell{dec_W_, dec_b_};
  cell_plain(cell, x, r.state.h, r.state.c);
  Tensor logits = head_plain(r.state.h);
  r.probs = allowed != nullptr ? kernels::masked_softmax(logits, *allowed)
                               : kernels::softmax(logits);
  return r;
}

Model::GraphState Model::encode_graph(Graph& g, const std::vector<int>& context_ids) const {
  if (context_ids.empty()) throw ContractError("encode: empty context");
  check_ids(context_ids, "context");
  GraphState s;
  s.h = g.leaf(Tensor::zeros({cfg_.hidden_dim}));
  s.c = g.leaf(Tensor::zeros({cfg_.hidden_dim}));
  NodeId W = g.param(*enc_W_), b = g.param(*enc_b_), emb = g.param(*embedding_);
  for (int id : context_ids) {
    NodeId x = g.embedding_gather(emb, id);
    cell_graph(g, W, b, x, s.h, s.c);
  }
  return s;
}

std::vector<NodeId> Model::teacher_forced_logprobs(Graph& g, const std::vector<int>& context_ids,
                                                   const std::vector<int>& target_ids) const {
  if (target_ids.empty()) throw ContractError("teacher forcing: empty target");
  check_ids(target_ids, "target");
  GraphState s = encode_graph(g, context_ids);
  NodeId W = g.param(*dec_W_), b = g.param(*dec_b_), emb = g.param(*embedding_);
  std::vector<NodeId> logprobs;
  logprobs.reserve(target_ids.size());
  int prev = Vocabulary::kBos;
  for (int target : target_ids) {
    NodeId x = g.embedding_gather(emb, prev);
    cell_graph(g, W, b, x, s.h, s.c);
    NodeId probs = g.softmax(head_graph(g, s.h));
    logprobs.push_back(g.log(g.pick(probs, target)));
    prev = target;
  }
  return logprobs;
}

SampledResponse Model::sample_response(Graph& g, const std::vector<int>& context_ids, long max_len,
                                       double p_drop, Rng& rng) const {
  if (max_len < 1) throw ContractError("sample_response: max_len must be >= 1");
  if (p_drop < 0.0 || p_drop >= 1.0) {
    throw ContractError("sample_response: p_drop must be in [0, 1)");
  }
  GraphState s = encode_graph(g, context_ids);
  NodeId W = g.param(*dec_W_), b = g.param(*dec_b_), emb = g.param(*embedding_);
  SampledResponse out;
  int prev = Vocabulary::kBos;
  for (long t = 0; t < max_len; ++t) {
    NodeId x = g.embedding_gather(emb, prev);
    cell_graph(g, W, b, x, s.h, s.c);
    std::vector<uint8_t> allowed = base_allowed();
    if (p_drop > 0.0) {
      // Fixed stream budget: one draw per non-reserved id, every step.
      for (long id = Vocabulary::kNumReserved; id < cfg_.vocab_size; ++id) {
        if (rng.uniform(Stream::masking) < p_drop) allowed[static_cast<size_t>(id)] = 0;
      }
    }
    NodeId probs = g.masked_softmax(head_graph(g, s.h), std::move(allowed));
    int id = sample_categorical(
        std::span<const double>(g.value(probs).data(), static_cast<size_t>(cfg_.vocab_size)), rng,
        Stream::sampling);
    out.ids.push_back(id);
    out.logprobs.push_back(g.log(g.pick(probs, id)));
    if (id == Vocabulary::kEos) break;
    prev = id;
  }
  return out;
}

}  // namespace semloss
