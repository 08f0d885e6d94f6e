#include "semloss/objectives.hpp"

#include <numeric>

#include "semloss/errors.hpp"

namespace semloss {

RewardBaseline::RewardBaseline(long window) : window_(window) {
  if (window < 1) throw ContractError("baseline window must be >= 1");
}

double RewardBaseline::mean() const {
  if (buffer_.empty()) return 0.0;
  double total = std::accumulate(buffer_.begin(), buffer_.end(), 0.0);
  return total / static_cast<double>(buffer_.size());
}

void RewardBaseline::add(double reward) {
  buffer_.push_back(reward);
  if (static_cast<long>(buffer_.size()) > window_) buffer_.pop_front();
}

NodeId nll_loss(Graph& g, const std::vector<std::vector<NodeId>>& batch_logprobs) {
  if (batch_logprobs.empty()) throw ContractError("nll_loss: empty batch");
  std::vector<NodeId> sums;
  sums.reserve(batch_logprobs.size());
  for (const auto& seq : batch_logprobs) {
    if (seq.empty()) throw ContractError("nll_loss: empty sequence in batch");
    sums.push_back(g.add_many(seq));
  }
  NodeId stacked = g.concat(sums);
  return g.scale(g.mean(stacked), -1.0);
}

SemanticLossResult semantic_loss(Graph& g, const std::vector<SemanticSample>& batch,
                                 const EmbeddingTable& table, RewardBaseline& baseline) {
  if (batch.empty()) throw ContractError("semantic_loss: empty batch");
  std::vector<NodeId> terms;
  terms.reserve(batch.size());
  SemanticLossResult out;
  for (const SemanticSample& sample : batch) {
    if (sample.logprobs.empty()) throw ContractError("semantic_loss: sample without log-probs");
    double d = semantic_distance(sample.sampled_tokens, sample.target_tokens, table);
    double reward = -d;
    double advantage = reward - baseline.mean();
    baseline.add(reward);
    // The advantage is a constant here: gradients flow only through the
    // sampled tokens' log-probabilities.
    terms.push_back(g.scale(g.add_many(sample.logprobs), -advantage));
    out.d_sem += d;
    out.advantage += advantage;
  }
  double n = static_cast<double>(batch.size());
  out.d_sem /= n;
  out.advantage /= n;
  out.node = g.mean(g.concat(terms));
  return out;
}

NodeId combined_loss(Graph& g, NodeId mle, std::optional<NodeId> sem, double alpha,
                     LossBreakdown* breakdown) {
  if (alpha < 0.0) throw ConfigError("alpha must be non-negative");
  if (alpha > 0.0 && !sem.has_value()) {
    throw ConfigError("alpha > 0 requires a reinforcement loss term");
  }
  NodeId total = alpha == 0.0 ? mle : g.add(mle, g.scale(*sem, alpha));
  if (breakdown != nullptr) {
    breakdown->mle_loss = g.value(mle).item();
    breakdown->sem_loss = sem.has_value() ? g.value(*sem).item() : 0.0;
    breakdown->alpha = alpha;
    breakdown->total = g.value(total).item();
  }
  return total;
}

}  // namespace semloss
