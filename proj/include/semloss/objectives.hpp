#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "semloss/embeddings.hpp"
#include "semloss/graph.hpp"

namespace semloss {

/// Moving-window reward average used as the REINFORCE baseline. Empty
/// window reads as 0, so the first sample's advantage is its raw reward.
class RewardBaseline {
 public:
  explicit RewardBaseline(long window = 20);
  double mean() const;
  void add(double reward);
  long count() const { return static_cast<long>(buffer_.size()); }
  long window() const { return window_; }

 private:
  std::deque<double> buffer_;
  long window_;
};

struct LossBreakdown {
  double mle_loss = 0.0;
  double sem_loss = 0.0;
  double d_sem = 0.0;
  double advantage = 0.0;
  double alpha = 0.0;
  double total = 0.0;
};

/// Negative log-likelihood: per-sequence sum of the teacher-forced log
/// probabilities, negated, averaged over the batch.
NodeId nll_loss(Graph& g, const std::vector<std::vector<NodeId>>& batch_logprobs);

/// One sampled sequence ready for the reinforcement term: its on-graph
/// log-probabilities plus both token sequences as strings for the distance.
struct SemanticSample {
  std::vector<NodeId> logprobs;
  std::vector<std::string> sampled_tokens;
  std::vector<std::string> target_tokens;
};

struct SemanticLossResult {
  NodeId node;              // scalar, mean of per-sequence terms
  double d_sem = 0.0;       // batch mean
  double advantage = 0.0;   // batch mean
};

/// Reinforcement term per sequence: reward R = -distance(sampled, target),
/// advantage A = R - baseline-mean-before-update treated as a constant, term
/// = -A * sum(log P). The baseline absorbs R immediately after each
/// sequence, in batch order.
SemanticLossResult semantic_loss(Graph& g, const std::vector<SemanticSample>& batch,
                                 const EmbeddingTable& table, RewardBaseline& baseline);

/// total = mle + alpha * sem. With alpha == 0 the returned node IS the mle
/// node, so the backward pass is untouched by the reinforcement machinery.
NodeId combined_loss(Graph& g, NodeId mle, std::optional<NodeId> sem, double alpha,
                     LossBreakdown* breakdown = nullptr);

}  // namespace semloss
