#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semloss/params.hpp"
#include "semloss/tensor.hpp"

namespace semloss {

enum class OpKind {
  leaf,
  param,
  matmul,
  add,
  mul,
  concat,
  slice,
  tanh,
  sigmoid,
  softmax,  // masked softmax; the unmasked case allows everything
  log,
  pick,
  embedding_gather,
  sum,
  mean,
  scalar_scale,
};

using NodeId = int;

/// Reverse-mode tape. Built fresh per training step; node creation order is
/// a topological order, so the backward pass is a single reverse sweep that
/// visits every node exactly once and sums gradients at shared inputs.
class Graph {
 public:
  NodeId leaf(Tensor value);
  /// Leaf bound to a trainable parameter. Binding the same parameter twice
  /// returns the existing node, so each parameter owns one gradient slot.
  NodeId param(Parameter& p);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId concat(std::span<const NodeId> parts);
  NodeId slice(NodeId a, long start, long len);
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId softmax(NodeId logits);
  NodeId masked_softmax(NodeId logits, std::vector<uint8_t> allowed);
  NodeId log(NodeId a);
  NodeId pick(NodeId v, long index);
  NodeId embedding_gather(NodeId matrix, long row);
  NodeId sum(NodeId a);
  NodeId mean(NodeId a);
  NodeId scale(NodeId a, double c);

  /// Folds add over the given scalar (or same-shape) nodes.
  NodeId add_many(std::span<const NodeId> nodes);

  const Tensor& value(NodeId id) const;
  const Tensor& grad(NodeId id) const;

  /// Accumulates d(root)/d(node) into every node's grad. Root must be
  /// scalar-valued. Call zero_grads() before reusing the graph.
  void backward(NodeId root);
  void zero_grads();

  /// Parameters bound into this graph with their accumulated gradients,
  /// in binding order.
  std::vector<std::pair<Parameter*, const Tensor*>> param_grads() const;

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    OpKind op;
    Tensor value;        // unused for param nodes
    Tensor grad;
    NodeId parents[2] = {-1, -1};
    std::vector<NodeId> parent_list;  // concat only
    long a = 0, b = 0;                // slice range / gather row / pick index
    double c = 1.0;                   // scalar_scale factor
    std::vector<uint8_t> mask;        // softmax allowed set
    Parameter* bound = nullptr;

    const Tensor& val() const { return bound != nullptr ? bound->value : value; }
  };

  NodeId push(Node n);
  Node& at(NodeId id);
  const Tensor& val(NodeId id) const { return nodes_[static_cast<size_t>(id)].val(); }
  void backprop_node(NodeId id);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, NodeId> bound_;
  std::vector<NodeId> bound_order_;
};

}  // namespace semloss
