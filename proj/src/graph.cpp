#include "semloss/graph.hpp"

#include <cmath>

#include "semloss/errors.hpp"
#include "semloss/kernels.hpp"

namespace semloss {

namespace k = kernels;

NodeId Graph::push(Node n) {
  n.grad = Tensor::zeros(n.val().shape());
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Graph::Node& Graph::at(NodeId id) { return nodes_[static_cast<size_t>(id)]; }

NodeId Graph::leaf(Tensor value) {
  Node n;
  n.op = OpKind::leaf;
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Graph::param(Parameter& p) {
  auto it = bound_.find(&p);
  if (it != bound_.end()) return it->second;
  Node n;
  n.op = OpKind::param;
  n.bound = &p;
  NodeId id = push(std::move(n));
  bound_[&p] = id;
  bound_order_.push_back(id);
  return id;
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  Node n;
  n.op = OpKind::matmul;
  n.parents[0] = a;
  n.parents[1] = b;
  n.value = k::matmul(val(a), val(b));
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  Node n;
  n.op = OpKind::add;
  n.parents[0] = a;
  n.parents[1] = b;
  n.value = k::add(val(a), val(b));
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  Node n;
  n.op = OpKind::mul;
  n.parents[0] = a;
  n.parents[1] = b;
  n.value = k::mul(val(a), val(b));
  return push(std::move(n));
}

NodeId Graph::concat(std::span<const NodeId> parts) {
  Node n;
  n.op = OpKind::concat;
  n.parent_list.assign(parts.begin(), parts.end());
  std::vector<const Tensor*> vals;
  vals.reserve(parts.size());
  for (NodeId p : parts) vals.push_back(&val(p));
  n.value = k::concat(vals);
  return push(std::move(n));
}

NodeId Graph::slice(NodeId a, long start, long len) {
  Node n;
  n.op = OpKind::slice;
  n.parents[0] = a;
  n.a = start;
  n.b = len;
  n.value = k::slice(val(a), start, len);
  return push(std::move(n));
}

NodeId Graph::tanh(NodeId a) {
  Node n;
  n.op = OpKind::tanh;
  n.parents[0] = a;
  n.value = k::tanh(val(a));
  return push(std::move(n));
}

NodeId Graph::sigmoid(NodeId a) {
  Node n;
  n.op = OpKind::sigmoid;
  n.parents[0] = a;
  n.value = k::sigmoid(val(a));
  return push(std::move(n));
}

NodeId Graph::softmax(NodeId logits) {
  return masked_softmax(logits, std::vector<uint8_t>(static_cast<size_t>(val(logits).size()), 1));
}

NodeId Graph::masked_softmax(NodeId logits, std::vector<uint8_t> allowed) {
  Node n;
  n.op = OpKind::softmax;
  n.parents[0] = logits;
  n.value = k::masked_softmax(val(logits), allowed);
  n.mask = std::move(allowed);
  return push(std::move(n));
}

NodeId Graph::log(NodeId a) {
  Node n;
  n.op = OpKind::log;
  n.parents[0] = a;
  n.value = k::log(val(a));
  return push(std::move(n));
}

NodeId Graph::pick(NodeId v, long index) {
  Node n;
  n.op = OpKind::pick;
  n.parents[0] = v;
  n.a = index;
  n.value = k::pick(val(v), index);
  return push(std::move(n));
}

NodeId Graph::embedding_gather(NodeId matrix, long row) {
  Node n;
  n.op = OpKind::embedding_gather;
  n.parents[0] = matrix;
  n.a = row;
  n.value = k::gather_row(val(matrix), row);
  return push(std::move(n));
}

NodeId Graph::sum(NodeId a) {
  Node n;
  n.op = OpKind::sum;
  n.parents[0] = a;
  n.value = k::sum(val(a));
  return push(std::move(n));
}

NodeId Graph::mean(NodeId a) {
  Node n;
  n.op = OpKind::mean;
  n.parents[0] = a;
  n.value = k::mean(val(a));
  return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double c) {
  Node n;
  n.op = OpKind::scalar_scale;
  n.parents[0] = a;
  n.c = c;
  n.value = k::scale(val(a), c);
  return push(std::move(n));
}

NodeId Graph::add_many(std::span<const NodeId> nodes) {
  if (nodes.empty()) throw ContractError("add_many: no inputs");
  NodeId acc = nodes[0];
  for (size_t i = 1; i < nodes.size(); ++i) acc = add(acc, nodes[i]);
  return acc;
}

const Tensor& Graph::value(NodeId id) const { return nodes_[static_cast<size_t>(id)].val(); }

const Tensor& Graph::grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].grad; }

void Graph::zero_grads() {
  for (Node& n : nodes_) n.grad.zero();
}

void Graph::backward(NodeId root) {
  Node& r = at(root);
  if (r.val().size() != 1) {
    throw ContractError("backward: root must be scalar, got " + r.val().shape_str());
  }
  r.grad[0] += 1.0;
  for (NodeId id = root; id >= 0; --id) backprop_node(id);
}

void Graph::backprop_node(NodeId id) {
  Node& n = at(id);
  const Tensor& g = n.grad;
  switch (n.op) {
    case OpKind::leaf:
    case OpKind::param:
      return;
    case OpKind::matmul: {
      Node& pa = at(n.parents[0]);
      Node& pb = at(n.parents[1]);
      const Tensor& a = pa.val();
      const Tensor& b = pb.val();
      if (a.rank() == 2 && b.rank() == 2) {
        long m = a.rows(), kk = a.cols(), nn = b.cols();
        for (long i = 0; i < m; ++i) {
          for (long p = 0; p < kk; ++p) {
            double acc = 0.0;
            for (long j = 0; j < nn; ++j) acc += g[i * nn + j] * b[p * nn + j];
            pa.grad[i * kk + p] += acc;
          }
        }
        for (long p = 0; p < kk; ++p) {
          for (long j = 0; j < nn; ++j) {
            double acc = 0.0;
            for (long i = 0; i < m; ++i) acc += a[i * kk + p] * g[i * nn + j];
            pb.grad[p * nn + j] += acc;
          }
        }
      } else if (a.rank() == 2 && b.rank() == 1) {
        long m = a.rows(), kk = a.cols();
        for (long i = 0; i < m; ++i) {
          for (long p = 0; p < kk; ++p) {
            pa.grad[i * kk + p] += g[i] * b[p];
            pb.grad[p] += a[i * kk + p] * g[i];
          }
        }
      } else {  // 1D x 2D
        long kk = a.size(), nn = b.cols();
        for (long p = 0; p < kk; ++p) {
          double acc = 0.0;
          for (long j = 0; j < nn; ++j) {
            acc += g[j] * b[p * nn + j];
            pb.grad[p * nn + j] += a[p] * g[j];
          }
          pa.grad[p] += acc;
        }
      }
      return;
    }
    case OpKind::add: {
      Node& pa = at(n.parents[0]);
      Node& pb = at(n.parents[1]);
      for (long i = 0; i < g.size(); ++i) {
        pa.grad[i] += g[i];
        pb.grad[i] += g[i];
      }
      return;
    }
    case OpKind::mul: {
      Node& pa = at(n.parents[0]);
      Node& pb = at(n.parents[1]);
      const Tensor& a = pa.val();
      const Tensor& b = pb.val();
      for (long i = 0; i < g.size(); ++i) {
        pa.grad[i] += g[i] * b[i];
        pb.grad[i] += g[i] * a[i];
      }
      return;
    }
    case OpKind::concat: {
      long pos = 0;
      for (NodeId pid : n.parent_list) {
        Node& p = at(pid);
        long len = p.val().size();
        for (long i = 0; i < len; ++i) p.grad[i] += g[pos + i];
        pos += len;
      }
      return;
    }
    case OpKind::slice: {
      Node& p = at(n.parents[0]);
      for (long i = 0; i < n.b; ++i) p.grad[n.a + i] += g[i];
      return;
    }
    case OpKind::tanh: {
      Node& p = at(n.parents[0]);
      const Tensor& y = n.value;
      for (long i = 0; i < g.size(); ++i) p.grad[i] += g[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case OpKind::sigmoid: {
      Node& p = at(n.parents[0]);
      const Tensor& y = n.value;
      for (long i = 0; i < g.size(); ++i) p.grad[i] += g[i] * y[i] * (1.0 - y[i]);
      return;
    }
    case OpKind::softmax: {
      // dz_i = p_i * (g_i - <g, p>); masked coordinates have p_i = 0.
      Node& p = at(n.parents[0]);
      const Tensor& y = n.value;
      double dot = 0.0;
      for (long i = 0; i < g.size(); ++i) dot += g[i] * y[i];
      for (long i = 0; i < g.size(); ++i) p.grad[i] += y[i] * (g[i] - dot);
      return;
    }
    case OpKind::log: {
      Node& p = at(n.parents[0]);
      const Tensor& x = p.val();
      for (long i = 0; i < g.size(); ++i) p.grad[i] += g[i] / x[i];
      return;
    }
    case OpKind::pick: {
      Node& p = at(n.parents[0]);
      p.grad[n.a] += g[0];
      return;
    }
    case OpKind::embedding_gather: {
      Node& p = at(n.parents[0]);
      long cols = p.val().cols();
      for (long i = 0; i < cols; ++i) p.grad[n.a * cols + i] += g[i];
      return;
    }
    case OpKind::sum: {
      Node& p = at(n.parents[0]);
      for (long i = 0; i < p.grad.size(); ++i) p.grad[i] += g[0];
      return;
    }
    case OpKind::mean: {
      Node& p = at(n.parents[0]);
      double inv = 1.0 / static_cast<double>(p.grad.size());
      for (long i = 0; i < p.grad.size(); ++i) p.grad[i] += g[0] * inv;
      return;
    }
    case OpKind::scalar_scale: {
      Node& p = at(n.parents[0]);
      for (long i = 0; i < g.size(); ++i) p.grad[i] += g[i] * n.c;
      return;
    }
  }
}

std::vector<std::pair<Parameter*, const Tensor*>> Graph::param_grads() const {
  std::vector<std::pair<Parameter*, const Tensor*>> out;
  out.reserve(bound_order_.size());
  for (NodeId id : bound_order_) {
    const Node& n = nodes_[static_cast<size_t>(id)];
    out.emplace_back(n.bound, &n.grad);
  }
  return out;
}

}  // namespace semloss
