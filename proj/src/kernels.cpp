#include "semloss/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semloss/errors.hpp"

namespace semloss::kernels {

namespace {
void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
}
}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  // 2D x 2D -> 2D; 2D x 1D -> 1D (matrix-vector); 1D x 2D -> 1D (vector-matrix).
  if (a.rank() == 2 && b.rank() == 2) {
    if (a.cols() != b.rows()) {
      throw ShapeError("matmul: inner dimensions differ, " + a.shape_str() + " vs " + b.shape_str());
    }
    long m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out({m, n});
    for (long i = 0; i < m; ++i) {
      for (long p = 0; p < k; ++p) {
        double av = a[i * k + p];
        const double* brow = b.data() + p * n;
        double* orow = out.data() + i * n;
        for (long j = 0; j < n; ++j) orow[j] += av * brow[j];
      }
    }
    return out;
  }
  if (a.rank() == 2 && b.rank() == 1) {
    if (a.cols() != b.size()) {
      throw ShapeError("matmul: matrix-vector mismatch, " + a.shape_str() + " vs " + b.shape_str());
    }
    long m = a.rows(), k = a.cols();
    Tensor out({m});
    for (long i = 0; i < m; ++i) {
      double acc = 0.0;
      const double* arow = a.data() + i * k;
      for (long p = 0; p < k; ++p) acc += arow[p] * b[p];
      out[i] = acc;
    }
    return out;
  }
  if (a.rank() == 1 && b.rank() == 2) {
    if (a.size() != b.rows()) {
      throw ShapeError("matmul: vector-matrix mismatch, " + a.shape_str() + " vs " + b.shape_str());
    }
    long k = a.size(), n = b.cols();
    Tensor out({n});
    for (long p = 0; p < k; ++p) {
      double av = a[p];
      const double* brow = b.data() + p * n;
      for (long j = 0; j < n; ++j) out[j] += av * brow[j];
    }
    return out;
  }
  throw ShapeError("matmul: unsupported ranks " + a.shape_str() + " vs " + b.shape_str());
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out(a.shape());
  for (long i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out(a.shape());
  for (long i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Tensor concat(const std::vector<const Tensor*>& parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  long total = 0;
  for (const Tensor* t : parts) {
    if (t->rank() != 1) throw ShapeError("concat: rank-1 inputs required, got " + t->shape_str());
    total += t->size();
  }
  Tensor out({total});
  long pos = 0;
  for (const Tensor* t : parts) {
    std::copy(t->data(), t->data() + t->size(), out.data() + pos);
    pos += t->size();
  }
  return out;
}

Tensor slice(const Tensor& a, long start, long len) {
  if (a.rank() != 1) throw ShapeError("slice: rank-1 input required, got " + a.shape_str());
  if (start < 0 || len <= 0 || start + len > a.size()) {
    throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + len) +
                     ") out of bounds for " + a.shape_str());
  }
  Tensor out({len});
  std::copy(a.data() + start, a.data() + start + len, out.data());
  return out;
}

Tensor tanh(const Tensor& a) {
  Tensor out(a.shape());
  for (long i = 0; i < a.size(); ++i) out[i] = std::tanh(a[i]);
  return out;
}

Tensor sigmoid(const Tensor& a) {
  Tensor out(a.shape());
  for (long i = 0; i < a.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-a[i]));
  return out;
}

Tensor masked_softmax(const Tensor& logits, const std::vector<uint8_t>& allowed) {
  if (logits.rank() != 1) throw ShapeError("softmax: rank-1 input required, got " + logits.shape_str());
  if (static_cast<long>(allowed.size()) != logits.size()) {
    throw ShapeError("softmax: mask length " + std::to_string(allowed.size()) +
                     " does not match logits " + logits.shape_str());
  }
  double max_allowed = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < logits.size(); ++i) {
    if (allowed[static_cast<size_t>(i)] && logits[i] > max_allowed) max_allowed = logits[i];
  }
  if (!std::isfinite(max_allowed)) throw ContractError("softmax: mask allows no entries");
  Tensor out(logits.shape());
  double total = 0.0;
  for (long i = 0; i < logits.size(); ++i) {
    if (allowed[static_cast<size_t>(i)]) {
      out[i] = std::exp(logits[i] - max_allowed);
      total += out[i];
    }
  }
  for (long i = 0; i < logits.size(); ++i) out[i] /= total;
  return out;
}

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 1) throw ShapeError("softmax: rank-1 input required, got " + logits.shape_str());
  std::vector<uint8_t> all(static_cast<size_t>(logits.size()), 1);
  return masked_softmax(logits, all);
}

Tensor log(const Tensor& a) {
  Tensor out(a.shape());
  for (long i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0) throw ContractError("log: non-positive input " + std::to_string(a[i]));
    out[i] = std::log(a[i]);
  }
  return out;
}

Tensor gather_row(const Tensor& matrix, long row) {
  if (matrix.rank() != 2) throw ShapeError("gather_row: rank-2 input required, got " + matrix.shape_str());
  if (row < 0 || row >= matrix.rows()) {
    throw ShapeError("gather_row: row " + std::to_string(row) + " out of range for " + matrix.shape_str());
  }
  long n = matrix.cols();
  Tensor out({n});
  std::copy(matrix.data() + row * n, matrix.data() + (row + 1) * n, out.data());
  return out;
}

Tensor pick(const Tensor& v, long index) {
  if (v.rank() != 1) throw ShapeError("pick: rank-1 input required, got " + v.shape_str());
  if (index < 0 || index >= v.size()) {
    throw ShapeError("pick: index " + std::to_string(index) + " out of range for " + v.shape_str());
  }
  return Tensor::scalar(v[index]);
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (long i = 0; i < a.size(); ++i) acc += a[i];
  return Tensor::scalar(acc);
}

Tensor mean(const Tensor& a) {
  double acc = 0.0;
  for (long i = 0; i < a.size(); ++i) acc += a[i];
  return Tensor::scalar(acc / static_cast<double>(a.size()));
}

Tensor scale(const Tensor& a, double c) {
  Tensor out(a.shape());
  for (long i = 0; i < a.size(); ++i) out[i] = a[i] * c;
  return out;
}

}  // namespace semloss::kernels
