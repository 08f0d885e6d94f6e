#pragma once

#include <cstdint>
#include <vector>

#include "semloss/tensor.hpp"

namespace semloss::kernels {

// Raw tensor math shared by the graph forward pass and the no-graph
// inference path, so the two produce bit-identical values.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor concat(const std::vector<const Tensor*>& parts);
Tensor slice(const Tensor& a, long start, long len);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
/// Softmax over a vector restricted to `allowed` (1 = allowed); disallowed
/// entries come out exactly 0. Throws if nothing is allowed.
Tensor masked_softmax(const Tensor& logits, const std::vector<uint8_t>& allowed);
Tensor softmax(const Tensor& logits);
Tensor log(const Tensor& a);
Tensor gather_row(const Tensor& matrix, long row);
Tensor pick(const Tensor& v, long index);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor scale(const Tensor& a, double c);

}  // namespace semloss::kernels
