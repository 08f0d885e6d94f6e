#include "semloss/tensor.hpp"

#include <cmath>
#include <sstream>

#include "semloss/errors.hpp"

namespace semloss {

namespace {
long shape_product(const std::vector<long>& shape) {
  long n = 1;
  for (long d : shape) {
    if (d <= 0) throw ShapeError("tensor dimensions must be positive, got " + semloss::shape_str(shape));
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<long> shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<size_t>(shape_product(shape_)), 0.0);
}

Tensor::Tensor(std::vector<long> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != static_cast<long>(data_.size())) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + semloss::shape_str(shape_));
  }
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(std::vector<long> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<long> shape, double v) {
  Tensor t(std::move(shape));
  t.fill(v);
  return t;
}

long Tensor::rows() const {
  if (rank() != 2) throw ShapeError("rows() on rank-" + std::to_string(rank()) + " tensor");
  return shape_[0];
}

long Tensor::cols() const {
  if (rank() != 2) throw ShapeError("cols() on rank-" + std::to_string(rank()) + " tensor");
  return shape_[1];
}

double& Tensor::at(long r, long c) { return data_[static_cast<size_t>(r * cols() + c)]; }

double Tensor::at(long r, long c) const { return data_[static_cast<size_t>(r * cols() + c)]; }

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of size " + std::to_string(size()));
  return data_[0];
}

bool Tensor::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void Tensor::require_finite(const std::string& what) const {
  if (!all_finite()) throw DivergenceError("non-finite values in " + what);
}

std::string Tensor::shape_str() const { return semloss::shape_str(shape_); }

std::string shape_str(const std::vector<long>& shape) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

}  // namespace semloss
