#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace semloss {

/// Dense row-major tensor of 64-bit reals. Rank 0 is not used; scalars are
/// rank-1 tensors of size 1.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<long> shape);
  Tensor(std::vector<long> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<long> shape);
  static Tensor full(std::vector<long> shape, double v);

  const std::vector<long>& shape() const { return shape_; }
  long size() const { return static_cast<long>(data_.size()); }
  int rank() const { return static_cast<int>(shape_.size()); }

  long rows() const;
  long cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](long i) { return data_[static_cast<size_t>(i)]; }
  double operator[](long i) const { return data_[static_cast<size_t>(i)]; }
  double& at(long r, long c);
  double at(long r, long c) const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  void fill(double v);
  void zero() { fill(0.0); }

  double item() const;  // requires size() == 1

  bool all_finite() const;
  /// Throws DivergenceError naming `what` if any entry is NaN or Inf.
  void require_finite(const std::string& what) const;

  std::string shape_str() const;

 private:
  std::vector<long> shape_;
  std::vector<double> data_;
};

std::string shape_str(const std::vector<long>& shape);

}  // namespace semloss
