#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "semloss/params.hpp"
#include "semloss/tensor.hpp"

namespace semloss {

struct AdamConfig {
  double learning_rate = 4e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam. One step() call advances the shared step count by
/// exactly one; moments live per parameter and match its shape.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  /// Applies one update to every listed parameter. Throws DivergenceError
  /// naming the parameter if its gradient contains NaN/Inf.
  void step(const std::vector<std::pair<Parameter*, const Tensor*>>& grads);

  long step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }

  const Tensor* first_moment(const Parameter* p) const;
  const Tensor* second_moment(const Parameter* p) const;

 private:
  struct Moments {
    Tensor first;
    Tensor second;
  };

  AdamConfig config_;
  long step_count_ = 0;
  std::unordered_map<const Parameter*, Moments> slots_;
};

}  // namespace semloss
