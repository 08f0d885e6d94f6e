#include "semloss/adam.hpp"

#include <cmath>

#include "semloss/errors.hpp"

namespace semloss {

Adam::Adam(AdamConfig config) : config_(config) {}

const Tensor* Adam::first_moment(const Parameter* p) const {
  auto it = slots_.find(p);
  return it == slots_.end() ? nullptr : &it->second.first;
}

const Tensor* Adam::second_moment(const Parameter* p) const {
  auto it = slots_.find(p);
  return it == slots_.end() ? nullptr : &it->second.second;
}

void Adam::step(const std::vector<std::pair<Parameter*, const Tensor*>>& grads) {
  ++step_count_;
  double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
  for (const auto& [param, grad] : grads) {
    if (!grad->same_shape(param->value)) {
      throw ShapeError("adam: gradient shape " + grad->shape_str() + " does not match parameter " +
                       param->name + " " + param->value.shape_str());
    }
    if (!grad->all_finite()) {
      throw DivergenceError("NaN gradient for parameter " + param->name);
    }
    auto it = slots_.find(param);
    if (it == slots_.end()) {
      it = slots_.emplace(param, Moments{Tensor::zeros(param->value.shape()),
                                         Tensor::zeros(param->value.shape())}).first;
    }
    Moments& m = it->second;
    for (long i = 0; i < param->value.size(); ++i) {
      double g = (*grad)[i];
      m.first[i] = config_.beta1 * m.first[i] + (1.0 - config_.beta1) * g;
      m.second[i] = config_.beta2 * m.second[i] + (1.0 - config_.beta2) * g * g;
      double mhat = m.first[i] / bc1;
      double vhat = m.second[i] / bc2;
      param->value[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace semloss
