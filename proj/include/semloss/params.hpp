#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semloss/tensor.hpp"

namespace semloss {

struct Parameter {
  std::string name;
  Tensor value;
};

/// Owns trainable parameters; iteration order is creation order, which fixes
/// the optimizer slot and checkpoint layout.
class ParamStore {
 public:
  Parameter& create(std::string name, Tensor init);
  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;

  size_t size() const { return params_.size(); }
  Parameter& operator[](size_t i) { return *params_[i]; }
  const Parameter& operator[](size_t i) const { return *params_[i]; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace semloss
