#include "semloss/params.hpp"

#include "semloss/errors.hpp"

namespace semloss {

Parameter& ParamStore::create(std::string name, Tensor init) {
  if (find(name) != nullptr) throw ContractError("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(Parameter{std::move(name), std::move(init)}));
  return *params_.back();
}

Parameter* ParamStore::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

}  // namespace semloss
