#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "semloss/corpus.hpp"
#include "semloss/params.hpp"
#include "semloss/tensor.hpp"

namespace semloss {

/// Self-contained model snapshot: vocabulary, config text, and every named
/// tensor. The on-disk encoding is fixed-width little-endian, so saving the
/// same snapshot twice yields byte-identical files.
struct Checkpoint {
  uint64_t vocab_hash = 0;
  std::string config_text;
  std::vector<std::string> vocab_tokens;  // id order
  std::vector<std::pair<std::string, Tensor>> params;  // creation order

  static Checkpoint capture(const ParamStore& store, const Vocabulary& vocab,
                            const std::string& config_text);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  /// Copies stored tensors into an existing store. Every stored name must
  /// exist with the same shape, and vice versa.
  void restore_into(ParamStore& store) const;

  Vocabulary vocabulary() const;

  /// Guards cross-artifact use: raises IncompatibilityError when the given
  /// vocabulary hashes differently from the one trained against.
  void require_vocab(const Vocabulary& vocab) const;
};

}  // namespace semloss
