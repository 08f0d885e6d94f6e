#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semloss/corpus.hpp"
#include "semloss/rng.hpp"
#include "semloss/tensor.hpp"

namespace semloss {

/// Static word-vector table in the GloVe/fastText text format. Immutable
/// after load; safe to share across threads.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(long dim) : dim_(dim) {}

  /// One "token v1 ... vd" entry per line; an optional "count dim" header
  /// line is auto-detected and skipped. When `filter` is given only its
  /// tokens are retained.
  static EmbeddingTable load(const std::string& path,
                             const std::unordered_set<std::string>* filter = nullptr);

  long dim() const { return dim_; }
  long size() const { return static_cast<long>(vectors_.size()); }
  const std::vector<double>* find(const std::string& token) const;
  void insert(const std::string& token, std::vector<double> vec);

 private:
  long dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct SentenceEmbedding {
  std::vector<double> vector;  // zero vector when nothing was covered
  long covered = 0;            // tokens found in the table
  long total = 0;              // tokens considered (after dropping specials)
};

/// Mean of the vectors of in-table tokens; reserved special tokens and
/// out-of-table tokens are skipped and counted.
SentenceEmbedding sentence_embedding(const std::vector<std::string>& tokens,
                                     const EmbeddingTable& table);

/// L2 distance between the averaged sentence embeddings of the two token
/// sequences.
double semantic_distance(const std::vector<std::string>& a, const std::vector<std::string>& b,
                         const EmbeddingTable& table);

struct CoverageReport {
  long covered = 0;    // vocabulary tokens found in the table
  long total = 0;      // vocabulary size
  bool projected = false;  // table dim differed from model dim
};

/// Builds a |V| x model_dim input-embedding matrix: in-table tokens copy
/// their vector when dims match, otherwise go through one seeded random
/// projection (entries N(0, 1/d), drawn first from the init stream);
/// out-of-table tokens draw from the regular init distribution U(-0.1, 0.1).
Tensor init_input_embeddings(const Vocabulary& vocab, const EmbeddingTable& table, long model_dim,
                             Rng& rng, CoverageReport* report = nullptr);

}  // namespace semloss
