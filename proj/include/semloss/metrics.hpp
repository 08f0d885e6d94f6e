#pragma once

#include <array>
#include <string>
#include <vector>

#include "semloss/corpus.hpp"
#include "semloss/embeddings.hpp"

namespace semloss {

struct RatioCount {
  long numerator = 0;
  long denominator = 0;
  double ratio() const {
    return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

/// Corpus-level BLEU-4 internals, exposed so tests can pin the recipe:
/// p_n = clipped-match_n / total_n, with add-one smoothing on zero-match
/// orders n >= 2, neutral p_n = 1 when total_n = 0, hard zero when the
/// unigram order has no matches; brevity penalty exp(1 - r/c) for c <= r.
struct BleuDetail {
  std::array<double, 4> precisions{1.0, 1.0, 1.0, 1.0};
  double brevity_penalty = 1.0;
  long candidate_length = 0;
  long reference_length = 0;
  double bleu = 0.0;
};

/// Drops the reserved tokens; every metric operates on stripped responses.
std::vector<std::string> strip_specials(const std::vector<std::string>& tokens);

double bleu(const std::vector<std::vector<std::string>>& candidates,
            const std::vector<std::vector<std::string>>& references, BleuDetail* detail = nullptr);

/// unique n-grams / total n-grams across all responses; 0 when no n-grams.
double distinct_n(const std::vector<std::vector<std::string>>& responses, int n,
                  RatioCount* counts = nullptr);

/// Fraction of generated bigram occurrences that never appear in the
/// training-target bigram multiset.
double unseen_bigram_fraction(const std::vector<std::vector<std::string>>& responses,
                              const BigramStats& training_targets, RatioCount* counts = nullptr);

/// Fraction of generated bigrams whose two tokens are identical.
double word_repeat_fraction(const std::vector<std::vector<std::string>>& responses,
                            RatioCount* counts = nullptr);

struct MetricsReport {
  double bleu = 0.0;
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  double unseen_frac = 0.0;
  double word_repeat_frac = 0.0;
  double mean_d_sem = 0.0;
  RatioCount distinct1_counts;
  RatioCount distinct2_counts;
  RatioCount unseen_counts;
  RatioCount word_repeat_counts;

  static const char* csv_header();  // step,bleu,distinct1,distinct2,unseen_frac,word_repeat_frac,mean_d_sem
  std::string csv_row(long step) const;
  std::string pretty() const;
};

/// Runs the full suite over decoded responses paired 1:1 with references.
MetricsReport compute_metrics(const std::vector<std::vector<std::string>>& candidates,
                              const std::vector<std::vector<std::string>>& references,
                              const BigramStats& training_targets, const EmbeddingTable& table);

}  // namespace semloss
