#pragma once

#include <vector>

#include "semloss/model.hpp"
#include "semloss/rng.hpp"

namespace semloss {

struct Hypothesis {
  std::vector<int> ids;   // EOS included when the hypothesis terminated
  double logprob = 0.0;   // sum of per-step log-probabilities
  double score = 0.0;     // logprob / length
};

/// Argmax decoding; ties go to the smallest id. Stops at EOS or max_len.
std::vector<int> greedy_decode(const Model& model, const std::vector<int>& context_ids,
                               long max_len);

/// Length-normalized beam search. Hypotheses complete on EOS (held aside) or
/// at max_len; the top `beam_width` complete hypotheses come back sorted by
/// score descending, ties broken by lexicographically smaller id sequence.
/// Fewer may return when the reachable sequence space is smaller than the
/// beam.
std::vector<Hypothesis> beam_search(const Model& model, const std::vector<int>& context_ids,
                                    long beam_width, long max_len);

/// Per-step categorical sampling from the decoder distribution; one
/// sampling-stream draw per emitted token.
std::vector<int> sample_decode(const Model& model, const std::vector<int>& context_ids,
                               long max_len, Rng& rng);

}  // namespace semloss
