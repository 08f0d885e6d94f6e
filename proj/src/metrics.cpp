#include "semloss/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "semloss/errors.hpp"

namespace semloss {

namespace {

using Sentence = std::vector<std::string>;

// n-gram occurrence counts for one sentence, keyed by joined tokens.
std::unordered_map<std::string, long> ngram_counts(const Sentence& s, int n) {
  std::unordered_map<std::string, long> counts;
  if (static_cast<long>(s.size()) < n) return counts;
  for (size_t i = 0; i + n <= s.size(); ++i) {
    std::string key = s[i];
    for (int j = 1; j < n; ++j) {
      key += ' ';
      key += s[i + j];
    }
    ++counts[key];
  }
  return counts;
}

std::vector<Sentence> strip_all(const std::vector<Sentence>& responses) {
  std::vector<Sentence> out;
  out.reserve(responses.size());
  for (const Sentence& r : responses) out.push_back(strip_specials(r));
  return out;
}

std::string format_ratio(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::vector<std::string> strip_specials(const std::vector<std::string>& tokens) {
  Sentence out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (!Vocabulary::is_special_token(t)) out.push_back(t);
  }
  return out;
}

double bleu(const std::vector<Sentence>& candidates, const std::vector<Sentence>& references,
            BleuDetail* detail) {
  if (candidates.empty()) throw ContractError("bleu: empty corpus");
  if (candidates.size() != references.size()) {
    throw ContractError("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
                        std::to_string(references.size()) + " references");
  }
  BleuDetail d;
  std::array<long, 4> match{0, 0, 0, 0};
  std::array<long, 4> total{0, 0, 0, 0};
  for (size_t i = 0; i < candidates.size(); ++i) {
    Sentence cand = strip_specials(candidates[i]);
    Sentence ref = strip_specials(references[i]);
    d.candidate_length += static_cast<long>(cand.size());
    d.reference_length += static_cast<long>(ref.size());
    for (int n = 1; n <= 4; ++n) {
      auto cc = ngram_counts(cand, n);
      auto rc = ngram_counts(ref, n);
      for (const auto& [gram, count] : cc) {
        total[n - 1] += count;
        auto it = rc.find(gram);
        if (it != rc.end()) match[n - 1] += std::min(count, it->second);
      }
    }
  }

  double log_sum = 0.0;
  bool zero = false;
  for (int n = 1; n <= 4; ++n) {
    double p;
    if (total[n - 1] == 0) {
      p = 1.0;  // no n-grams of this order exist anywhere: neutral
    } else if (match[n - 1] > 0) {
      p = static_cast<double>(match[n - 1]) / static_cast<double>(total[n - 1]);
    } else if (n == 1) {
      p = 0.0;  // no unigram overlap at all
      zero = true;
    } else {
      p = 1.0 / static_cast<double>(total[n - 1] + 1);  // add-one smoothing
    }
    d.precisions[static_cast<size_t>(n - 1)] = p;
    if (p > 0.0) log_sum += 0.25 * std::log(p);
  }

  if (d.candidate_length == 0 || zero) {
    d.bleu = 0.0;
    d.brevity_penalty = d.candidate_length == 0 ? 0.0 : 1.0;
  } else {
    d.brevity_penalty =
        d.candidate_length > d.reference_length
            ? 1.0
            : std::exp(1.0 - static_cast<double>(d.reference_length) /
                                 static_cast<double>(d.candidate_length));
    d.bleu = d.brevity_penalty * std::exp(log_sum);
  }
  if (detail != nullptr) *detail = d;
  return d.bleu;
}

double distinct_n(const std::vector<Sentence>& responses, int n, RatioCount* counts) {
  if (n != 1 && n != 2) throw ContractError("distinct_n: n must be 1 or 2");
  RatioCount rc;
  std::unordered_set<std::string> unique;
  for (const Sentence& raw : responses) {
    Sentence r = strip_specials(raw);
    for (const auto& [gram, count] : ngram_counts(r, n)) {
      unique.insert(gram);
      rc.denominator += count;
    }
  }
  rc.numerator = static_cast<long>(unique.size());
  if (counts != nullptr) *counts = rc;
  return rc.ratio();
}

double unseen_bigram_fraction(const std::vector<Sentence>& responses,
                              const BigramStats& training_targets, RatioCount* counts) {
  RatioCount rc;
  for (const Sentence& raw : responses) {
    Sentence r = strip_specials(raw);
    for (size_t i = 0; i + 1 < r.size(); ++i) {
      ++rc.denominator;
      if (!training_targets.contains(r[i], r[i + 1])) ++rc.numerator;
    }
  }
  if (counts != nullptr) *counts = rc;
  return rc.ratio();
}

double word_repeat_fraction(const std::vector<Sentence>& responses, RatioCount* counts) {
  RatioCount rc;
  for (const Sentence& raw : responses) {
    Sentence r = strip_specials(raw);
    for (size_t i = 0; i + 1 < r.size(); ++i) {
      ++rc.denominator;
      if (r[i] == r[i + 1]) ++rc.numerator;
    }
  }
  if (counts != nullptr) *counts = rc;
  return rc.ratio();
}

const char* MetricsReport::csv_header() {
  return "step,bleu,distinct1,distinct2,unseen_frac,word_repeat_frac,mean_d_sem";
}

std::string MetricsReport::csv_row(long step) const {
  return std::to_string(step) + "," + format_ratio(bleu) + "," + format_ratio(distinct1) + "," +
         format_ratio(distinct2) + "," + format_ratio(unseen_frac) + "," +
         format_ratio(word_repeat_frac) + "," + format_ratio(mean_d_sem);
}

std::string MetricsReport::pretty() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "bleu            %8.4f\n"
                "distinct-1      %8.4f  (%ld/%ld)\n"
                "distinct-2      %8.4f  (%ld/%ld)\n"
                "unseen bigrams  %8.4f  (%ld/%ld)\n"
                "word repeats    %8.4f  (%ld/%ld)\n"
                "mean distance   %8.4f\n",
                bleu, distinct1, distinct1_counts.numerator, distinct1_counts.denominator,
                distinct2, distinct2_counts.numerator, distinct2_counts.denominator, unseen_frac,
                unseen_counts.numerator, unseen_counts.denominator, word_repeat_frac,
                word_repeat_counts.numerator, word_repeat_counts.denominator, mean_d_sem);
  return buf;
}

MetricsReport compute_metrics(const std::vector<Sentence>& candidates,
                              const std::vector<Sentence>& references,
                              const BigramStats& training_targets, const EmbeddingTable& table) {
  if (candidates.size() != references.size()) {
    throw ContractError("compute_metrics: candidate/reference count mismatch");
  }
  MetricsReport m;
  m.bleu = bleu(candidates, references);
  std::vector<Sentence> stripped = strip_all(candidates);
  m.distinct1 = distinct_n(stripped, 1, &m.distinct1_counts);
  m.distinct2 = distinct_n(stripped, 2, &m.distinct2_counts);
  m.unseen_frac = unseen_bigram_fraction(stripped, training_targets, &m.unseen_counts);
  m.word_repeat_frac = word_repeat_fraction(stripped, &m.word_repeat_counts);
  double total = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    total += semantic_distance(candidates[i], references[i], table);
  }
  m.mean_d_sem = total / static_cast<double>(candidates.size());
  return m;
}

}  // namespace semloss
