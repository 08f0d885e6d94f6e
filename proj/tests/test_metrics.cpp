#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "semloss/errors.hpp"
#include "semloss/metrics.hpp"
#include "semloss/rng.hpp"

using namespace semloss;

namespace {

using Sentence = std::vector<std::string>;

Sentence sent(std::initializer_list<const char*> list) {
  return Sentence(list.begin(), list.end());
}

std::vector<Sentence> corpus(std::initializer_list<Sentence> list) {
  return std::vector<Sentence>(list.begin(), list.end());
}

}  // namespace

TEST_CASE("bleu on exact matches is 1") {
  auto c = corpus({sent({"would", "you", "like", "to", "travel"}), sent({"yes", "please"})});
  CHECK(bleu(c, c) == 1.0);
}

TEST_CASE("bleu with zero unigram overlap is 0") {
  auto c = corpus({sent({"a", "b"})});
  auto r = corpus({sent({"x", "y"})});
  CHECK(bleu(c, r) == 0.0);
}

TEST_CASE("bleu clips repeated candidate tokens") {
  auto c = corpus({sent({"the", "the", "the"})});
  auto r = corpus({sent({"the", "cat"})});
  BleuDetail d;
  double value = bleu(c, r, &d);
  CHECK(d.precisions[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Recipe walk-through: p2 = 1/(2+1) smoothed, p3 = 1/(1+1) smoothed,
  // p4 neutral (no 4-grams), candidate longer than reference so BP = 1.
  CHECK(d.precisions[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d.precisions[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.precisions[3] == 1.0);
  CHECK(d.brevity_penalty == 1.0);
  double expected = std::exp(0.25 * (std::log(1.0 / 3) + std::log(1.0 / 3) + std::log(0.5)));
  CHECK(value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bleu brevity penalty for short candidates") {
  auto c = corpus({sent({"a", "b"})});
  auto r = corpus({sent({"a", "b", "c", "d"})});
  BleuDetail d;
  double value = bleu(c, r, &d);
  CHECK(d.precisions[0] == 1.0);
  CHECK(d.precisions[1] == 1.0);
  CHECK(d.brevity_penalty == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("bleu input contracts") {
  CHECK_THROWS_AS(bleu({}, {}), ContractError);
  CHECK_THROWS_AS(bleu(corpus({sent({"a"})}), {}), ContractError);
}

TEST_CASE("bleu ignores special tokens on both sides") {
  auto c = corpus({sent({"a", "b", "<eos>"})});
  auto r = corpus({sent({"a", "b"})});
  CHECK(bleu(c, r) == 1.0);
}

TEST_CASE("distinct-n ratios") {
  SUBCASE("worked bigram example") {
    auto rs = corpus({sent({"the", "cat", "sat"}), sent({"the", "cat", "ran"})});
    RatioCount rc;
    CHECK(distinct_n(rs, 2, &rc) == doctest::Approx(0.75));
    CHECK(rc.numerator == 3);
    CHECK(rc.denominator == 4);
    CHECK(distinct_n(rs, 1) == doctest::Approx(4.0 / 6.0));
  }
  SUBCASE("one token has no bigrams") {
    RatioCount rc;
    CHECK(distinct_n(corpus({sent({"hi"})}), 2, &rc) == 0.0);
    CHECK(rc.denominator == 0);
  }
  SUBCASE("k identical single-token responses give 1/k") {
    auto rs = corpus({sent({"ok"}), sent({"ok"}), sent({"ok"}), sent({"ok"})});
    CHECK(distinct_n(rs, 1) == doctest::Approx(0.25));
  }
  SUBCASE("order invariance and duplicate monotonicity") {
    auto rs = corpus({sent({"a", "b"}), sent({"c", "d"}), sent({"a", "d"})});
    auto shuffled = corpus({sent({"a", "d"}), sent({"a", "b"}), sent({"c", "d"})});
    CHECK(distinct_n(rs, 2) == distinct_n(shuffled, 2));
    CHECK(distinct_n(rs, 1) == distinct_n(shuffled, 1));

    auto extended = rs;
    extended.push_back(rs[0]);  // exact duplicate
    CHECK(distinct_n(extended, 2) <= distinct_n(rs, 2));
    CHECK(distinct_n(extended, 1) <= distinct_n(rs, 1));
  }
  SUBCASE("only 1 and 2 grams are supported") {
    CHECK_THROWS_AS(distinct_n({}, 3, nullptr), ContractError);
  }
}

TEST_CASE("unseen bigram fraction") {
  BigramStats training = bigram_stats({sent({"the", "cat", "sat"})});
  SUBCASE("worked example") {
    auto rs = corpus({sent({"the", "cat", "sat"}), sent({"the", "cat", "ran"})});
    RatioCount rc;
    CHECK(unseen_bigram_fraction(rs, training, &rc) == doctest::Approx(0.25));
    CHECK(rc.numerator == 1);
    CHECK(rc.denominator == 4);
  }
  SUBCASE("generation inside the training set scores 0") {
    CHECK(unseen_bigram_fraction(corpus({sent({"the", "cat"})}), training) == 0.0);
  }
  SUBCASE("empty training set makes everything unseen") {
    BigramStats empty;
    CHECK(unseen_bigram_fraction(corpus({sent({"a", "b", "c"})}), empty) == 1.0);
  }
  SUBCASE("growing the training set never raises the fraction") {
    auto rs = corpus({sent({"a", "b", "c", "a"}), sent({"b", "c"})});
    BigramStats small = bigram_stats({sent({"a", "b"})});
    BigramStats large = bigram_stats({sent({"a", "b", "c"})});
    CHECK(unseen_bigram_fraction(rs, large) <= unseen_bigram_fraction(rs, small));
  }
}

TEST_CASE("word repeat fraction") {
  CHECK(word_repeat_fraction(corpus({sent({"no", "no", "stop"})})) == doctest::Approx(0.5));
  CHECK(word_repeat_fraction(corpus({sent({"all", "unique", "words"})})) == 0.0);
  CHECK(word_repeat_fraction(corpus({sent({"a", "a", "a"})})) == 1.0);
  RatioCount rc;
  word_repeat_fraction(corpus({sent({"a", "a", "a"})}), &rc);
  CHECK(rc.numerator == 2);
  CHECK(rc.denominator == 2);
}

TEST_CASE("metrics match an independent brute-force recount on random corpora") {
  Rng rng(55);
  std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Sentence> responses;
    long nr = 1 + rng.uniform_int(Stream::data, 8);
    for (long i = 0; i < nr; ++i) {
      Sentence s;
      long len = 1 + rng.uniform_int(Stream::data, 7);
      for (long j = 0; j < len; ++j) {
        s.push_back(pool[static_cast<size_t>(rng.uniform_int(Stream::data, 6))]);
      }
      responses.push_back(std::move(s));
    }
    std::vector<Sentence> train_sents;
    for (long i = 0; i < 3; ++i) {
      Sentence s;
      for (long j = 0; j < 4; ++j) {
        s.push_back(pool[static_cast<size_t>(rng.uniform_int(Stream::data, 6))]);
      }
      train_sents.push_back(std::move(s));
    }
    BigramStats training = bigram_stats(train_sents);

    // Independent recount with ordered containers and explicit pair lists.
    for (int n = 1; n <= 2; ++n) {
      std::set<std::vector<std::string>> unique;
      long total = 0;
      for (const Sentence& s : responses) {
        for (size_t i = 0; i + n <= s.size(); ++i) {
          unique.insert(std::vector<std::string>(s.begin() + i, s.begin() + i + n));
          ++total;
        }
      }
      double expected = total == 0 ? 0.0 : static_cast<double>(unique.size()) / total;
      CHECK(distinct_n(responses, n) == expected);
    }
    {
      std::set<std::pair<std::string, std::string>> train_pairs;
      for (const Sentence& s : train_sents) {
        for (size_t i = 0; i + 1 < s.size(); ++i) train_pairs.insert({s[i], s[i + 1]});
      }
      long unseen = 0, total = 0, repeats = 0;
      for (const Sentence& s : responses) {
        for (size_t i = 0; i + 1 < s.size(); ++i) {
          ++total;
          if (!train_pairs.count({s[i], s[i + 1]})) ++unseen;
          if (s[i] == s[i + 1]) ++repeats;
        }
      }
      double eu = total == 0 ? 0.0 : static_cast<double>(unseen) / total;
      double er = total == 0 ? 0.0 : static_cast<double>(repeats) / total;
      CHECK(unseen_bigram_fraction(responses, training) == eu);
      CHECK(word_repeat_fraction(responses) == er);
    }
  }
}

TEST_CASE("metrics report aggregates the suite and serializes") {
  EmbeddingTable table(2);
  table.insert("a", {1.0, 0.0});
  table.insert("b", {0.0, 1.0});
  auto cands = corpus({sent({"a", "b", "<eos>"})});
  auto refs = corpus({sent({"a", "b"})});
  BigramStats training = bigram_stats({sent({"a", "b"})});
  MetricsReport m = compute_metrics(cands, refs, training, table);
  CHECK(m.bleu == 1.0);
  CHECK(m.distinct1 == 1.0);
  CHECK(m.distinct2 == 1.0);
  CHECK(m.unseen_frac == 0.0);
  CHECK(m.word_repeat_frac == 0.0);
  CHECK(m.mean_d_sem == 0.0);
  CHECK(m.distinct1 == m.distinct1_counts.ratio());
  CHECK(m.distinct2 == m.distinct2_counts.ratio());
  CHECK(m.unseen_frac == m.unseen_counts.ratio());
  CHECK(m.word_repeat_frac == m.word_repeat_counts.ratio());

  CHECK(std::string(MetricsReport::csv_header()) ==
        "step,bleu,distinct1,distinct2,unseen_frac,word_repeat_frac,mean_d_sem");
  CHECK(m.csv_row(40) == "40,1,1,1,0,0,0");
  CHECK(m.pretty().find("distinct-1") != std::string::npos);
  CHECK(m.pretty().find("(2/2)") != std::string::npos);
}
