#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "semloss/decoding.hpp"
#include "semloss/errors.hpp"

using namespace semloss;

namespace {

struct Fixture {
  ParamStore store;
  Model model;
  explicit Fixture(long vocab = 10, uint64_t seed = 9)
      : model(ModelConfig{vocab, 4, 4}, store) {
    Rng rng(seed);
    model.init(rng);
  }
};

// Two-token toy: only ids 5 and 6 are reachable (EOS/UNK suppressed), so the
// sequence space at max_len=2 has exactly four members.
struct ToyFixture {
  ParamStore store;
  Model model;
  ToyFixture() : model(ModelConfig{7, 3, 3}, store) {
    Rng rng(4);
    model.init(rng);
    Tensor& b = store.find("out.b")->value;
    b[Vocabulary::kEos] = -1000.0;  // underflows to probability exactly 0
    b[Vocabulary::kUnk] = -1000.0;
  }
};

}  // namespace

TEST_CASE("greedy decoding on engineered models") {
  Fixture f;
  SUBCASE("point mass on EOS stops immediately") {
    f.store.find("out.b")->value[Vocabulary::kEos] = 50.0;
    CHECK(greedy_decode(f.model, {5, 6}, 30) == std::vector<int>{Vocabulary::kEos});
  }
  SUBCASE("a model that never terminates hits the cap") {
    f.store.find("out.b")->value[7] = 50.0;
    auto ids = greedy_decode(f.model, {5}, 4);
    CHECK(ids == std::vector<int>{7, 7, 7, 7});
  }
  SUBCASE("max_len must be positive") {
    CHECK_THROWS_AS(greedy_decode(f.model, {5}, 0), ContractError);
  }
}

TEST_CASE("greedy equals a per-step argmax walk over decode_step") {
  Fixture f(12, 21);
  std::vector<uint8_t> allowed = f.model.base_allowed();
  for (int start = 5; start < 9; ++start) {
    std::vector<int> ctx = {start, start + 1};
    auto got = greedy_decode(f.model, ctx, 8);

    std::vector<int> expected;
    DecoderState s = f.model.encode(ctx);
    for (long t = 0; t < 8; ++t) {
      StepResult r = f.model.decode_step(s, &allowed);
      int best = 0;
      for (long i = 1; i < r.probs.size(); ++i) {
        if (r.probs[i] > r.probs[best]) best = static_cast<int>(i);
      }
      expected.push_back(best);
      if (best == Vocabulary::kEos) break;
      s = r.state;
      s.last_token = best;
    }
    CHECK(got == expected);
  }
}

TEST_CASE("beam width 1 reproduces greedy decoding") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Fixture f(10, seed);
    for (int a = 5; a < 8; ++a) {
      std::vector<int> ctx = {a, a + 1, 5};
      auto greedy = greedy_decode(f.model, ctx, 10);
      auto beams = beam_search(f.model, ctx, 1, 10);
      REQUIRE(beams.size() == 1);
      CHECK(beams[0].ids == greedy);
    }
  }
}

TEST_CASE("beam search ranking matches exhaustive enumeration on a 4-sequence space") {
  ToyFixture f;
  std::vector<int> ctx = {5, 6};
  const long cap = 2;

  // Brute force: walk every length-2 sequence over {5, 6} with decode_step.
  struct Entry {
    std::vector<int> ids;
    double score;
  };
  std::vector<Entry> all;
  std::vector<uint8_t> allowed = f.model.base_allowed();
  for (int first : {5, 6}) {
    for (int second : {5, 6}) {
      DecoderState s = f.model.encode(ctx);
      StepResult r1 = f.model.decode_step(s, &allowed);
      double lp = std::log(r1.probs[first]);
      DecoderState s2 = r1.state;
      s2.last_token = first;
      StepResult r2 = f.model.decode_step(s2, &allowed);
      lp += std::log(r2.probs[second]);
      all.push_back({{first, second}, lp / 2.0});
    }
  }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.ids < b.ids;
  });

  auto beams = beam_search(f.model, ctx, 4, cap);
  REQUIRE(beams.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(beams[i].ids == all[i].ids);
    CHECK(beams[i].score == doctest::Approx(all[i].score).epsilon(1e-12));
  }
}

TEST_CASE("beam search output contracts hold on a random model") {
  Fixture f(14, 33);
  auto beams = beam_search(f.model, {5, 9, 11}, 5, 12);
  CHECK(beams.size() == 5);

  std::set<std::vector<int>> distinct;
  for (size_t i = 0; i < beams.size(); ++i) {
    distinct.insert(beams[i].ids);
    // Non-increasing normalized scores down the ranking.
    if (i > 0) CHECK(beams[i - 1].score >= beams[i].score);
    // Terminate with EOS unless the cap was hit.
    if (beams[i].ids.size() < 12) CHECK(beams[i].ids.back() == Vocabulary::kEos);
    CHECK(beams[i].ids.size() <= 12);
    // Score is the normalized raw log-probability.
    CHECK(beams[i].score ==
          doctest::Approx(beams[i].logprob / beams[i].ids.size()).epsilon(1e-12));
    // Permanently masked ids never appear.
    for (int id : beams[i].ids) {
      CHECK(id != Vocabulary::kPad);
      CHECK(id != Vocabulary::kBos);
      CHECK(id != Vocabulary::kSep);
    }
  }
  CHECK(distinct.size() == beams.size());

  CHECK_THROWS_AS(beam_search(f.model, {5}, 0, 10), ContractError);
  CHECK_THROWS_AS(beam_search(f.model, {5}, 2, 0), ContractError);
}

TEST_CASE("beam search is deterministic") {
  Fixture f(10, 40);
  auto a = beam_search(f.model, {6, 7}, 5, 10);
  auto b = beam_search(f.model, {6, 7}, 5, 10);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ids == b[i].ids);
    CHECK(a[i].score == b[i].score);
  }
}

TEST_CASE("sampled decoding") {
  SUBCASE("point-mass model samples the greedy sequence") {
    Fixture f;
    f.store.find("out.b")->value[Vocabulary::kEos] = 50.0;
    Rng rng(5);
    CHECK(sample_decode(f.model, {5}, 10, rng) == greedy_decode(f.model, {5}, 10));
  }
  SUBCASE("fixed seed replays identically") {
    Fixture f;
    Rng r1(77);
    Rng r2(77);
    CHECK(sample_decode(f.model, {5, 6}, 15, r1) == sample_decode(f.model, {5, 6}, 15, r2));
  }
  SUBCASE("uniform two-outcome model has expected length 2") {
    // Only token 5 and EOS are reachable with equal probability, so the
    // length is geometric with p = 1/2.
    ParamStore store;
    Model model(ModelConfig{6, 3, 3}, store);  // zero params: logits all equal
    store.find("out.b")->value[Vocabulary::kUnk] = -1000.0;
    Rng rng(13);
    const long n = 100000;
    double total = 0.0;
    for (long i = 0; i < n; ++i) {
      total += static_cast<double>(sample_decode(model, {5}, 100, rng).size());
    }
    CHECK(total / static_cast<double>(n) == doctest::Approx(2.0).epsilon(0.025));
  }
}
