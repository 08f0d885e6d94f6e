#include "semloss/synth.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "semloss/corpus.hpp"
#include "semloss/errors.hpp"
#include "semloss/rng.hpp"

namespace semloss {

namespace {

using Words = std::vector<std::string>;

const Words kCities = {
    "paris",   "london",  "tokyo",    "madrid",   "rome",    "berlin",  "oslo",
    "cairo",   "sydney",  "dublin",   "lisbon",   "vienna",  "prague",  "athens",
    "moscow",  "delhi",   "seoul",    "bangkok",  "toronto", "chicago", "boston",
    "denver",  "seattle", "austin",   "miami",    "houston", "phoenix", "portland",
    "atlanta", "nashville", "orlando", "dallas",  "detroit", "memphis", "tucson",
    "omaha",   "fresno",  "tulsa",    "reno",     "boise",   "geneva",  "zurich",
    "munich",  "naples",  "valencia", "porto",    "krakow",  "bergen",  "osaka",
    "kyoto",   "mumbai",  "hanoi",    "quito",    "lima",    "bogota"};

const Words kMonths = {"january", "february", "march",     "april",   "may",      "june",
                       "july",    "august",   "september", "october", "november", "december"};

const Words kTransports = {"flight", "train", "bus",  "ferry", "cruise",
                           "shuttle", "taxi",  "tram", "coach", "minivan"};

const Words kLodgings = {"hostel", "resort",    "suite",     "inn",   "lodge", "motel",
                         "villa",  "apartment", "bungalow",  "cabin", "guesthouse", "penthouse"};

const Words kActivities = {"museum",   "hiking", "beach",    "concert",  "gallery",  "market",
                           "castle",   "opera",  "zoo",      "aquarium", "stadium",  "park",
                           "temple",   "garden", "harbor",   "theater",  "fountain", "cathedral",
                           "vineyard", "lagoon", "carnival", "bazaar",   "lighthouse", "waterfall"};

const Words kMeals = {"breakfast", "lunch",    "dinner",  "brunch",  "coffee",  "pastries",
                      "seafood",   "noodles",  "dumplings", "tapas",  "gelato",  "barbecue"};

const Words kAdjectives = {"cheap",    "fancy",    "quiet",    "cozy",       "modern",
                           "historic", "sunny",    "rainy",    "crowded",    "scenic",
                           "lively",   "peaceful", "charming", "affordable", "spacious",
                           "elegant",  "rustic",   "vibrant",  "windy",      "humid"};

const Words kPrices = {"75",  "99",  "120", "180", "250", "320", "410", "480", "560",
                       "640", "730", "860", "45",  "210", "390", "515", "670", "925"};

// First twelve cities pair with their countries for the geography exchanges.
const Words kCountries = {"france", "england", "japan",     "spain",   "italy",    "germany",
                          "norway", "egypt",   "australia", "ireland", "portugal", "austria"};

// Interchangeable word groups. Members of one group share an embedding
// concept, so swapping them moves the semantic distance only slightly.
const std::vector<Words>& synonym_groups() {
  static const std::vector<Words> groups = {
      {"sure", "certainly", "absolutely"}, {"book", "reserve", "arrange"},
      {"trip", "journey", "getaway"},      {"find", "locate", "search"},
      {"want", "need", "prefer"},          {"great", "excellent", "wonderful"},
      {"price", "cost", "fare"},           {"depart", "leave"},
      {"help", "assist"},                  {"show", "list"},
      {"near", "nearby", "close"},
  };
  return groups;
}

struct Slots {
  std::string city, month, day, transport, lodging, adj, activity, activity2, meal, price,
      country;
};

class Builder {
 public:
  explicit Builder(uint64_t seed) : rng_(seed) {}

  long pick_index(size_t n) { return static_cast<long>(rng_.uniform_int(Stream::data, n)); }
  const std::string& pick(const Words& w) { return w[pick_index(w.size())]; }

  std::string syn(int group) {
    const Words& g = synonym_groups()[group];
    return g[pick_index(g.size())];
  }

  Slots draw_slots() {
    Slots s;
    long city_idx = pick_index(kCities.size());
    s.city = kCities[city_idx];
    s.month = pick(kMonths);
    s.day = std::to_string(2 + pick_index(28));
    s.transport = pick(kTransports);
    s.lodging = pick(kLodgings);
    s.adj = pick(kAdjectives);
    s.activity = pick(kActivities);
    do {
      s.activity2 = pick(kActivities);
    } while (s.activity2 == s.activity);
    s.meal = pick(kMeals);
    s.price = pick(kPrices);
    long geo_idx = pick_index(kCountries.size());
    s.country = kCountries[geo_idx];
    geo_city_ = kCities[geo_idx];  // city/country stay paired
    return s;
  }

  const std::string& geo_city() const { return geo_city_; }

  std::vector<long> distinct_variants(long available, long want) {
    std::vector<long> idx(available);
    for (long i = 0; i < available; ++i) idx[i] = i;
    rng_.shuffle(Stream::data, idx);
    idx.resize(static_cast<size_t>(want));
    return idx;
  }

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
  std::string geo_city_;
};

// tokens -> "a b c"
std::string join(const Words& toks) {
  std::string s;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) s += ' ';
    s += toks[i];
  }
  return s;
}

constexpr int kSyn_confirm = 0, kSyn_book = 1, kSyn_find = 3, kSyn_want = 4, kSyn_good = 5,
              kSyn_cost = 6, kSyn_near = 10;

std::string make_context(Builder& b, int tmpl, const Slots& s) {
  Words t;
  if (b.pick_index(10) < 3) t = {b.pick_index(2) == 0 ? "hello" : "hi", ","};
  switch (tmpl) {
    case 0:
      for (const auto& w : {std::string("i"), b.syn(kSyn_want), std::string("to"),
                            b.syn(kSyn_book), std::string("a"), s.transport, std::string("to"),
                            s.city, std::string("on"), s.month, s.day})
        t.push_back(w);
      break;
    case 1:
      for (const auto& w : {std::string("can"), std::string("you"), b.syn(kSyn_find),
                            std::string("a"), s.adj, s.lodging, std::string("in"), s.city})
        t.push_back(w);
      break;
    case 2:
      for (const auto& w : {std::string("how"), std::string("much"), std::string("is"),
                            std::string("the"), s.transport, std::string("to"), s.city})
        t.push_back(w);
      break;
    case 3:
      for (const auto& w : {std::string("what"), std::string("can"), std::string("we"),
                            std::string("do"), std::string("in"), s.city})
        t.push_back(w);
      break;
    case 4:
      for (const auto& w : {std::string("when"), std::string("should"), std::string("i"),
                            std::string("visit"), s.city})
        t.push_back(w);
      break;
    case 5:
      for (const auto& w : {std::string("where"), std::string("can"), std::string("i"),
                            std::string("get"), s.meal, b.syn(kSyn_near), std::string("the"),
                            s.lodging})
        t.push_back(w);
      break;
    case 6:
      for (const auto& w : {std::string("is"), b.geo_city(), std::string("in"), s.country})
        t.push_back(w);
      break;
    case 7:
      for (const auto& w : {std::string("do"), std::string("i"), b.syn(kSyn_want),
                            std::string("a"), std::string("visa"), std::string("for"),
                            s.country})
        t.push_back(w);
      break;
    default:
      for (const auto& w : {std::string("what"), std::string("should"), std::string("i"),
                            std::string("pack"), std::string("for"), s.city, std::string("in"),
                            s.month})
        t.push_back(w);
      break;
  }
  return join(t);
}

std::string make_target(Builder& b, int tmpl, long variant, const Slots& s) {
  Words t;
  auto add = [&t](std::initializer_list<std::string> words) {
    for (const auto& w : words) t.push_back(w);
  };
  // Each reply variant commits to one synonym per group. Swapping a synonym
  // into another variant's frame then forms word pairs no target contains,
  // which is what the unseen-bigram metric is built to detect.
  auto fsyn = [tmpl, variant](int group) {
    const Words& g = synonym_groups()[group];
    return g[static_cast<size_t>(tmpl + variant) % g.size()];
  };
  switch (tmpl) {
    case 0:
      if (variant == 0)
        add({fsyn(kSyn_confirm), ",", "i", "will", fsyn(kSyn_book), "your", s.transport, "to",
             s.city, "for", s.month, s.day});
      else if (variant == 1)
        add({"your", s.transport, "to", s.city, "on", s.month, s.day, "is", "booked"});
      else if (variant == 2)
        add({fsyn(kSyn_confirm), ",", "the", s.transport, "to", s.city, "leaves", "on", s.month,
             s.day});
      else
        add({"okay", ",", "i", "can", fsyn(kSyn_book), "the", s.transport, "for", s.month,
             s.day});
      break;
    case 1:
      if (variant == 0)
        add({fsyn(kSyn_confirm), ",", "i", "found", "a", s.adj, s.lodging, "in", s.city});
      else if (variant == 1)
        add({"there", "is", "a", fsyn(kSyn_good), s.adj, s.lodging, "in", s.city});
      else if (variant == 2)
        add({"i", "can", fsyn(kSyn_book), "the", s.adj, s.lodging, "for", "you"});
      else
        add({"the", s.lodging, "in", s.city, "is", s.adj, "and", "available"});
      break;
    case 2:
      if (variant == 0)
        add({"the", fsyn(kSyn_cost), "is", s.price, "dollars"});
      else if (variant == 1)
        add({"it", "costs", s.price, "dollars"});
      else if (variant == 2)
        add({"around", s.price, "dollars", "for", "the", s.transport});
      else
        add({"expect", "to", "pay", s.price, "dollars"});
      break;
    case 3:
      if (variant == 0)
        add({"you", "could", "visit", "the", s.activity});
      else if (variant == 1)
        add({"the", s.activity, "in", s.city, "is", fsyn(kSyn_good)});
      else if (variant == 2)
        add({"i", "suggest", "the", s.activity, "and", "the", s.activity2});
      else
        add({"most", "people", "enjoy", "the", s.activity, "there"});
      break;
    case 4:
      if (variant == 0)
        add({s.month, "is", fsyn(kSyn_good), "in", s.city});
      else if (variant == 1)
        add({"most", "people", "visit", "in", s.month});
      else if (variant == 2)
        add({"try", s.month, ",", "it", "is", s.adj, "there"});
      else
        add({"i", "recommend", "visiting", "in", s.month});
      break;
    case 5:
      if (variant == 0)
        add({"the", s.lodging, "serves", s.meal});
      else if (variant == 1)
        add({"there", "is", "a", s.meal, "spot", fsyn(kSyn_near), "the", s.lodging});
      else if (variant == 2)
        add({"you", "can", "get", s.meal, "at", "the", "market"});
      else
        add({"a", s.adj, "place", fsyn(kSyn_near), "the", s.lodging, "has", s.meal});
      break;
    case 6:
      if (variant == 0)
        add({"yes", ",", b.geo_city(), "is", "in", s.country});
      else if (variant == 1)
        add({b.geo_city(), "is", "indeed", "in", s.country});
      else if (variant == 2)
        add({"that", "is", "right", ",", b.geo_city(), "sits", "in", s.country});
      else
        add({"yes", ",", "you", "will", fsyn(kSyn_find), b.geo_city(), "in", s.country});
      break;
    case 7:
      if (variant == 0)
        add({"yes", ",", "travelers", "to", s.country, "need", "a", "visa"});
      else if (variant == 1)
        add({"no", "visa", "is", "required", "for", s.country});
      else if (variant == 2)
        add({"check", "the", "embassy", "rules", "for", s.country});
      else
        add({"only", "for", "long", "stays", "in", s.country});
      break;
    default:
      if (variant == 0)
        add({"pack", "a", "jacket", ",", s.month, "is", s.adj, "in", s.city});
      else if (variant == 1)
        add({"bring", "an", "umbrella", "for", "the", "rain"});
      else if (variant == 2)
        add({"light", "clothes", "work", "for", s.month});
      else
        add({s.month, "calls", "for", "warm", "layers"});
      break;
  }
  return join(t);
}

std::string json_line(const std::string& id, const std::string& user, const std::string& agent) {
  // tokens are lowercase ASCII words and commas; nothing needs escaping
  return "{\"dialogue_id\":\"" + id + "\",\"turns\":[{\"speaker\":\"user\",\"text\":\"" + user +
         "\"},{\"speaker\":\"agent\",\"text\":\"" + agent + "\"}]}\n";
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

SynthSummary generate_synthetic_corpus(const std::string& corpus_path,
                                       const std::string& embedding_path,
                                       const SynthSpec& spec) {
  if (spec.num_contexts < 1) throw ContractError("num_contexts must be positive");
  Builder b(spec.seed);

  std::string corpus_text;
  std::set<std::string> contexts_seen;
  std::set<std::string> token_set;
  long dialogues = 0;

  auto collect = [&token_set](const std::string& text) {
    for (const auto& tok : tokenize(text)) token_set.insert(tok);
  };

  for (long i = 0; i < spec.num_contexts; ++i) {
    int tmpl = static_cast<int>(b.pick_index(9));
    Slots slots = b.draw_slots();
    std::string context = make_context(b, tmpl, slots);
    contexts_seen.insert(context);

    std::vector<long> variants = b.distinct_variants(4, 2);  // 2 paraphrases each
    for (size_t j = 0; j < variants.size(); ++j) {
      std::string target = make_target(b, tmpl, variants[j], slots);
      corpus_text += json_line("synth-" + std::to_string(i) + "-" + std::to_string(j), context,
                               target);
      ++dialogues;
      collect(target);
    }
    // Half the contexts also accept a slot-free stock reply. Being valid
    // everywhere makes it by far the most frequent response, the attractor
    // a likelihood-trained decoder falls into; its averaged word vector sits
    // far from any slot-bearing reply, so the semantic reward pushes back.
    if (b.pick_index(2) == 0) {
      static const std::string kStockReply = "okay , i can help you with that";
      corpus_text += json_line("synth-" + std::to_string(i) + "-g", context, kStockReply);
      ++dialogues;
      collect(kStockReply);
    }
    collect(context);
  }

  // One 50-dim vector per token. Synonym-group members share a concept
  // vector plus a little noise; everything else draws independently.
  constexpr int kDim = 50;
  const auto& groups = synonym_groups();
  std::map<std::string, size_t> group_of;
  for (size_t g = 0; g < groups.size(); ++g)
    for (const auto& w : groups[g]) group_of[w] = g;

  std::vector<std::vector<double>> bases(groups.size(), std::vector<double>(kDim));
  for (auto& base : bases)
    for (double& v : base) v = b.rng().normal(Stream::data);

  std::string emb_text;
  for (const auto& tok : token_set) {
    std::vector<double> vec(kDim);
    auto it = group_of.find(tok);
    if (it != group_of.end()) {
      for (int k = 0; k < kDim; ++k)
        vec[k] = bases[it->second][k] + 0.05 * b.rng().normal(Stream::data);
    } else {
      for (int k = 0; k < kDim; ++k) vec[k] = b.rng().normal(Stream::data);
    }
    emb_text += tok;
    for (int k = 0; k < kDim; ++k) {
      emb_text += ' ';
      emb_text += fmt6(vec[k]);
    }
    emb_text += '\n';
  }

  std::ofstream corpus_out(corpus_path, std::ios::binary | std::ios::trunc);
  if (!corpus_out) throw IoError("cannot write " + corpus_path);
  corpus_out << corpus_text;
  if (!corpus_out) throw IoError("failed writing " + corpus_path);

  std::ofstream emb_out(embedding_path, std::ios::binary | std::ios::trunc);
  if (!emb_out) throw IoError("cannot write " + embedding_path);
  emb_out << emb_text;
  if (!emb_out) throw IoError("failed writing " + embedding_path);

  SynthSummary summary;
  summary.dialogues = dialogues;
  summary.distinct_contexts = static_cast<long>(contexts_seen.size());
  summary.vocab_tokens = static_cast<long>(token_set.size());
  return summary;
}

}  // namespace semloss
