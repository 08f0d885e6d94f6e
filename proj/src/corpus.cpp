#include "semloss/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "json.hpp"
#include "semloss/errors.hpp"

namespace semloss {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&]() {
    if (!word.empty()) {
      tokens.push_back(word);
      word.clear();
    }
  };
  for (unsigned char c : text) {
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      word.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    }
  }
  flush();
  return tokens;
}

std::vector<Dialogue> load_corpus(const std::string& path, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  std::vector<Dialogue> dialogues;
  LoadReport local;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("dialogue_id") || !j["dialogue_id"].is_string() ||
        !j.contains("turns") || !j["turns"].is_array()) {
      throw ParseError("corpus line " + std::to_string(line_no) +
                       ": expected {\"dialogue_id\": string, \"turns\": array}");
    }
    Dialogue d;
    d.id = j["dialogue_id"].get<std::string>();
    for (const auto& jt : j["turns"]) {
      if (!jt.is_object() || !jt.contains("speaker") || !jt["speaker"].is_string() ||
          !jt.contains("text") || !jt["text"].is_string()) {
        throw ParseError("corpus line " + std::to_string(line_no) +
                         ": turn must be {\"speaker\": \"user\"|\"agent\", \"text\": string}");
      }
      std::string speaker = jt["speaker"].get<std::string>();
      Turn t;
      if (speaker == "user") {
        t.speaker = Turn::Speaker::user;
      } else if (speaker == "agent") {
        t.speaker = Turn::Speaker::agent;
      } else {
        throw ParseError("corpus line " + std::to_string(line_no) + ": unknown speaker \"" + speaker + "\"");
      }
      t.text = jt["text"].get<std::string>();
      t.tokens = tokenize(t.text);
      d.turns.push_back(std::move(t));
    }
    for (size_t i = 1; i < d.turns.size(); ++i) {
      if (d.turns[i].speaker == d.turns[i - 1].speaker) {
        local.warnings.push_back("dialogue " + d.id + ": consecutive " +
                                 (d.turns[i].speaker == Turn::Speaker::user ? std::string("user") : std::string("agent")) +
                                 " turns at position " + std::to_string(i));
      }
    }
    local.turns += static_cast<long>(d.turns.size());
    dialogues.push_back(std::move(d));
  }
  if (dialogues.empty()) throw Error("empty corpus: " + path);
  local.dialogues = static_cast<long>(dialogues.size());
  if (report != nullptr) *report = std::move(local);
  return dialogues;
}

std::vector<TrainingPair> make_pairs(const std::vector<Dialogue>& dialogues, long context_cap) {
  if (context_cap < 1) throw ContractError("context_cap must be >= 1");
  const std::string sep = Vocabulary::reserved_tokens()[Vocabulary::kSep];
  const std::string eos = Vocabulary::reserved_tokens()[Vocabulary::kEos];
  std::vector<TrainingPair> pairs;
  for (const Dialogue& d : dialogues) {
    for (size_t i = 0; i < d.turns.size(); ++i) {
      if (d.turns[i].speaker != Turn::Speaker::agent) continue;
      TrainingPair pair;
      pair.dialogue_id = d.id;
      for (size_t h = 0; h < i; ++h) {
        if (h > 0) pair.context.push_back(sep);
        pair.context.insert(pair.context.end(), d.turns[h].tokens.begin(), d.turns[h].tokens.end());
      }
      if (pair.context.empty()) pair.context.push_back(sep);
      if (static_cast<long>(pair.context.size()) > context_cap) {
        pair.context.erase(pair.context.begin(),
                           pair.context.end() - static_cast<ptrdiff_t>(context_cap));
      }
      pair.target = d.turns[i].tokens;
      pair.target.push_back(eos);
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

const std::vector<std::string>& Vocabulary::reserved_tokens() {
  static const std::vector<std::string> reserved = {"<pad>", "<unk>", "<bos>", "<eos>", "<sep>"};
  return reserved;
}

bool Vocabulary::is_special_token(const std::string& token) {
  const auto& r = reserved_tokens();
  return std::find(r.begin(), r.end(), token) != r.end();
}

Vocabulary::Vocabulary() {
  for (const std::string& t : reserved_tokens()) append(t);
}

void Vocabulary::append(const std::string& token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<TrainingPair>& pairs, long min_count) {
  if (min_count < 1) throw ContractError("min_count must be >= 1");
  std::unordered_map<std::string, long> freq;
  for (const TrainingPair& p : pairs) {
    for (const std::string& t : p.context) {
      if (!is_special_token(t)) ++freq[t];
    }
    for (const std::string& t : p.target) {
      if (!is_special_token(t)) ++freq[t];
    }
  }
  std::vector<std::pair<std::string, long>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  for (const auto& [token, count] : entries) {
    if (count >= min_count) v.append(token);
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& non_reserved) {
  Vocabulary v;
  for (const std::string& t : non_reserved) {
    if (v.contains(t)) throw ContractError("duplicate vocabulary token: " + t);
    v.append(t);
  }
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw ContractError("vocabulary id out of range: " + std::to_string(id));
  return id_to_token_[static_cast<size_t>(id)];
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.find(token) != token_to_id_.end();
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens, long* unk_count) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  long unks = 0;
  for (const std::string& t : tokens) {
    int i = id(t);
    if (i == kUnk && t != reserved_tokens()[kUnk]) ++unks;
    ids.push_back(i);
  }
  if (unk_count != nullptr) *unk_count += unks;
  return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<int>& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int i : ids) tokens.push_back(token(i));
  return tokens;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary file: " + path);
  for (const std::string& t : id_to_token_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  const auto& reserved = reserved_tokens();
  if (lines.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), lines.begin())) {
    throw ParseError("vocabulary file " + path + " must start with the reserved tokens");
  }
  return from_tokens({lines.begin() + static_cast<ptrdiff_t>(reserved.size()), lines.end()});
}

uint64_t Vocabulary::hash() const {
  std::string joined;
  for (const std::string& t : id_to_token_) {
    joined += t;
    joined += '\n';
  }
  return fnv1a64(joined);
}

double BigramStats::average_occurrence() const {
  return counts.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(unique());
}

bool BigramStats::contains(const std::string& w1, const std::string& w2) const {
  return counts.find(key(w1, w2)) != counts.end();
}

BigramStats bigram_stats(const std::vector<std::vector<std::string>>& sentences) {
  BigramStats stats;
  for (const auto& sentence : sentences) {
    for (size_t i = 0; i + 1 < sentence.size(); ++i) {
      ++stats.counts[BigramStats::key(sentence[i], sentence[i + 1])];
      ++stats.total;
    }
  }
  return stats;
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace semloss
