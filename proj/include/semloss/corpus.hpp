#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace semloss {

struct Turn {
  enum class Speaker { user, agent };
  Speaker speaker;
  std::string text;
  std::vector<std::string> tokens;
};

struct Dialogue {
  std::string id;
  std::vector<Turn> turns;
};

struct LoadReport {
  long dialogues = 0;
  long turns = 0;
  std::vector<std::string> warnings;  // e.g. consecutive same-speaker turns
};

/// One training example: flattened dialogue history plus the current user
/// utterance, and the agent response terminated by exactly one EOS.
struct TrainingPair {
  std::string dialogue_id;
  std::vector<std::string> context;
  std::vector<std::string> target;
};

/// Lowercases, splits punctuation into standalone tokens, collapses
/// whitespace. ASCII-only rules; non-ASCII bytes are treated as word
/// characters.
std::vector<std::string> tokenize(const std::string& text);

/// Reads the JSON Lines corpus format: one dialogue per line,
/// {"dialogue_id": ..., "turns": [{"speaker": "user"|"agent", "text": ...}]}.
/// Blank lines are skipped. Malformed lines raise ParseError with the line
/// number; a corpus with no dialogues raises Error.
std::vector<Dialogue> load_corpus(const std::string& path, LoadReport* report = nullptr);

/// One pair per agent turn: the context is all preceding turns joined with
/// SEP, truncated from the left to `context_cap` tokens. An agent turn with
/// no preceding turns gets a single-SEP context.
std::vector<TrainingPair> make_pairs(const std::vector<Dialogue>& dialogues, long context_cap);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kSep = 4;
  static constexpr int kNumReserved = 5;

  static const std::vector<std::string>& reserved_tokens();
  static bool is_special_token(const std::string& token);

  /// Tokens with frequency >= min_count, ordered by frequency descending
  /// then lexicographic; reserved tokens take ids 0..4.
  static Vocabulary build(const std::vector<TrainingPair>& pairs, long min_count);
  static Vocabulary from_tokens(const std::vector<std::string>& non_reserved);

  int id(const std::string& token) const;  // UNK for unknown tokens
  const std::string& token(int id) const;
  long size() const { return static_cast<long>(id_to_token_.size()); }
  bool is_special(int id) const { return id >= 0 && id < kNumReserved; }
  bool contains(const std::string& token) const;

  std::vector<int> encode(const std::vector<std::string>& tokens, long* unk_count = nullptr) const;
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  /// Plain-text format: one token per line, line number - 1 = id.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  /// FNV-1a over the id-ordered token list; stable across save/load.
  uint64_t hash() const;

  const std::vector<std::string>& tokens() const { return id_to_token_; }

 private:
  Vocabulary();
  void append(const std::string& token);

  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

struct BigramStats {
  std::unordered_map<std::string, long> counts;  // key: "w1 w2"
  long total = 0;

  long unique() const { return static_cast<long>(counts.size()); }
  /// total / unique; 0 when empty.
  double average_occurrence() const;
  bool contains(const std::string& w1, const std::string& w2) const;
  static std::string key(const std::string& w1, const std::string& w2) { return w1 + " " + w2; }
};

/// Counts adjacent bigrams within each sentence; never across sentences.
BigramStats bigram_stats(const std::vector<std::vector<std::string>>& sentences);

uint64_t fnv1a64(const std::string& data);

}  // namespace semloss
