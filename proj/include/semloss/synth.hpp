#pragma once

#include <cstdint>
#include <string>

namespace semloss {

/// Controls for the bundled synthetic dialogue corpus. Every context gets
/// two distinct paraphrase replies, which is what gives the diversity
/// metrics something to move on.
struct SynthSpec {
  long num_contexts = 800;
  uint64_t seed = 20260814;
};

struct SynthSummary {
  long dialogues = 0;
  long distinct_contexts = 0;
  long vocab_tokens = 0;  // distinct surface tokens across all turns
};

/// Writes the dialogue corpus (one JSON object per line) and a 50-dim
/// embedding file covering every token in it. Same spec, same bytes.
SynthSummary generate_synthetic_corpus(const std::string& corpus_path,
                                       const std::string& embedding_path,
                                       const SynthSpec& spec = {});

}  // namespace semloss
