// Regenerates the bundled synthetic dialogue corpus and its embedding file.
// The output is fully determined by the defaults in SynthSpec, so running
// this tool must reproduce data/ byte for byte.
#include <cstdio>
#include <string>

#include "semloss/synth.hpp"

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data";
  semloss::SynthSpec spec;
  semloss::SynthSummary s = semloss::generate_synthetic_corpus(
      dir + "/synthetic_dialogues.jsonl", dir + "/synthetic_embeddings.txt", spec);
  std::printf("wrote %ld dialogues (%ld distinct contexts, %ld tokens) under %s\n", s.dialogues,
              s.distinct_contexts, s.vocab_tokens, dir.c_str());
  return 0;
}
