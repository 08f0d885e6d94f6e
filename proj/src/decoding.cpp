#include "semloss/decoding.hpp"

#include <algorithm>
#include <cmath>

#include "semloss/errors.hpp"

namespace semloss {

namespace {

int argmax_smallest_id(const Tensor& probs) {
  int best = 0;
  for (long i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

std::vector<int> greedy_decode(const Model& model, const std::vector<int>& context_ids,
                               long max_len) {
  if (max_len < 1) throw ContractError("greedy_decode: max_len must be >= 1");
  const std::vector<uint8_t> allowed = model.base_allowed();
  DecoderState state = model.encode(context_ids);
  std::vector<int> out;
  for (long t = 0; t < max_len; ++t) {
    StepResult r = model.decode_step(state, &allowed);
    int id = argmax_smallest_id(r.probs);
    out.push_back(id);
    if (id == Vocabulary::kEos) break;
    state = r.state;
    state.last_token = id;
  }
  return out;
}

std::vector<Hypothesis> beam_search(const Model& model, const std::vector<int>& context_ids,
                                    long beam_width, long max_len) {
  if (beam_width < 1) throw ContractError("beam_search: beam_width must be >= 1");
  if (max_len < 1) throw ContractError("beam_search: max_len must be >= 1");
  const std::vector<uint8_t> allowed = model.base_allowed();

  struct Beam {
    std::vector<int> ids;
    double logprob = 0.0;
    DecoderState state;
  };
  auto normalized = [](const Beam& b) {
    return b.logprob / static_cast<double>(b.ids.size());
  };
  // Higher score first; equal scores prefer the lexicographically smaller
  // token sequence so results are deterministic.
  auto better = [&](const Beam& a, const Beam& b) {
    double sa = normalized(a), sb = normalized(b);
    if (sa != sb) return sa > sb;
    return a.ids < b.ids;
  };

  std::vector<Beam> active(1);
  active[0].state = model.encode(context_ids);
  std::vector<Beam> complete;

  for (long t = 0; t < max_len && !active.empty(); ++t) {
    std::vector<Beam> candidates;
    for (Beam& beam : active) {
      StepResult r = model.decode_step(beam.state, &allowed);
      for (long id = 0; id < r.probs.size(); ++id) {
        if (r.probs[id] == 0.0) continue;
        Beam next;
        next.ids = beam.ids;
        next.ids.push_back(static_cast<int>(id));
        next.logprob = beam.logprob + std::log(r.probs[id]);
        next.state = r.state;
        next.state.last_token = static_cast<int>(id);
        candidates.push_back(std::move(next));
      }
    }
    std::sort(candidates.begin(), candidates.end(), better);
    if (static_cast<long>(candidates.size()) > beam_width) candidates.resize(beam_width);

    active.clear();
    for (Beam& c : candidates) {
      if (c.ids.back() == Vocabulary::kEos) {
        complete.push_back(std::move(c));
      } else {
        active.push_back(std::move(c));
      }
    }
    if (static_cast<long>(complete.size()) >= beam_width) {
      active.clear();  // enough terminated hypotheses
    }
  }
  // Anything still alive ran into the cap.
  for (Beam& b : active) complete.push_back(std::move(b));

  std::sort(complete.begin(), complete.end(), better);
  if (static_cast<long>(complete.size()) > beam_width) complete.resize(beam_width);

  std::vector<Hypothesis> out;
  out.reserve(complete.size());
  for (Beam& b : complete) {
    Hypothesis h;
    h.score = normalized(b);
    h.logprob = b.logprob;
    h.ids = std::move(b.ids);
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<int> sample_decode(const Model& model, const std::vector<int>& context_ids,
                               long max_len, Rng& rng) {
  if (max_len < 1) throw ContractError("sample_decode: max_len must be >= 1");
  const std::vector<uint8_t> allowed = model.base_allowed();
  DecoderState state = model.encode(context_ids);
  std::vector<int> out;
  for (long t = 0; t < max_len; ++t) {
    StepResult r = model.decode_step(state, &allowed);
    int id = sample_categorical(
        std::span<const double>(r.probs.data(), static_cast<size_t>(r.probs.size())), rng,
        Stream::sampling);
    out.push_back(id);
    if (id == Vocabulary::kEos) break;
    state = r.state;
    state.last_token = id;
  }
  return out;
}

}  // namespace semloss
