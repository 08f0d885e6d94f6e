#include "semloss/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "semloss/errors.hpp"

namespace semloss {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'M', 'L', 'C', 'K', 'P', 'T'};
constexpr uint64_t kVersion = 1;

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out.append(s);
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  std::string where;

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("checkpoint file " + where + ": " + why);
  }
  void need(size_t n) const {
    if (pos + n > buf.size()) fail("truncated");
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
  std::string str() {
    uint64_t n = u64();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

Checkpoint Checkpoint::capture(const ParamStore& store, const Vocabulary& vocab,
                               const std::string& config_text) {
  Checkpoint ck;
  ck.vocab_hash = vocab.hash();
  ck.config_text = config_text;
  ck.vocab_tokens = vocab.tokens();
  for (const auto& p : store) ck.params.emplace_back(p->name, p->value);
  return ck;
}

void Checkpoint::save(const std::string& path) const {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u64(out, kVersion);
  put_u64(out, vocab_hash);
  put_str(out, config_text);
  put_u64(out, vocab_tokens.size());
  for (const auto& t : vocab_tokens) put_str(out, t);
  put_u64(out, params.size());
  for (const auto& [name, tensor] : params) {
    put_str(out, name);
    const auto& shape = tensor.shape();
    put_u64(out, shape.size());
    for (long d : shape) put_u64(out, static_cast<uint64_t>(d));
    for (long i = 0; i < tensor.size(); ++i) put_f64(out, tensor[i]);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write checkpoint: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r{buf, 0, path};

  r.need(sizeof(kMagic));
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) r.fail("bad magic");
  r.pos = sizeof(kMagic);
  uint64_t version = r.u64();
  if (version != kVersion)
    r.fail("unsupported version " + std::to_string(version));

  Checkpoint ck;
  ck.vocab_hash = r.u64();
  ck.config_text = r.str();
  uint64_t vocab_count = r.u64();
  ck.vocab_tokens.reserve(vocab_count);
  for (uint64_t i = 0; i < vocab_count; ++i) ck.vocab_tokens.push_back(r.str());
  uint64_t param_count = r.u64();
  for (uint64_t i = 0; i < param_count; ++i) {
    std::string name = r.str();
    uint64_t rank = r.u64();
    if (rank > 8) r.fail("implausible tensor rank for " + name);
    std::vector<long> shape;
    long total = 1;
    for (uint64_t k = 0; k < rank; ++k) {
      uint64_t d = r.u64();
      if (d == 0 || d > (1ull << 32)) r.fail("implausible dimension for " + name);
      shape.push_back(static_cast<long>(d));
      total *= static_cast<long>(d);
    }
    Tensor t(shape);
    for (long k = 0; k < total; ++k) t[k] = r.f64();
    ck.params.emplace_back(std::move(name), std::move(t));
  }
  if (r.pos != buf.size()) r.fail("trailing bytes");
  return ck;
}

void Checkpoint::restore_into(ParamStore& store) const {
  if (store.size() != params.size())
    throw IncompatibilityError("checkpoint holds " + std::to_string(params.size()) +
                               " tensors but the model has " + std::to_string(store.size()));
  for (const auto& [name, tensor] : params) {
    Parameter* p = store.find(name);
    if (!p) throw IncompatibilityError("checkpoint tensor '" + name + "' not present in model");
    if (p->value.shape() != tensor.shape())
      throw IncompatibilityError("checkpoint tensor '" + name + "' has shape " +
                                 tensor.shape_str() + " but the model expects " +
                                 p->value.shape_str());
    p->value = tensor;
  }
}

Vocabulary Checkpoint::vocabulary() const {
  const auto& reserved = Vocabulary::reserved_tokens();
  if (vocab_tokens.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), vocab_tokens.begin()))
    throw ParseError("checkpoint vocabulary lacks the reserved token prefix");
  return Vocabulary::from_tokens(
      std::vector<std::string>(vocab_tokens.begin() + reserved.size(), vocab_tokens.end()));
}

void Checkpoint::require_vocab(const Vocabulary& vocab) const {
  if (vocab.hash() != vocab_hash)
    throw IncompatibilityError(
        "vocabulary hash mismatch: checkpoint was trained against a different vocabulary");
}

}  // namespace semloss
