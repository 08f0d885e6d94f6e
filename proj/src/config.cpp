#include "semloss/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "semloss/errors.hpp"

namespace semloss {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// %.17g survives a parse/print round trip for any finite double.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw ConfigError("config key " + key + ": expected a number, got '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError("config key " + key + ": expected an integer, got '" + value + "'");
  return v;
}

std::vector<uint64_t> parse_seeds(const std::string& value) {
  std::vector<uint64_t> out;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    const char* begin = part.c_str();
    char* end = nullptr;
    uint64_t v = std::strtoull(begin, &end, 10);
    if (part.empty() || end == begin || *end != '\0')
      throw ConfigError("config key seeds: expected comma-separated integers, got '" + value + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

void TrainingConfig::apply(const std::string& key, const std::string& value) {
  if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "learning_rate") learning_rate = parse_double(key, value);
  else if (key == "hidden_size") hidden_size = parse_long(key, value);
  else if (key == "embedding_size") embedding_size = parse_long(key, value);
  else if (key == "batch_size") batch_size = parse_long(key, value);
  else if (key == "epochs") epochs = parse_long(key, value);
  else if (key == "seeds") seeds = parse_seeds(value);
  else if (key == "p_drop") p_drop = parse_double(key, value);
  else if (key == "baseline_window") baseline_window = parse_long(key, value);
  else if (key == "eval_every") eval_every = parse_long(key, value);
  else if (key == "embedding_file") embedding_file = value;
  else if (key == "init_mode") init_mode = value;
  else if (key == "max_decode_len") max_decode_len = parse_long(key, value);
  else if (key == "context_cap") context_cap = parse_long(key, value);
  else if (key == "min_count") min_count = parse_long(key, value);
  else if (key == "valid_percent") valid_percent = parse_long(key, value);
  else if (key == "valid_ids_file") valid_ids_file = value;
  else throw ConfigError("unknown config key: " + key);
}

void TrainingConfig::validate() const {
  std::vector<std::string> bad;
  if (!(alpha >= 0.0)) bad.push_back("alpha (must be >= 0)");
  if (!(learning_rate > 0.0)) bad.push_back("learning_rate (must be > 0)");
  if (hidden_size < 1) bad.push_back("hidden_size (must be >= 1)");
  if (embedding_size < 1) bad.push_back("embedding_size (must be >= 1)");
  if (batch_size < 1) bad.push_back("batch_size (must be >= 1)");
  if (epochs < 1) bad.push_back("epochs (must be >= 1)");
  if (seeds.empty()) bad.push_back("seeds (must list at least one seed)");
  if (!(p_drop >= 0.0 && p_drop < 1.0)) bad.push_back("p_drop (must be in [0, 1))");
  if (baseline_window < 1) bad.push_back("baseline_window (must be >= 1)");
  if (eval_every < 1) bad.push_back("eval_every (must be >= 1)");
  if (init_mode != "random" && init_mode != "from-table")
    bad.push_back("init_mode (must be 'random' or 'from-table')");
  if (max_decode_len < 1) bad.push_back("max_decode_len (must be >= 1)");
  if (context_cap < 1) bad.push_back("context_cap (must be >= 1)");
  if (min_count < 1) bad.push_back("min_count (must be >= 1)");
  if (valid_percent < 0 || valid_percent > 99)
    bad.push_back("valid_percent (must be in [0, 99])");
  if (init_mode == "from-table" && embedding_file.empty())
    bad.push_back("embedding_file (required when init_mode=from-table)");
  if (alpha > 0.0 && embedding_file.empty())
    bad.push_back("embedding_file (required when alpha > 0)");
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
}

std::string TrainingConfig::to_text() const {
  std::string s;
  s += "alpha=" + fmt_double(alpha) + "\n";
  s += "learning_rate=" + fmt_double(learning_rate) + "\n";
  s += "hidden_size=" + std::to_string(hidden_size) + "\n";
  s += "embedding_size=" + std::to_string(embedding_size) + "\n";
  s += "batch_size=" + std::to_string(batch_size) + "\n";
  s += "epochs=" + std::to_string(epochs) + "\n";
  std::string sl;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (i) sl += ",";
    sl += std::to_string(seeds[i]);
  }
  s += "seeds=" + sl + "\n";
  s += "p_drop=" + fmt_double(p_drop) + "\n";
  s += "baseline_window=" + std::to_string(baseline_window) + "\n";
  s += "eval_every=" + std::to_string(eval_every) + "\n";
  s += "embedding_file=" + embedding_file + "\n";
  s += "init_mode=" + init_mode + "\n";
  s += "max_decode_len=" + std::to_string(max_decode_len) + "\n";
  s += "context_cap=" + std::to_string(context_cap) + "\n";
  s += "min_count=" + std::to_string(min_count) + "\n";
  s += "valid_percent=" + std::to_string(valid_percent) + "\n";
  s += "valid_ids_file=" + valid_ids_file + "\n";
  return s;
}

TrainingConfig TrainingConfig::from_text(const std::string& text) {
  TrainingConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::vector<std::string> problems;
  long lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      cfg.apply(key, value);
    } catch (const ConfigError& e) {
      problems.push_back(std::string(e.what()));
    }
  }
  if (!problems.empty()) {
    std::string msg = "bad config text:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

void TrainingConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config file: " + path);
  out << to_text();
  if (!out) throw IoError("failed writing config file: " + path);
}

TrainingConfig TrainingConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::vector<double> alpha_sweep_values() {
  return {0.01, 0.1, 1.0, 10.0, 100.0};
}

}  // namespace semloss
