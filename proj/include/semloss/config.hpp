#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace semloss {

/// Run hyperparameters. Serializes to a flat key=value text file; the file
/// round-trips losslessly, including the doubles.
struct TrainingConfig {
  double alpha = 0.1;
  double learning_rate = 4e-3;
  long hidden_size = 128;
  long embedding_size = 128;
  long batch_size = 32;
  long epochs = 5;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  double p_drop = 0.0;
  long baseline_window = 20;
  long eval_every = 50;
  std::string embedding_file;
  std::string init_mode = "random";  // random | from-table
  long max_decode_len = 30;
  long context_cap = 256;
  long min_count = 1;
  long valid_percent = 10;
  std::string valid_ids_file;  // optional explicit validation dialogue ids

  /// Assigns one key. Unknown keys or unparsable values raise ConfigError.
  void apply(const std::string& key, const std::string& value);
  /// Range checks across all fields; collects every violation into one
  /// ConfigError listing the offending keys.
  void validate() const;

  std::string to_text() const;
  static TrainingConfig from_text(const std::string& text);
  void save(const std::string& path) const;
  static TrainingConfig load(const std::string& path);
};

/// Log-spaced alpha grid 10^-2 .. 10^2 for the sweep harness.
std::vector<double> alpha_sweep_values();

}  // namespace semloss
