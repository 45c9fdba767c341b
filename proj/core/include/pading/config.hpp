#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pading/dataset.hpp"
#include "pading/pipeline.hpp"

namespace pading {

enum class DataSource { kSynthetic, kFiles };

// Every experiment knob as a flat, documented key=value set. Unknown keys
// are rejected before any computation; the fully resolved table is echoed
// into run reports for reproducibility.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0 -> hardware concurrency

  DataSource data_source = DataSource::kSynthetic;
  std::string data_embeddings;
  std::string data_train;
  std::string data_test;
  std::vector<std::string> data_seen_names;
  std::vector<std::string> data_unseen_names;

  std::size_t space_seen = 12;
  std::size_t space_unseen = 4;
  std::size_t space_d_a = 16;
  std::size_t space_clusters = 4;
  double space_spread = 0.35;

  std::size_t synth_d_x = 32;
  std::size_t synth_train_per_class = 200;
  std::size_t synth_test_per_class = 50;
  double synth_noise = 0.1;
  std::size_t synth_nuisance_dim = 8;
  double synth_nuisance_scale = 0.5;

  TrainConfig train;

  std::vector<std::string> ablate_rows = {"projection", "gmmn", "p_only", "p_a", "full"};
  std::vector<std::uint64_t> ablate_seeds = {1, 2, 3, 4, 5};
  std::vector<std::size_t> sweep_primitives;

  // Registry-driven access -----------------------------------------------

  static ExperimentConfig defaults() { return {}; }

  // Parses a key=value file ('#' comments, blank lines allowed), then
  // applies overrides of the same syntax (flag wins over file).
  static ExperimentConfig load(const std::string& path,
                               const std::vector<std::string>& overrides = {});
  static ExperimentConfig from_overrides(const std::vector<std::string>& overrides);

  void set(const std::string& key, const std::string& value);  // unknown key -> error
  std::map<std::string, std::string> to_kv() const;            // resolved table
  void save(const std::string& path) const;

  // One line per key: "key = default  # description".
  static std::string documented_defaults();

  void validate() const;
};

struct BenchmarkInstance {
  SemanticSpace space;
  FeatureDataset train;
  FeatureDataset test;
};

// Materializes the configured benchmark: either the seeded synthetic one
// or embeddings + feature CSVs from disk.
BenchmarkInstance make_benchmark(const ExperimentConfig& cfg);

SyntheticSpec synthetic_spec_of(const ExperimentConfig& cfg);

}  // namespace pading
