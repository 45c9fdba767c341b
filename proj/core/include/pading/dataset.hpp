#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pading/matrix.hpp"
#include "pading/rng.hpp"
#include "pading/semantic_space.hpp"

namespace pading {

enum class Provenance { kReal, kSynthetic };

// Labeled class-embedding samples with per-row provenance and group tags.
struct FeatureDataset {
  Matrix features;                       // n x d_x
  std::vector<std::size_t> labels;       // class id per row
  std::vector<Provenance> provenance;    // real | synthetic
  std::vector<Group> groups;             // seen | unseen

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  void append_row(std::span<const double> row, std::size_t label, Provenance prov,
                  Group group);
  void append_all(const FeatureDataset& other);
  FeatureDataset subset(const std::vector<std::size_t>& indices) const;
  std::vector<std::size_t> indices_of_class(std::size_t class_id) const;

  // Checks the documented invariants against a space. When
  // generator_training_input is true, also rejects real rows with unseen
  // labels (the generator never sees real unseen data).
  void validate(const SemanticSpace& space, bool generator_training_input = false) const;
};

// Desk-scale ground-truth recipe for synthetic class-embedding data.
struct SyntheticSpec {
  std::size_t d_a = 16;
  std::size_t d_x = 32;
  std::size_t samples_per_class = 200;
  std::size_t test_samples_per_class = 50;
  double related_noise = 0.1;      // stddev of per-sample Gaussian noise
  std::size_t nuisance_dim = 8;    // width of the semantic-unrelated block
  double nuisance_scale = 0.5;     // stddev of the per-class nuisance vector
  std::uint64_t seed = 1;

  void validate() const;
};

// Builds (train, test). True class mean is [W a_c ; b_c]: the first block
// maps the semantic embedding through a shared column-orthonormal W (so the
// semantic geometry carries over), the second is a per-class nuisance vector
// independent of the semantic space. Train holds seen classes only; test
// holds every class with equal counts. Pure function of (space, spec).
std::pair<FeatureDataset, FeatureDataset> make_synthetic_dataset(
    const SemanticSpace& space, const SyntheticSpec& spec);

// True class means of the synthetic recipe, one row per class.
Matrix synthetic_class_means(const SemanticSpace& space, const SyntheticSpec& spec);

// CSV with header "label,provenance,group,f0..f{d-1}"; labels are class
// names resolved against the space. Values print at 17 significant digits
// so a load/export round trip is bit-exact.
FeatureDataset load_feature_dataset(const std::string& path, const SemanticSpace& space,
                                    bool generator_training_input = false);
void export_features(const FeatureDataset& dataset, const SemanticSpace& space,
                     const std::string& path);

// Seeded shuffle of [0, n) chopped into batches; the last batch may be
// short. Every index appears exactly once.
std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, std::size_t batch_size,
                                                    Rng& rng);

}  // namespace pading
