#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pading/dataset.hpp"
#include "pading/optim.hpp"

namespace pading {

enum class ClassifierMode { kLearned, kProjection };

struct ClassifierTrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  SgdState sgd;  // lr 1e-3, wd 5e-4, momentum 0.9
  std::uint64_t seed = 1;
};

// Linear classification head over class embeddings. Learned mode trains
// with cross-entropy; projection mode pins the weights to the (adapted)
// semantic embeddings and never trains.
class Classifier {
 public:
  Classifier(std::size_t d_x, std::size_t n_classes, ClassifierMode mode,
             std::uint64_t seed);

  std::size_t d_x() const { return weights_.value.rows(); }
  std::size_t n_classes() const { return weights_.value.cols(); }
  ClassifierMode mode() const { return mode_; }

  Matrix logits(const Matrix& x) const;
  std::vector<std::size_t> predict(const Matrix& x) const;  // ties -> lowest index

  Param& weights() { return weights_; }
  Param& bias() { return bias_; }
  const Param& weights() const { return weights_; }
  const Param& bias() const { return bias_; }
  std::vector<Param*> params() { return {&weights_, &bias_}; }

  // Sets column c to the semantic embedding of class c, mapped through a
  // fixed random column-orthonormal adapter when d_x != d_a. Used by
  // projection mode and by the expansion of a seen-only head.
  void set_columns_from_semantics(const SemanticSpace& space,
                                  const std::vector<std::size_t>& class_ids,
                                  std::uint64_t adapter_seed);

  // Grows the head from n_seen to n_classes outputs, initializing the new
  // columns from semantic embeddings. Existing columns are untouched.
  void expand_to(const SemanticSpace& space, std::uint64_t adapter_seed);

 private:
  Param weights_;  // d_x x C
  Param bias_;     // 1 x C
  ClassifierMode mode_;
};

struct GzslReport {
  std::vector<std::string> class_names;
  std::vector<double> per_class_accuracy;  // by class id
  std::vector<std::size_t> counts;         // test samples per class
  double seen_mean = 0.0;
  double unseen_mean = 0.0;
  double hm = 0.0;
  std::vector<std::string> warnings;
};

// 2 a b / (a + b) with guarded division: 0 when either input is 0.
// Inputs must be nonnegative and unit-consistent.
double harmonic_mean(double p_seen, double p_unseen);

// Trains (or, in projection mode, constructs) the seen-classes head.
// The train set must contain only real seen rows.
Classifier pretrain_classifier(const FeatureDataset& train, const SemanticSpace& space,
                               const ClassifierTrainConfig& cfg,
                               ClassifierMode mode = ClassifierMode::kLearned,
                               std::vector<double>* loss_curve = nullptr);

// Expands the head to all classes and fine-tunes on real seen plus
// synthetic unseen rows with the same SGD recipe. Projection-mode heads
// are expanded but never trained.
Classifier retrain_classifier(Classifier classifier, const FeatureDataset& real_seen,
                              const FeatureDataset& synthetic_unseen,
                              const SemanticSpace& space, const ClassifierTrainConfig& cfg,
                              std::vector<double>* loss_curve = nullptr);

// Mean per-class accuracy per group plus their harmonic mean. Classes with
// no test samples are excluded from their group mean with a warning.
GzslReport evaluate_gzsl(const Classifier& classifier, const FeatureDataset& test,
                         const SemanticSpace& space);

// Plain cross-entropy training used by both pretrain and retrain.
void train_classifier_ce(Classifier& classifier, const FeatureDataset& data,
                         const ClassifierTrainConfig& cfg,
                         std::vector<double>* loss_curve);

}  // namespace pading
