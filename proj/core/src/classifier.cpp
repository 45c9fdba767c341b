#include "pading/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "pading/graph.hpp"

namespace pading {

namespace {

// fixed random column-orthonormal adapter d_a -> d_x (via Gram-Schmidt on a
// seeded Gaussian); identity-like passthrough when dims match
Matrix semantic_adapter(std::size_t d_x, std::size_t d_a, std::uint64_t seed) {
  if (d_x == d_a) return Matrix::identity(d_x);
  if (d_x < d_a) {
    throw ParameterError("semantic_adapter: d_x < d_a is not supported (" +
                         std::to_string(d_x) + " < " + std::to_string(d_a) + ")");
  }
  Rng rng(seed);
  Matrix g = rng.normal_matrix(d_x, d_a);
  for (std::size_t c = 0; c < d_a; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d_x; ++r) dot += g(r, c) * g(r, prev);
      for (std::size_t r = 0; r < d_x; ++r) g(r, c) -= dot * g(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < d_x; ++r) norm += g(r, c) * g(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < d_x; ++r) g(r, c) /= norm;
  }
  return g;
}

}  // namespace

Classifier::Classifier(std::size_t d_x, std::size_t n_classes, ClassifierMode mode,
                       std::uint64_t seed)
    : weights_(Matrix(d_x, n_classes)), bias_(Matrix(1, n_classes)), mode_(mode) {
  if (d_x == 0 || n_classes == 0) {
    throw ParameterError("Classifier: d_x and n_classes must be >= 1");
  }
  if (mode_ == ClassifierMode::kLearned) {
    Rng rng(seed);
    weights_.value = rng.normal_matrix(d_x, n_classes,
                                       1.0 / std::sqrt(static_cast<double>(d_x)));
  }
}

Matrix Classifier::logits(const Matrix& x) const {
  if (x.cols() != d_x()) {
    throw DimensionError("Classifier::logits: input is " + x.shape_str() +
                         ", head expects d_x=" + std::to_string(d_x()));
  }
  Matrix out = matmul(x, weights_.value);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bias_.value(0, j);
  return out;
}

std::vector<std::size_t> Classifier::predict(const Matrix& x) const {
  const Matrix l = logits(x);
  std::vector<std::size_t> out(l.rows());
  for (std::size_t i = 0; i < l.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < l.cols(); ++j) {
      if (l(i, j) > l(i, best)) best = j;  // strict: ties stay at lowest index
    }
    out[i] = best;
  }
  return out;
}

void Classifier::set_columns_from_semantics(const SemanticSpace& space,
                                            const std::vector<std::size_t>& class_ids,
                                            std::uint64_t adapter_seed) {
  const Matrix adapter = semantic_adapter(d_x(), space.dim(), adapter_seed);
  for (std::size_t c : class_ids) {
    if (c >= n_classes()) {
      throw LookupError("set_columns_from_semantics: class id " + std::to_string(c) +
                        " beyond head width");
    }
    for (std::size_t r = 0; r < d_x(); ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < space.dim(); ++j) {
        s += adapter(r, j) * space.embeddings()(c, j);
      }
      weights_.value(r, c) = s;
    }
    bias_.value(0, c) = 0.0;
  }
}

void Classifier::expand_to(const SemanticSpace& space, std::uint64_t adapter_seed) {
  const std::size_t old_c = n_classes();
  const std::size_t new_c = space.n_classes();
  if (new_c < old_c) {
    throw ParameterError("Classifier::expand_to: cannot shrink from " +
                         std::to_string(old_c) + " to " + std::to_string(new_c));
  }
  Matrix w(d_x(), new_c);
  Matrix b(1, new_c);
  for (std::size_t r = 0; r < d_x(); ++r)
    for (std::size_t c = 0; c < old_c; ++c) w(r, c) = weights_.value(r, c);
  for (std::size_t c = 0; c < old_c; ++c) b(0, c) = bias_.value(0, c);
  weights_ = Param(std::move(w));
  bias_ = Param(std::move(b));

  std::vector<std::size_t> fresh;
  for (std::size_t c = old_c; c < new_c; ++c) fresh.push_back(c);
  set_columns_from_semantics(space, fresh, adapter_seed);
}

double harmonic_mean(double p_seen, double p_unseen) {
  if (p_seen < 0.0 || p_unseen < 0.0) {
    throw ParameterError("harmonic_mean: inputs must be nonnegative");
  }
  if (p_seen == 0.0 || p_unseen == 0.0) return 0.0;
  return 2.0 * p_seen * p_unseen / (p_seen + p_unseen);
}

void train_classifier_ce(Classifier& classifier, const FeatureDataset& data,
                         const ClassifierTrainConfig& cfg,
                         std::vector<double>* loss_curve) {
  if (classifier.mode() == ClassifierMode::kProjection) return;  // weights are pinned
  if (data.size() == 0) {
    throw ValidationError("train_classifier_ce: empty training set");
  }
  SgdState sgd = cfg.sgd;
  Rng rng(cfg.seed);
  auto params = classifier.params();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::size_t steps = 0;
    for (const auto& batch : batch_indices(data.size(), cfg.batch_size, rng)) {
      const FeatureDataset sub = data.subset(batch);
      Graph g;
      Value logits = g.add_rowvec(
          g.matmul(g.input(sub.features), g.param(classifier.weights())),
          g.param(classifier.bias()));
      Value loss = g.softmax_cross_entropy_mean(logits, sub.labels);
      const double l = loss.scalar();
      if (!std::isfinite(l)) {
        throw DivergenceError("train_classifier_ce: non-finite loss at epoch " +
                              std::to_string(epoch));
      }
      zero_grads(params);
      g.backward(loss);
      sgd_step(params, sgd);
      epoch_loss += l;
      ++steps;
    }
    if (loss_curve) loss_curve->push_back(epoch_loss / static_cast<double>(steps));
  }
}

Classifier pretrain_classifier(const FeatureDataset& train, const SemanticSpace& space,
                               const ClassifierTrainConfig& cfg, ClassifierMode mode,
                               std::vector<double>* loss_curve) {
  if (train.size() == 0) {
    throw ValidationError("pretrain_classifier: empty training set");
  }
  train.validate(space);
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.groups[i] == Group::kUnseen || train.provenance[i] != Provenance::kReal) {
      throw ValidationError("pretrain_classifier: row " + std::to_string(i) +
                            " is not a real seen sample");
    }
  }
  Classifier head(train.dim(), space.n_seen(), mode, cfg.seed);
  if (mode == ClassifierMode::kProjection) {
    head.set_columns_from_semantics(space, space.seen_ids(), cfg.seed);
    return head;
  }
  train_classifier_ce(head, train, cfg, loss_curve);
  return head;
}

Classifier retrain_classifier(Classifier classifier, const FeatureDataset& real_seen,
                              const FeatureDataset& synthetic_unseen,
                              const SemanticSpace& space, const ClassifierTrainConfig& cfg,
                              std::vector<double>* loss_curve) {
  if (synthetic_unseen.size() == 0) {
    throw ValidationError("retrain_classifier: synthetic unseen set is empty");
  }
  real_seen.validate(space);
  synthetic_unseen.validate(space);
  for (std::size_t i = 0; i < synthetic_unseen.size(); ++i) {
    if (synthetic_unseen.groups[i] != Group::kUnseen ||
        synthetic_unseen.provenance[i] != Provenance::kSynthetic) {
      throw ValidationError("retrain_classifier: row " + std::to_string(i) +
                            " of the unseen set is not synthetic unseen");
    }
  }
  if (classifier.n_classes() != space.n_classes()) {
    classifier.expand_to(space, cfg.seed);
  }
  if (classifier.mode() == ClassifierMode::kProjection || cfg.epochs == 0) {
    return classifier;
  }
  FeatureDataset joint = real_seen;
  joint.append_all(synthetic_unseen);
  train_classifier_ce(classifier, joint, cfg, loss_curve);
  return classifier;
}

GzslReport evaluate_gzsl(const Classifier& classifier, const FeatureDataset& test,
                         const SemanticSpace& space) {
  test.validate(space);
  if (classifier.n_classes() != space.n_classes()) {
    throw ParameterError("evaluate_gzsl: head has " +
                         std::to_string(classifier.n_classes()) + " outputs, space has " +
                         std::to_string(space.n_classes()) + " classes");
  }
  bool has_seen = false, has_unseen = false;
  for (Group gp : test.groups) {
    has_seen |= gp == Group::kSeen;
    has_unseen |= gp == Group::kUnseen;
  }
  if (!has_seen || !has_unseen) {
    throw ValidationError("evaluate_gzsl: test set must cover both groups");
  }

  const auto pred = classifier.predict(test.features);
  GzslReport report;
  report.class_names = space.class_names();
  report.per_class_accuracy.assign(space.n_classes(), 0.0);
  report.counts.assign(space.n_classes(), 0);
  std::vector<std::size_t> correct(space.n_classes(), 0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    ++report.counts[test.labels[i]];
    if (pred[i] == test.labels[i]) ++correct[test.labels[i]];
  }

  double seen_sum = 0.0, unseen_sum = 0.0;
  std::size_t seen_n = 0, unseen_n = 0;
  for (std::size_t c = 0; c < space.n_classes(); ++c) {
    if (report.counts[c] == 0) {
      report.warnings.push_back("class '" + space.name_of(c) +
                                "' has no test samples; excluded from its group mean");
      continue;
    }
    report.per_class_accuracy[c] =
        static_cast<double>(correct[c]) / static_cast<double>(report.counts[c]);
    if (space.is_seen(c)) {
      seen_sum += report.per_class_accuracy[c];
      ++seen_n;
    } else {
      unseen_sum += report.per_class_accuracy[c];
      ++unseen_n;
    }
  }
  report.seen_mean = seen_n ? seen_sum / static_cast<double>(seen_n) : 0.0;
  report.unseen_mean = unseen_n ? unseen_sum / static_cast<double>(unseen_n) : 0.0;
  report.hm = harmonic_mean(report.seen_mean, report.unseen_mean);
  return report;
}

}  // namespace pading
