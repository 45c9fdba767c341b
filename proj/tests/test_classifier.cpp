#include <doctest.h>

#include <cmath>

#include "pading/classifier.hpp"

using namespace pading;

namespace {

SemanticSpace bench_space(std::size_t d_a = 8) {
  Rng rng(2);
  return make_synthetic_space(4, 2, d_a, 2, 0.4, rng);
}

SyntheticSpec clean_spec(std::size_t d_a, std::size_t d_x, std::size_t nuisance = 0) {
  SyntheticSpec spec;
  spec.d_a = d_a;
  spec.d_x = d_x;
  spec.nuisance_dim = nuisance;
  spec.nuisance_scale = 0.0;
  spec.related_noise = 0.0;
  spec.samples_per_class = 12;
  spec.test_samples_per_class = 6;
  return spec;
}

double train_accuracy(const Classifier& head, const FeatureDataset& data) {
  const auto pred = head.predict(data.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) correct += pred[i] == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("harmonic mean identities") {
  CHECK(harmonic_mean(0.42, 0.42) == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(harmonic_mean(0.0, 0.9) == 0.0);
  CHECK(harmonic_mean(0.9, 0.0) == 0.0);
  CHECK_THROWS_AS(harmonic_mean(-0.1, 0.2), ParameterError);
}

TEST_CASE("harmonic mean of the reference table rows") {
  CHECK(harmonic_mean(41.5, 15.3) == doctest::Approx(22.357394366197187).epsilon(1e-12));
  CHECK(harmonic_mean(53.0, 8.0) == doctest::Approx(13.901639344262295).epsilon(1e-12));
  CHECK(harmonic_mean(43.0, 3.6) == doctest::Approx(6.643776824034335).epsilon(1e-12));
  // fractional form of the first row
  CHECK(harmonic_mean(0.415, 0.153) == doctest::Approx(0.2234).epsilon(2e-3));
}

TEST_CASE("pretraining on separable data reaches 99% train accuracy") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  ClassifierTrainConfig cfg;
  cfg.epochs = 150;
  cfg.batch_size = 16;
  cfg.seed = 5;
  const Classifier head = pretrain_classifier(train, space, cfg);
  CHECK(head.n_classes() == space.n_seen());
  CHECK(train_accuracy(head, train) >= 0.99);
}

TEST_CASE("projection mode pins weights to the semantic rows when d_x == d_a") {
  const SemanticSpace space = bench_space(8);
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 8));
  ClassifierTrainConfig cfg;
  const Classifier head =
      pretrain_classifier(train, space, cfg, ClassifierMode::kProjection);
  for (std::size_t c = 0; c < space.n_seen(); ++c) {
    for (std::size_t r = 0; r < head.d_x(); ++r) {
      CHECK(head.weights().value(r, c) ==
            doctest::Approx(space.embeddings()(c, r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pretraining validates its input") {
  const SemanticSpace space = bench_space();
  ClassifierTrainConfig cfg;
  FeatureDataset empty;
  empty.features = Matrix(0, 12);
  CHECK_THROWS_AS(pretrain_classifier(empty, space, cfg), ValidationError);

  FeatureDataset bad;
  bad.features = Matrix(1, 12);
  bad.labels = {4};  // unseen class
  bad.provenance = {Provenance::kReal};
  bad.groups = {Group::kUnseen};
  CHECK_THROWS_AS(pretrain_classifier(bad, space, cfg), ValidationError);
}

TEST_CASE("a perfect classifier scores 1.0 everywhere") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  // cheat: classify by matching the true class means
  const Matrix means = synthetic_class_means(space, clean_spec(8, 12, 2));
  Classifier head(12, space.n_classes(), ClassifierMode::kLearned, 1);
  for (std::size_t c = 0; c < space.n_classes(); ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < 12; ++j) sq += means(c, j) * means(c, j);
    for (std::size_t j = 0; j < 12; ++j) head.weights().value(j, c) = means(c, j);
    head.bias().value(0, c) = -0.5 * sq;  // nearest-mean decision rule
  }
  const GzslReport report = evaluate_gzsl(head, test, space);
  CHECK(report.seen_mean == doctest::Approx(1.0));
  CHECK(report.unseen_mean == doctest::Approx(1.0));
  CHECK(report.hm == doctest::Approx(1.0));
  for (double acc : report.per_class_accuracy) CHECK(acc == doctest::Approx(1.0));
}

TEST_CASE("zero unseen accuracy forces HM to zero") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  Classifier head(12, space.n_classes(), ClassifierMode::kLearned, 1);
  // logits fixed: seen columns strongly positive, unseen strongly negative
  head.weights().value.fill(0.0);
  for (std::size_t c = 0; c < space.n_classes(); ++c) {
    head.bias().value(0, c) = space.is_seen(c) ? 1.0 + static_cast<double>(c) : -10.0;
  }
  const GzslReport report = evaluate_gzsl(head, test, space);
  CHECK(report.unseen_mean == 0.0);
  CHECK(report.hm == 0.0);
}

TEST_CASE("prediction ties break toward the lowest class index") {
  Classifier head(3, 4, ClassifierMode::kLearned, 1);
  head.weights().value.fill(0.0);
  head.bias().value.fill(0.0);
  const auto pred = head.predict(Matrix(5, 3));
  for (std::size_t p : pred) CHECK(p == 0);
}

TEST_CASE("gzsl evaluation warns about classes without test samples") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  // drop every row of class 1
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test.labels[i] != 1) keep.push_back(i);
  }
  const FeatureDataset pruned = test.subset(keep);
  Classifier head(12, space.n_classes(), ClassifierMode::kLearned, 3);
  const GzslReport report = evaluate_gzsl(head, pruned, space);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find(space.name_of(1)) != std::string::npos);
  CHECK(report.counts[1] == 0);
}

TEST_CASE("hm in a report always matches harmonic_mean of the group means") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  Rng rng(7);
  for (int rep = 0; rep < 3; ++rep) {
    Classifier head(12, space.n_classes(), ClassifierMode::kLearned, rng.next_u64());
    const GzslReport report = evaluate_gzsl(head, test, space);
    CHECK(report.hm ==
          doctest::Approx(harmonic_mean(report.seen_mean, report.unseen_mean))
              .epsilon(1e-9));
  }
}

TEST_CASE("retraining expands the head and learns the union") {
  const SemanticSpace space = bench_space();
  const SyntheticSpec spec = clean_spec(8, 12, 2);
  auto [train, test] = make_synthetic_dataset(space, spec);

  ClassifierTrainConfig pre;
  pre.epochs = 120;
  pre.batch_size = 16;
  Classifier head = pretrain_classifier(train, space, pre);

  // synthetic stand-in: unseen rows at the true class means
  const Matrix means = synthetic_class_means(space, spec);
  FeatureDataset synth;
  synth.features = Matrix(space.n_unseen() * 10, 12);
  std::size_t row = 0;
  for (std::size_t u : space.unseen_ids()) {
    for (int k = 0; k < 10; ++k, ++row) {
      std::copy(means.row(u).begin(), means.row(u).end(), synth.features.row(row).begin());
      synth.labels.push_back(u);
      synth.provenance.push_back(Provenance::kSynthetic);
      synth.groups.push_back(Group::kUnseen);
    }
  }

  ClassifierTrainConfig fine;
  fine.epochs = 80;
  fine.batch_size = 16;
  Classifier tuned = retrain_classifier(std::move(head), train, synth, space, fine);
  CHECK(tuned.n_classes() == space.n_classes());

  FeatureDataset joint = train;
  joint.append_all(synth);
  CHECK(train_accuracy(tuned, joint) >= 0.90);
}

TEST_CASE("retraining with zero epochs only expands") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  ClassifierTrainConfig pre;
  pre.epochs = 20;
  pre.batch_size = 16;
  Classifier head = pretrain_classifier(train, space, pre);
  const Matrix seen_weights = head.weights().value;

  FeatureDataset synth;
  synth.features = Matrix(2, 12);
  synth.labels = {4, 5};
  synth.provenance = {Provenance::kSynthetic, Provenance::kSynthetic};
  synth.groups = {Group::kUnseen, Group::kUnseen};

  ClassifierTrainConfig fine;
  fine.epochs = 0;
  Classifier tuned = retrain_classifier(std::move(head), train, synth, space, fine);
  CHECK(tuned.n_classes() == space.n_classes());
  for (std::size_t c = 0; c < space.n_seen(); ++c) {
    for (std::size_t r = 0; r < tuned.d_x(); ++r) {
      CHECK(tuned.weights().value(r, c) == seen_weights(r, c));
    }
  }
}

TEST_CASE("retraining demands a non-empty synthetic set") {
  const SemanticSpace space = bench_space();
  auto [train, test] = make_synthetic_dataset(space, clean_spec(8, 12, 2));
  ClassifierTrainConfig pre;
  pre.epochs = 1;
  Classifier head = pretrain_classifier(train, space, pre);
  FeatureDataset empty;
  empty.features = Matrix(0, 12);
  CHECK_THROWS_AS(
      retrain_classifier(std::move(head), train, empty, space, ClassifierTrainConfig{}),
      ValidationError);
}

}  // TEST_SUITE
