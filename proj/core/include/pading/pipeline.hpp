#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pading/align.hpp"
#include "pading/classifier.hpp"
#include "pading/dataset.hpp"
#include "pading/disentangle.hpp"
#include "pading/generator.hpp"

namespace pading {

// Ablation ladder: projection-only head, direct MLP generator (GMMN),
// primitive generator alone, primitive + alignment on raw features,
// and the full pipeline with disentanglement.
enum class Ablation { kProjection, kGmmn, kPOnly, kPA, kFull };

std::string ablation_name(Ablation a);
Ablation parse_ablation(const std::string& name);

// Direct MLP generator baseline: noise concatenated to the semantic
// embedding, one hidden layer, trained with the MMD objective only.
struct GmmnModel {
  std::size_t d_a = 0;
  std::size_t d_z = 0;
  std::size_t d_x = 0;
  Param w1, b1, w2, b2;
  double leaky_slope = 0.2;

  std::size_t noise_dim() const { return d_z; }
  std::vector<Param*> params();
  std::vector<std::pair<std::string, Param*>> named_params();
};

GmmnModel init_gmmn(std::size_t d_a, std::size_t d_z, std::size_t d_x, std::size_t hidden,
                    std::uint64_t seed);
Value gmmn_generate_graph(Graph& g, GmmnModel& model, Value semantic_batch, Value noise);

// Either generator behind one synthesis surface.
struct SynthModel {
  std::variant<GeneratorModel, GmmnModel> impl;

  std::size_t noise_dim() const;
  std::size_t d_a() const;
  std::size_t d_x() const;
  Value generate_graph(Graph& g, Value semantic_batch, Value noise);
  Matrix generate(const Matrix& semantic_batch, const Matrix& noise);
  std::vector<Param*> params();
  std::vector<std::pair<std::string, Param*>> named_params();
};

struct TrainConfig {
  double lambda = 0.002;  // weight of the disentanglement + alignment terms
  double tau = 0.1;       // shared temperature

  std::size_t generator_epochs = 60;
  std::size_t classes_per_step = 4;        // seen classes matched per step
  std::size_t mmd_batch_per_class = 16;    // real/synthetic rows per class
  std::size_t align_unseen_per_class = 4;  // synthetic unseen rows per step
  bool mmd_per_class = true;               // pooled matching when false
  double generator_lr = 2e-4;

  std::size_t n_primitives = 400;
  std::size_t d_k = 64;
  std::size_t generator_layers = 3;
  std::size_t gmmn_hidden = 128;

  MmdConfig mmd;
  DisentangleConfig disentangle;
  AlignConfig align;
  ClassifierTrainConfig pretrain;   // defaults: 100 epochs, SGD 1e-3/5e-4/0.9
  ClassifierTrainConfig finetune;   // fine-tuning schedule (50 epochs default)

  std::size_t synthetic_per_class = 100;
  Ablation ablation = Ablation::kFull;
  bool include_synthetic_seen_in_retrain = false;

  TrainConfig() { finetune.epochs = 50; }
  void validate() const;
};

struct GeneratorTrainResult {
  SynthModel model;
  std::optional<DisentangleModules> disentangle;  // full ablation only
  std::vector<double> loss_curve;                 // mean total loss per epoch
};

// Algorithm step 3: trains the configured generator on real seen features,
// with disentanglement and alignment terms as the ablation dictates.
GeneratorTrainResult train_generator(const FeatureDataset& train,
                                     const SemanticSpace& space, const TrainConfig& cfg,
                                     std::uint64_t seed);

// Builds the step loss for a fixed micro-batch; shared by training,
// gradient verification, and tests. real_batch rows must be grouped by
// class as described by class_sizes (one real slice per entry of
// class_ids); synthetic slices use the same per-class counts.
struct StepBatch {
  Matrix real_features;                 // grouped by class
  std::vector<std::size_t> class_ids;   // seen class per group
  std::vector<std::size_t> class_sizes; // rows per group
  Matrix unseen_semantics;              // one row per synthetic unseen sample
  std::vector<std::size_t> unseen_labels;
  Matrix noise_seen;                    // rows = total real rows
  Matrix noise_unseen;                  // rows = unseen_semantics rows
};

struct StepLosses {
  Value total;
  double generator = 0.0;
  double disentangle = 0.0;
  double alignment = 0.0;
};

StepLosses build_step_loss(Graph& g, SynthModel& model,
                           std::optional<DisentangleModules>& dis,
                           const SemanticSpace& space, const TrainConfig& cfg,
                           const StepBatch& batch, bool train_mode, Rng* rng);

// Algorithm step 3 output -> synthetic unseen features with fresh noise.
FeatureDataset synthesize_unseen(SynthModel& model, const SemanticSpace& space,
                                 std::size_t per_class, std::uint64_t seed);
FeatureDataset synthesize_seen(SynthModel& model, const SemanticSpace& space,
                               std::size_t per_class, std::uint64_t seed);

// One full run of the training algorithm: pretrain the head on real seen
// features, train the generator (unless the row is projection), synthesize
// unseen features, fine-tune the expanded head, and evaluate GZSL.
struct RunResult {
  GzslReport report;
  double pretrain_seen_mean = 0.0;  // seen accuracy of the seen-only head
  std::vector<double> pretrain_curve;
  std::vector<double> generator_curve;
  std::vector<double> finetune_curve;
  std::optional<SynthModel> model;
  std::optional<DisentangleModules> disentangle;
};

// When timings is non-null, each stage appends its wall time in ms.
RunResult run_experiment(const SemanticSpace& space, const FeatureDataset& train,
                         const FeatureDataset& test, const TrainConfig& cfg,
                         std::uint64_t seed,
                         std::vector<std::pair<std::string, double>>* timings = nullptr);

// Ablation table: every requested row runs the full algorithm on the same
// data with the same seed list.
struct AblationRow {
  Ablation ablation;
  std::vector<GzslReport> per_seed;
  std::vector<double> per_seed_pretrain_seen;
  double mean_seen = 0.0;
  double mean_unseen = 0.0;
  double mean_hm = 0.0;
};

std::vector<AblationRow> run_ablation(const SemanticSpace& space,
                                      const FeatureDataset& train,
                                      const FeatureDataset& test, const TrainConfig& cfg,
                                      const std::vector<Ablation>& rows,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::size_t threads = 1);

// Primitive-count sweep over the otherwise-unchanged config.
struct SweepRow {
  std::size_t n_primitives = 0;
  std::vector<GzslReport> per_seed;
  double mean_unseen = 0.0;
  double mean_hm = 0.0;
};

std::vector<SweepRow> run_primitive_sweep(const SemanticSpace& space,
                                          const FeatureDataset& train,
                                          const FeatureDataset& test,
                                          const TrainConfig& cfg,
                                          const std::vector<std::size_t>& counts,
                                          const std::vector<std::uint64_t>& seeds,
                                          std::size_t threads = 1);

}  // namespace pading
