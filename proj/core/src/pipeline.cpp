#include "pading/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>
#include <type_traits>

namespace pading {

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kProjection: return "projection";
    case Ablation::kGmmn: return "gmmn";
    case Ablation::kPOnly: return "p_only";
    case Ablation::kPA: return "p_a";
    case Ablation::kFull: return "full";
  }
  throw ParameterError("ablation_name: bad enum value");
}

Ablation parse_ablation(const std::string& name) {
  if (name == "projection") return Ablation::kProjection;
  if (name == "gmmn") return Ablation::kGmmn;
  if (name == "p_only") return Ablation::kPOnly;
  if (name == "p_a") return Ablation::kPA;
  if (name == "full") return Ablation::kFull;
  throw ParameterError("unknown ablation '" + name +
                       "' (expected projection|gmmn|p_only|p_a|full)");
}

// --- GMMN baseline ----------------------------------------------------------

std::vector<Param*> GmmnModel::params() { return {&w1, &b1, &w2, &b2}; }

std::vector<std::pair<std::string, Param*>> GmmnModel::named_params() {
  return {{"gmmn.w1", &w1}, {"gmmn.b1", &b1}, {"gmmn.w2", &w2}, {"gmmn.b2", &b2}};
}

GmmnModel init_gmmn(std::size_t d_a, std::size_t d_z, std::size_t d_x, std::size_t hidden,
                    std::uint64_t seed) {
  if (d_a == 0 || d_z == 0 || d_x == 0 || hidden == 0) {
    throw ParameterError("init_gmmn: dims must be >= 1");
  }
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(d_a + d_z));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  return GmmnModel{d_a,
                   d_z,
                   d_x,
                   Param(rng.normal_matrix(d_a + d_z, hidden, s1)),
                   Param(Matrix(1, hidden)),
                   Param(rng.normal_matrix(hidden, d_x, s2)),
                   Param(Matrix(1, d_x))};
}

Value gmmn_generate_graph(Graph& g, GmmnModel& model, Value semantic_batch, Value noise) {
  if (semantic_batch.cols() != model.d_a || noise.cols() != model.d_z ||
      semantic_batch.rows() != noise.rows()) {
    throw DimensionError("gmmn_generate: batch " + semantic_batch.matrix().shape_str() +
                         " / noise " + noise.matrix().shape_str() + " do not fit d_a=" +
                         std::to_string(model.d_a) + ", d_z=" + std::to_string(model.d_z));
  }
  Value h = g.concat_cols(semantic_batch, noise);
  h = g.add_rowvec(g.matmul(h, g.param(model.w1)), g.param(model.b1));
  h = g.leaky_relu(h, model.leaky_slope);
  return g.add_rowvec(g.matmul(h, g.param(model.w2)), g.param(model.b2));
}

// --- SynthModel dispatch ------------------------------------------------------

std::size_t SynthModel::noise_dim() const {
  return std::visit([](const auto& m) { return m.noise_dim(); }, impl);
}

std::size_t SynthModel::d_a() const {
  return std::visit([](const auto& m) { return m.d_a; }, impl);
}

std::size_t SynthModel::d_x() const {
  return std::visit([](const auto& m) { return m.d_x; }, impl);
}

Value SynthModel::generate_graph(Graph& g, Value semantic_batch, Value noise) {
  if (auto* gen = std::get_if<GeneratorModel>(&impl)) {
    return pading::generate_graph(g, *gen, semantic_batch, noise);
  }
  return gmmn_generate_graph(g, std::get<GmmnModel>(impl), semantic_batch, noise);
}

Matrix SynthModel::generate(const Matrix& semantic_batch, const Matrix& noise) {
  Graph g;
  return generate_graph(g, g.input(semantic_batch), g.input(noise)).matrix();
}

std::vector<Param*> SynthModel::params() {
  return std::visit([](auto& m) { return m.params(); }, impl);
}

std::vector<std::pair<std::string, Param*>> SynthModel::named_params() {
  return std::visit([](auto& m) { return m.named_params(); }, impl);
}

// --- config -------------------------------------------------------------------

void TrainConfig::validate() const {
  if (lambda < 0.0) throw ParameterError("TrainConfig: lambda must be >= 0");
  if (!(tau > 0.0)) throw ParameterError("TrainConfig: tau must be > 0");
  if (classes_per_step == 0 || mmd_batch_per_class == 0) {
    throw ParameterError("TrainConfig: batch knobs must be >= 1");
  }
  if (synthetic_per_class == 0) {
    throw ParameterError("TrainConfig: synthetic_per_class must be >= 1");
  }
  mmd.validate();
}

namespace {

Matrix repeat_rows(const Matrix& src, const std::vector<std::size_t>& row_ids,
                   const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  Matrix out(total, src.cols());
  std::size_t r = 0;
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k, ++r) {
      const auto row = src.row(row_ids[i]);
      std::copy(row.begin(), row.end(), out.row(r).begin());
    }
  }
  return out;
}

AlignConfig resolved_align(const TrainConfig& cfg) {
  AlignConfig a = cfg.align;
  a.tau = cfg.tau;
  return a;
}

DisentangleConfig resolved_disentangle(const TrainConfig& cfg) {
  DisentangleConfig d = cfg.disentangle;
  d.tau = cfg.tau;
  return d;
}

}  // namespace

StepLosses build_step_loss(Graph& g, SynthModel& model,
                           std::optional<DisentangleModules>& dis,
                           const SemanticSpace& space, const TrainConfig& cfg,
                           const StepBatch& batch, bool train_mode, Rng* rng) {
  const Ablation ab = cfg.ablation;
  if (ab == Ablation::kProjection) {
    throw ParameterError("build_step_loss: projection row trains no generator");
  }
  const bool needs_align = ab == Ablation::kPA || ab == Ablation::kFull;
  const bool needs_disentangle = ab == Ablation::kFull;
  if (needs_disentangle && !dis) {
    throw StateError("build_step_loss: full ablation needs disentangle modules");
  }

  // synthetic seen batch mirrors the real per-class layout
  std::size_t total_seen = 0;
  for (std::size_t s : batch.class_sizes) total_seen += s;
  if (batch.real_features.rows() != total_seen) {
    throw DimensionError("build_step_loss: real rows do not match class sizes");
  }
  Matrix sem_seen = repeat_rows(space.embeddings(), batch.class_ids, batch.class_sizes);

  const std::size_t n_unseen_rows = needs_align ? batch.unseen_semantics.rows() : 0;
  Value x_syn_all;
  {
    Matrix sem_all = sem_seen;
    Matrix noise_all = batch.noise_seen;
    if (n_unseen_rows > 0) {
      sem_all = Matrix(sem_seen.rows() + batch.unseen_semantics.rows(), sem_seen.cols());
      std::copy(sem_seen.data().begin(), sem_seen.data().end(), sem_all.data().begin());
      std::copy(batch.unseen_semantics.data().begin(), batch.unseen_semantics.data().end(),
                sem_all.data().begin() + static_cast<std::ptrdiff_t>(sem_seen.size()));
      noise_all = Matrix(batch.noise_seen.rows() + batch.noise_unseen.rows(),
                         batch.noise_seen.cols());
      std::copy(batch.noise_seen.data().begin(), batch.noise_seen.data().end(),
                noise_all.data().begin());
      std::copy(batch.noise_unseen.data().begin(), batch.noise_unseen.data().end(),
                noise_all.data().begin() +
                    static_cast<std::ptrdiff_t>(batch.noise_seen.size()));
    }
    x_syn_all = model.generate_graph(g, g.input(std::move(sem_all)),
                                     g.input(std::move(noise_all)));
  }
  Value x_syn_seen =
      n_unseen_rows > 0 ? g.slice_rows(x_syn_all, 0, total_seen) : x_syn_all;

  // generator objective: per-class (or pooled) MMD between real and synthetic
  StepLosses out;
  Value l_g;
  if (cfg.mmd_per_class) {
    Value acc;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < batch.class_ids.size(); ++i) {
      const std::size_t sz = batch.class_sizes[i];
      Matrix real_c(sz, batch.real_features.cols());
      std::copy(batch.real_features.data().begin() +
                    static_cast<std::ptrdiff_t>(offset * batch.real_features.cols()),
                batch.real_features.data().begin() +
                    static_cast<std::ptrdiff_t>((offset + sz) *
                                                batch.real_features.cols()),
                real_c.data().begin());
      Value syn_c = g.slice_rows(x_syn_seen, offset, offset + sz);
      Value term = mmd_loss_graph(g, g.input(std::move(real_c)), syn_c, cfg.mmd);
      acc = (i == 0) ? term : g.add(acc, term);
      offset += sz;
    }
    l_g = g.affine(acc, 1.0 / static_cast<double>(batch.class_ids.size()));
  } else {
    l_g = mmd_loss_graph(g, g.input(batch.real_features), x_syn_seen, cfg.mmd);
  }
  out.generator = l_g.scalar();

  Value total = l_g;
  if (needs_align) {
    // labels/origins for real rows, synthetic seen rows, synthetic unseen rows
    std::vector<std::size_t> labels;
    std::vector<Origin> origins;
    labels.reserve(2 * total_seen + n_unseen_rows);
    for (std::size_t i = 0; i < batch.class_ids.size(); ++i) {
      for (std::size_t k = 0; k < batch.class_sizes[i]; ++k) {
        labels.push_back(batch.class_ids[i]);
        origins.push_back(Origin::kRealSeen);
      }
    }
    for (std::size_t i = 0; i < batch.class_ids.size(); ++i) {
      for (std::size_t k = 0; k < batch.class_sizes[i]; ++k) {
        labels.push_back(batch.class_ids[i]);
        origins.push_back(Origin::kSyntheticSeen);
      }
    }
    for (std::size_t l : batch.unseen_labels) {
      labels.push_back(l);
      origins.push_back(Origin::kSyntheticUnseen);
    }

    Value x_all = g.concat_rows(g.input(batch.real_features), x_syn_all);
    Value align_features = x_all;
    Value l_d;
    if (needs_disentangle) {
      Value x_hat = encode_related_graph(g, *dis, x_all, train_mode, rng);
      auto unr = encode_unrelated_graph(g, *dis, x_all, train_mode, rng);
      Value l_r = related_loss_graph(g, x_hat, labels, space, cfg.tau);
      Value l_u = unrelated_kl_graph(g, unr.mu, unr.logvar);
      Value l_rec = reconstruct_loss_graph(g, *dis, x_all, x_hat, unr.sample, train_mode,
                                           rng);
      l_d = g.add(g.add(l_r, l_u), l_rec);
      out.disentangle = l_d.matrix()(0, 0);
      align_features = x_hat;
    }
    Value l_a = alignment_loss_graph(g, align_features, labels, origins, space,
                                     resolved_align(cfg));
    out.alignment = l_a.matrix()(0, 0);
    Value extra = needs_disentangle ? g.add(l_d, l_a) : l_a;
    total = g.add(total, g.affine(extra, cfg.lambda));
  }
  out.total = total;
  return out;
}

GeneratorTrainResult train_generator(const FeatureDataset& train,
                                     const SemanticSpace& space, const TrainConfig& cfg,
                                     std::uint64_t seed) {
  cfg.validate();
  train.validate(space, /*generator_training_input=*/true);
  if (train.size() == 0) {
    throw ValidationError("train_generator: empty training set");
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.provenance[i] != Provenance::kReal || train.groups[i] != Group::kSeen) {
      throw ValidationError("train_generator: row " + std::to_string(i) +
                            " is not a real seen sample");
    }
  }
  if (cfg.ablation == Ablation::kProjection) {
    throw ParameterError("train_generator: the projection row trains no generator");
  }

  const std::size_t d_a = space.dim();
  const std::size_t d_x = train.dim();
  GeneratorTrainResult result{
      SynthModel{cfg.ablation == Ablation::kGmmn
                     ? std::variant<GeneratorModel, GmmnModel>(
                           init_gmmn(d_a, cfg.d_k, d_x, cfg.gmmn_hidden,
                                     derive_seed(seed, 0x67656e)))
                     : std::variant<GeneratorModel, GmmnModel>(
                           init_generator(d_a, cfg.d_k, d_x, cfg.n_primitives,
                                          cfg.generator_layers,
                                          derive_seed(seed, 0x67656e)))},
      std::nullopt,
      {}};
  if (cfg.ablation == Ablation::kFull) {
    result.disentangle = init_disentangle(d_x, d_a, resolved_disentangle(cfg),
                                          derive_seed(seed, 0x646973));
  }

  std::vector<Param*> params = result.model.params();
  if (result.disentangle) {
    for (Param* p : result.disentangle->params()) params.push_back(p);
  }
  AdamState adam(cfg.generator_lr);

  // classes that actually have training rows
  std::vector<std::size_t> class_pool;
  std::vector<std::vector<std::size_t>> rows_by_class(space.n_seen());
  for (std::size_t i = 0; i < train.size(); ++i) rows_by_class[train.labels[i]].push_back(i);
  for (std::size_t c = 0; c < space.n_seen(); ++c) {
    if (!rows_by_class[c].empty()) class_pool.push_back(c);
  }
  if (class_pool.empty()) {
    throw ValidationError("train_generator: no seen class has training rows");
  }
  const auto unseen = space.unseen_ids();
  const bool needs_align = cfg.ablation == Ablation::kPA || cfg.ablation == Ablation::kFull;

  Rng rng(derive_seed(seed, 0x747261));
  std::size_t step_index = 0;
  for (std::size_t epoch = 0; epoch < cfg.generator_epochs; ++epoch) {
    std::vector<std::size_t> order = class_pool;
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.classes_per_step) {
      const std::size_t end = std::min(order.size(), start + cfg.classes_per_step);
      StepBatch batch;
      batch.class_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<std::size_t> picked;
      for (std::size_t c : batch.class_ids) {
        const auto& rows = rows_by_class[c];
        const std::size_t take = std::min<std::size_t>(cfg.mmd_batch_per_class,
                                                       rows.size());
        batch.class_sizes.push_back(take);
        for (std::size_t k = 0; k < take; ++k) {
          picked.push_back(rows[rng.uniform_index(rows.size())]);
        }
      }
      batch.real_features = Matrix(picked.size(), d_x);
      for (std::size_t i = 0; i < picked.size(); ++i) {
        const auto r = train.features.row(picked[i]);
        std::copy(r.begin(), r.end(), batch.real_features.row(i).begin());
      }
      batch.noise_seen = sample_noise(picked.size(), result.model.noise_dim(), rng);
      if (needs_align && !unseen.empty()) {
        std::vector<std::size_t> counts(unseen.size(), cfg.align_unseen_per_class);
        batch.unseen_semantics = repeat_rows(space.embeddings(), unseen, counts);
        for (std::size_t u : unseen) {
          for (std::size_t k = 0; k < cfg.align_unseen_per_class; ++k) {
            batch.unseen_labels.push_back(u);
          }
        }
        batch.noise_unseen = sample_noise(batch.unseen_semantics.rows(),
                                          result.model.noise_dim(), rng);
      }

      Graph g;
      StepLosses losses = build_step_loss(g, result.model, result.disentangle, space, cfg,
                                          batch, /*train_mode=*/true, &rng);
      const double total = losses.total.scalar();
      if (!std::isfinite(total)) {
        throw DivergenceError("train_generator: non-finite loss at step " +
                              std::to_string(step_index));
      }
      zero_grads(params);
      g.backward(losses.total);
      adam_step(params, adam);
      epoch_loss += total;
      ++steps;
      ++step_index;
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(steps));
  }
  return result;
}

namespace {

FeatureDataset synthesize_group(SynthModel& model, const SemanticSpace& space,
                                const std::vector<std::size_t>& class_ids,
                                std::size_t per_class, std::uint64_t seed, Group group) {
  if (per_class == 0) {
    throw ParameterError("synthesize: per_class must be >= 1");
  }
  Rng rng(seed);
  std::vector<std::size_t> counts(class_ids.size(), per_class);
  Matrix sem = repeat_rows(space.embeddings(), class_ids, counts);
  Matrix noise = sample_noise(sem.rows(), model.noise_dim(), rng);
  FeatureDataset out;
  out.features = model.generate(sem, noise);
  out.labels.reserve(sem.rows());
  for (std::size_t c : class_ids) {
    for (std::size_t k = 0; k < per_class; ++k) {
      out.labels.push_back(c);
      out.provenance.push_back(Provenance::kSynthetic);
      out.groups.push_back(group);
    }
  }
  return out;
}

}  // namespace

FeatureDataset synthesize_unseen(SynthModel& model, const SemanticSpace& space,
                                 std::size_t per_class, std::uint64_t seed) {
  return synthesize_group(model, space, space.unseen_ids(), per_class, seed,
                          Group::kUnseen);
}

FeatureDataset synthesize_seen(SynthModel& model, const SemanticSpace& space,
                               std::size_t per_class, std::uint64_t seed) {
  return synthesize_group(model, space, space.seen_ids(), per_class, seed, Group::kSeen);
}

namespace {

// mean per-class accuracy of the seen-only head over seen test rows
double seen_only_accuracy(const Classifier& head, const FeatureDataset& test,
                          const SemanticSpace& space) {
  std::vector<std::size_t> seen_rows;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test.groups[i] == Group::kSeen) seen_rows.push_back(i);
  }
  if (seen_rows.empty()) return 0.0;
  const FeatureDataset sub = test.subset(seen_rows);
  const auto pred = head.predict(sub.features);
  std::vector<std::size_t> counts(space.n_seen(), 0), correct(space.n_seen(), 0);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    ++counts[sub.labels[i]];
    if (pred[i] == sub.labels[i]) ++correct[sub.labels[i]];
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < space.n_seen(); ++c) {
    if (counts[c] == 0) continue;
    sum += static_cast<double>(correct[c]) / static_cast<double>(counts[c]);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(std::vector<std::pair<std::string, double>>* sink) : sink_(sink) {}

  template <typename F>
  auto stage(const char* name, F&& fn) {
    if (!sink_) return fn();
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(name, start);
    } else {
      auto out = fn();
      record(name, start);
      return out;
    }
  }

 private:
  void record(const char* name, std::chrono::steady_clock::time_point start) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    sink_->emplace_back(
        name, std::chrono::duration<double, std::milli>(elapsed).count());
  }

  std::vector<std::pair<std::string, double>>* sink_;
};

}  // namespace

RunResult run_experiment(const SemanticSpace& space, const FeatureDataset& train,
                         const FeatureDataset& test, const TrainConfig& cfg,
                         std::uint64_t seed,
                         std::vector<std::pair<std::string, double>>* timings) {
  cfg.validate();
  RunResult result;
  Stopwatch watch(timings);

  ClassifierTrainConfig pre_cfg = cfg.pretrain;
  pre_cfg.seed = derive_seed(seed, 0x707265);
  Classifier head = watch.stage("pretrain", [&] {
    return pretrain_classifier(train, space, pre_cfg, ClassifierMode::kLearned,
                               &result.pretrain_curve);
  });
  result.pretrain_seen_mean = seen_only_accuracy(head, test, space);

  if (cfg.ablation == Ablation::kProjection) {
    // zero-shot expansion only: unseen columns come straight from the
    // semantic embeddings, nothing retrains
    head.expand_to(space, derive_seed(seed, 0x616461));
    result.report = watch.stage("evaluate", [&] { return evaluate_gzsl(head, test, space); });
    return result;
  }

  GeneratorTrainResult gen = watch.stage("train_generator", [&] {
    return train_generator(train, space, cfg, derive_seed(seed, 0x67656e72));
  });
  result.generator_curve = std::move(gen.loss_curve);

  FeatureDataset synthetic = watch.stage("synthesize", [&] {
    return synthesize_unseen(gen.model, space, cfg.synthetic_per_class,
                             derive_seed(seed, 0x73796e));
  });
  FeatureDataset real_side = train;
  if (cfg.include_synthetic_seen_in_retrain) {
    real_side.append_all(synthesize_seen(gen.model, space, cfg.synthetic_per_class,
                                         derive_seed(seed, 0x73796e73)));
  }

  ClassifierTrainConfig fine_cfg = cfg.finetune;
  fine_cfg.seed = derive_seed(seed, 0x66696e65);
  head = watch.stage("finetune", [&] {
    return retrain_classifier(std::move(head), real_side, synthetic, space, fine_cfg,
                              &result.finetune_curve);
  });
  result.report = watch.stage("evaluate", [&] { return evaluate_gzsl(head, test, space); });
  result.model = std::move(gen.model);
  result.disentangle = std::move(gen.disentangle);
  return result;
}

namespace {

void run_jobs(std::size_t n_jobs, std::size_t threads,
              const std::function<void(std::size_t)>& job) {
  if (threads <= 1 || n_jobs <= 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(threads, n_jobs);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<AblationRow> run_ablation(const SemanticSpace& space,
                                      const FeatureDataset& train,
                                      const FeatureDataset& test, const TrainConfig& cfg,
                                      const std::vector<Ablation>& rows,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::size_t threads) {
  if (rows.empty() || seeds.empty()) {
    throw ParameterError("run_ablation: need at least one row and one seed");
  }
  std::vector<AblationRow> table(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    table[r].ablation = rows[r];
    table[r].per_seed.resize(seeds.size());
    table[r].per_seed_pretrain_seen.resize(seeds.size());
  }
  const std::size_t n_jobs = rows.size() * seeds.size();
  run_jobs(n_jobs, threads, [&](std::size_t jid) {
    const std::size_t r = jid / seeds.size();
    const std::size_t s = jid % seeds.size();
    TrainConfig row_cfg = cfg;
    row_cfg.ablation = rows[r];
    RunResult result = run_experiment(space, train, test, row_cfg, seeds[s]);
    table[r].per_seed[s] = std::move(result.report);
    table[r].per_seed_pretrain_seen[s] = result.pretrain_seen_mean;
  });
  for (auto& row : table) {
    for (const auto& rep : row.per_seed) {
      row.mean_seen += rep.seen_mean;
      row.mean_unseen += rep.unseen_mean;
      row.mean_hm += rep.hm;
    }
    const double inv = 1.0 / static_cast<double>(row.per_seed.size());
    row.mean_seen *= inv;
    row.mean_unseen *= inv;
    row.mean_hm *= inv;
  }
  return table;
}

std::vector<SweepRow> run_primitive_sweep(const SemanticSpace& space,
                                          const FeatureDataset& train,
                                          const FeatureDataset& test,
                                          const TrainConfig& cfg,
                                          const std::vector<std::size_t>& counts,
                                          const std::vector<std::uint64_t>& seeds,
                                          std::size_t threads) {
  if (counts.empty() || seeds.empty()) {
    throw ParameterError("run_primitive_sweep: need at least one count and one seed");
  }
  TrainConfig base = cfg;
  if (base.ablation == Ablation::kProjection || base.ablation == Ablation::kGmmn) {
    base.ablation = Ablation::kPOnly;  // the sweep only makes sense with primitives
  }
  std::vector<SweepRow> table(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    table[i].n_primitives = counts[i];
    table[i].per_seed.resize(seeds.size());
  }
  run_jobs(counts.size() * seeds.size(), threads, [&](std::size_t jid) {
    const std::size_t i = jid / seeds.size();
    const std::size_t s = jid % seeds.size();
    TrainConfig row_cfg = base;
    row_cfg.n_primitives = counts[i];
    table[i].per_seed[s] = run_experiment(space, train, test, row_cfg, seeds[s]).report;
  });
  for (auto& row : table) {
    for (const auto& rep : row.per_seed) {
      row.mean_unseen += rep.unseen_mean;
      row.mean_hm += rep.hm;
    }
    const double inv = 1.0 / static_cast<double>(row.per_seed.size());
    row.mean_unseen *= inv;
    row.mean_hm *= inv;
  }
  return table;
}

}  // namespace pading
