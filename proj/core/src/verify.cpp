#include "pading/verify.hpp"

#include <cmath>
#include <sstream>

#include "pading/align.hpp"
#include "pading/classifier.hpp"
#include "pading/config.hpp"
#include "pading/disentangle.hpp"
#include "pading/generator.hpp"
#include "pading/pipeline.hpp"

namespace pading {

namespace {

struct Battery {
  VerifyReport report;

  void check(const std::string& name, bool passed, const std::string& detail) {
    report.checks.push_back({name, passed, detail});
  }

  void check_close(const std::string& name, double got, double want, double tol) {
    std::ostringstream d;
    d << "got " << got << ", want " << want << " +/- " << tol;
    check(name, std::fabs(got - want) <= tol, d.str());
  }

  void check_le(const std::string& name, double got, double bound) {
    std::ostringstream d;
    d << "got " << got << ", bound " << bound;
    check(name, got <= bound, d.str());
  }
};

// shared micro-fixture: 3 seen + 1 unseen classes, small dims
struct MicroFixture {
  SemanticSpace space;
  GeneratorModel generator;
  DisentangleModules dis;
  TrainConfig cfg;
  StepBatch batch;
  std::uint64_t seed;

  static constexpr std::size_t kDa = 6;
  static constexpr std::size_t kDx = 10;
  static constexpr std::size_t kDk = 8;

  explicit MicroFixture(std::uint64_t s)
      : space(make_fixture_space(s)),
        generator(init_generator(kDa, kDk, kDx, 12, 3, derive_seed(s, 1))),
        dis(init_disentangle(kDx, kDa, fixture_dis_cfg(), derive_seed(s, 2))),
        cfg(fixture_train_cfg()),
        seed(s) {
    Rng rng(derive_seed(s, 3));
    batch.class_ids = {0, 1, 2};
    batch.class_sizes = {3, 3, 3};
    batch.real_features = rng.normal_matrix(9, kDx);
    batch.noise_seen = rng.normal_matrix(9, kDk);
    batch.unseen_semantics = space.rows_for({3, 3});
    batch.unseen_labels = {3, 3};
    batch.noise_unseen = rng.normal_matrix(2, kDk);
  }

  static SemanticSpace make_fixture_space(std::uint64_t s) {
    Rng rng(derive_seed(s, 0));
    return make_synthetic_space(3, 1, kDa, 2, 0.4, rng);
  }

  static DisentangleConfig fixture_dis_cfg() {
    DisentangleConfig d;
    d.tau = 0.1;
    d.dropout = 0.1;
    return d;
  }

  static TrainConfig fixture_train_cfg() {
    TrainConfig t;
    t.ablation = Ablation::kFull;
    t.lambda = 0.5;  // keeps every term visible to the finite-difference probes
    t.tau = 0.1;
    return t;
  }
};

double run_grad_check(Battery& b, const std::string& name,
                      const std::function<double()>& loss_fn,
                      std::span<Param* const> params, std::uint64_t seed) {
  Rng rng(seed);
  try {
    const auto report = grad_check(loss_fn, params, 24, 1e-5, rng);
    std::ostringstream d;
    d << "max relative error " << report.max_rel_error << " over "
      << report.probes.size() << " probes (rtol 1e-3)";
    b.check(name, report.max_rel_error < 1e-3, d.str());
    return report.max_rel_error;
  } catch (const Error& e) {
    b.check(name, false, e.what());
    return 1.0;
  }
}

void harmonic_mean_checks(Battery& b) {
  // exact values of the formula at the printed table inputs
  b.check_close("hm/derived(41.5,15.3)", harmonic_mean(41.5, 15.3), 22.357394366197187,
                1e-9);
  b.check_close("hm/derived(53.0,8.0)", harmonic_mean(53.0, 8.0), 13.901639344262295,
                1e-9);
  b.check_close("hm/derived(43.0,3.6)", harmonic_mean(43.0, 3.6), 6.643776824034335,
                1e-9);
  // printed values agree at the tables' one-decimal resolution
  b.check_close("hm/printed(41.5,15.3)", harmonic_mean(41.5, 15.3), 22.3, 0.1);
  b.check_close("hm/printed(53.0,8.0)", harmonic_mean(53.0, 8.0), 13.9, 0.1);
  b.check_close("hm/printed(43.0,3.6)", harmonic_mean(43.0, 3.6), 6.7, 0.1);
  b.check_close("hm/equal-arguments", harmonic_mean(0.37, 0.37), 0.37, 1e-12);
  b.check_close("hm/zero-guard", harmonic_mean(0.8, 0.0), 0.0, 0.0);
  bool threw = false;
  try {
    harmonic_mean(-0.1, 0.5);
  } catch (const ParameterError&) {
    threw = true;
  }
  b.check("hm/negative-input-rejected", threw, "harmonic_mean(-0.1, 0.5)");
}

void mmd_checks(Battery& b, std::uint64_t seed) {
  Rng rng(seed);
  MmdConfig cfg;
  double worst_self = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.uniform_index(6);
    const std::size_t d = 1 + rng.uniform_index(5);
    const Matrix x = rng.normal_matrix(n, d, 2.0);
    worst_self = std::max(worst_self, std::fabs(mmd_loss(x, x, cfg)));
  }
  b.check_le("mmd/self-zero(100 random sets)", worst_self, 1e-12);

  double worst_sym = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const Matrix x = rng.normal_matrix(1 + rng.uniform_index(6), d);
    const Matrix y = rng.normal_matrix(1 + rng.uniform_index(6), d);
    worst_sym = std::max(worst_sym, std::fabs(mmd_loss(x, y, cfg) - mmd_loss(y, x, cfg)));
  }
  b.check_le("mmd/symmetry(50 random pairs)", worst_sym, 1e-12);

  MmdConfig single;
  single.bandwidths = {2.0};
  const Matrix f{{0.0, 0.0}};
  const Matrix fp{{2.0, 0.0}};
  b.check_close("mmd/analytic-pair", mmd_loss(f, fp, single), 0.7869386805747332, 1e-9);
  b.check_close("kernel/analytic", gaussian_kernel(f.row(0), fp.row(0), 2.0),
                0.6065306597126334, 1e-9);
}

void alignment_checks(Battery& b, std::uint64_t seed) {
  Rng rng(seed);
  SemanticSpace space = make_synthetic_space(4, 2, 5, 2, 0.5, rng);
  AlignBatch batch;
  batch.labels = {0, 1, 2, 3, 4, 5, 0, 4};
  batch.origins = {Origin::kRealSeen,         Origin::kSyntheticSeen,
                   Origin::kRealSeen,         Origin::kSyntheticSeen,
                   Origin::kSyntheticUnseen,  Origin::kSyntheticUnseen,
                   Origin::kSyntheticSeen,    Origin::kSyntheticUnseen};
  batch.x_hat = space.rows_for(batch.labels);  // features equal their own embeddings

  const struct {
    const char* name;
    bool intra, inter;
  } variants[] = {{"align/zero-at-match(intra)", true, false},
                  {"align/zero-at-match(inter)", false, true},
                  {"align/zero-at-match(both)", true, true}};
  for (const auto& v : variants) {
    AlignConfig cfg;
    cfg.include_intra = v.intra;
    cfg.include_inter = v.inter;
    try {
      b.check_le(v.name, std::fabs(alignment_loss(batch, space, cfg)), 1e-9);
    } catch (const Error& e) {
      b.check(v.name, false, e.what());
    }
  }
}

void gradient_checks(Battery& b, std::uint64_t seed) {
  MicroFixture fx(seed);

  // L_G: MMD through the full generator stack
  {
    auto params = fx.generator.params();
    Rng noise_rng(derive_seed(seed, 20));
    const Matrix semantics = fx.space.rows_for({0, 0, 1, 1, 2, 2});
    const Matrix noise = noise_rng.normal_matrix(6, MicroFixture::kDk);
    const Matrix real = noise_rng.normal_matrix(6, MicroFixture::kDx);
    auto loss_fn = [&]() {
      zero_grads(params);
      Graph g;
      Value syn = generate_graph(g, fx.generator, g.input(semantics), g.input(noise));
      Value loss = mmd_loss_graph(g, g.input(real), syn, fx.cfg.mmd);
      g.backward(loss);
      return loss.scalar();
    };
    run_grad_check(b, "grad/L_G", loss_fn, params, derive_seed(seed, 11));
  }

  // L_R: cross-entropy of related features against all semantic rows
  {
    std::vector<Param*> params = {&fx.dis.related.w1, &fx.dis.related.b1,
                                  &fx.dis.related.w2, &fx.dis.related.b2};
    std::vector<std::size_t> labels = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    auto loss_fn = [&]() {
      zero_grads(params);
      Rng rng(derive_seed(fx.seed, 21));
      Graph g;
      Value x_hat = encode_related_graph(g, fx.dis, g.input(fx.batch.real_features), true,
                                         &rng);
      Value loss = related_loss_graph(g, x_hat, labels, fx.space, fx.cfg.tau);
      g.backward(loss);
      return loss.scalar();
    };
    run_grad_check(b, "grad/L_R", loss_fn, params, derive_seed(seed, 12));
  }

  // L_U: KL of the unrelated posterior
  {
    std::vector<Param*> params = {&fx.dis.unrelated.w1, &fx.dis.unrelated.b1,
                                  &fx.dis.unrelated.w2, &fx.dis.unrelated.b2};
    auto loss_fn = [&]() {
      zero_grads(params);
      Rng rng(derive_seed(fx.seed, 22));
      Graph g;
      auto enc = encode_unrelated_graph(g, fx.dis, g.input(fx.batch.real_features), true,
                                        &rng);
      Value loss = unrelated_kl_graph(g, enc.mu, enc.logvar);
      g.backward(loss);
      return loss.scalar();
    };
    run_grad_check(b, "grad/L_U", loss_fn, params, derive_seed(seed, 13));
  }

  // L_recon: l1 reconstruction through both encoders and the decoder
  {
    auto params = fx.dis.params();
    auto loss_fn = [&]() {
      zero_grads(params);
      Rng rng(derive_seed(fx.seed, 23));
      Graph g;
      Value x = g.input(fx.batch.real_features);
      Value x_hat = encode_related_graph(g, fx.dis, x, true, &rng);
      auto enc = encode_unrelated_graph(g, fx.dis, x, true, &rng);
      Value loss = reconstruct_loss_graph(g, fx.dis, x, x_hat, enc.sample, true, &rng);
      g.backward(loss);
      return loss.scalar();
    };
    run_grad_check(b, "grad/L_recon", loss_fn, params, derive_seed(seed, 14));
  }

  // L_A: relational alignment through the related encoder
  {
    std::vector<Param*> params = {&fx.dis.related.w1, &fx.dis.related.b1,
                                  &fx.dis.related.w2, &fx.dis.related.b2};
    std::vector<std::size_t> labels = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    std::vector<Origin> origins(9, Origin::kRealSeen);
    origins[1] = Origin::kSyntheticSeen;
    origins[4] = Origin::kSyntheticSeen;
    auto loss_fn = [&]() {
      zero_grads(params);
      Rng rng(derive_seed(fx.seed, 24));
      Graph g;
      Value x_hat = encode_related_graph(g, fx.dis, g.input(fx.batch.real_features), true,
                                         &rng);
      AlignConfig acfg;
      acfg.tau = fx.cfg.tau;
      Value loss = alignment_loss_graph(g, x_hat, labels, origins, fx.space, acfg);
      g.backward(loss);
      return loss.scalar();
    };
    run_grad_check(b, "grad/L_A", loss_fn, params, derive_seed(seed, 15));
  }

  // L_total: the full step objective through generator + all modules
  {
    SynthModel model{std::move(fx.generator)};
    std::optional<DisentangleModules> dis(std::move(fx.dis));
    std::vector<Param*> params = model.params();
    for (Param* p : dis->params()) params.push_back(p);
    auto loss_fn = [&]() {
      zero_grads(params);
      Rng rng(derive_seed(fx.seed, 25));
      Graph g;
      StepLosses losses = build_step_loss(g, model, dis, fx.space, fx.cfg, fx.batch, true,
                                          &rng);
      g.backward(losses.total);
      return losses.total.scalar();
    };
    run_grad_check(b, "grad/L_total", loss_fn, params, derive_seed(seed, 16));
  }
}

}  // namespace

VerifyReport run_verification_battery(std::uint64_t seed) {
  Battery b;
  harmonic_mean_checks(b);
  mmd_checks(b, derive_seed(seed, 101));
  alignment_checks(b, derive_seed(seed, 102));
  gradient_checks(b, derive_seed(seed, 103));
  return b.report;
}

std::string format_verify_report(const VerifyReport& report) {
  std::ostringstream out;
  for (const auto& c : report.checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  }
  std::size_t failed = 0;
  for (const auto& c : report.checks)
    if (!c.passed) ++failed;
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed")
      << " (" << report.checks.size() << " total)\n";
  return out.str();
}

}  // namespace pading
