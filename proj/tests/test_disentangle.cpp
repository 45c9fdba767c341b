#include <doctest.h>

#include <cmath>

#include "pading/disentangle.hpp"
#include "pading/optim.hpp"

using namespace pading;

namespace {

constexpr std::size_t kDx = 10;
constexpr std::size_t kDa = 4;

SemanticSpace orthogonal_space(std::size_t n_seen, std::size_t n_unseen) {
  // orthonormal one-hot embeddings make loss values easy to reason about
  const std::size_t n = n_seen + n_unseen;
  Matrix emb(n, n);
  for (std::size_t i = 0; i < n; ++i) emb(i, i) = 1.0;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("c" + std::to_string(i));
  return SemanticSpace(std::move(names), std::move(emb), n_seen);
}

DisentangleModules small_modules(std::uint64_t seed = 3) {
  DisentangleConfig cfg;
  cfg.tau = 0.1;
  return init_disentangle(kDx, kDa, cfg, seed);
}

}  // namespace

TEST_SUITE("disentangle") {

TEST_CASE("config defaults resolve against the dims") {
  DisentangleModules m = small_modules();
  CHECK(m.cfg.hidden == 2 * kDx);
  CHECK(m.cfg.d_u == kDa);
  CHECK(m.related.w1.value.rows() == kDx);
  CHECK(m.related.w2.value.cols() == kDa);
  CHECK(m.unrelated.w2.value.cols() == 2 * kDa);
  CHECK(m.decoder.w1.value.rows() == kDa + kDa);
  CHECK(m.decoder.w2.value.cols() == kDx);
}

TEST_CASE("eval-mode related encoding is deterministic and shaped d_a") {
  DisentangleModules m = small_modules();
  Rng rng(9);
  const Matrix x = rng.normal_matrix(6, kDx);
  const Matrix a = encode_related(m, x);
  const Matrix b = encode_related(m, x);
  CHECK(a == b);
  CHECK(a.rows() == 6);
  CHECK(a.cols() == kDa);
}

TEST_CASE("empty batch encodes to an empty matrix") {
  DisentangleModules m = small_modules();
  const Matrix out = encode_related(m, Matrix(0, kDx));
  CHECK(out.rows() == 0);
  CHECK(out.cols() == kDa);
}

TEST_CASE("related_loss on zero features equals ln C") {
  DisentangleModules m = small_modules();
  const SemanticSpace space = orthogonal_space(3, 1);
  const Matrix x_hat(5, 4);  // all zeros -> uniform logits
  const std::vector<std::size_t> labels = {0, 1, 2, 3, 0};
  CHECK(related_loss(x_hat, labels, space, 0.1) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("related_loss vanishes in the separable low-temperature limit") {
  const SemanticSpace space = orthogonal_space(3, 1);
  Matrix x_hat(2, 4);
  x_hat(0, 1) = 1.0;  // exactly its own embedding, others orthogonal
  x_hat(1, 3) = 1.0;
  const std::vector<std::size_t> labels = {1, 3};
  CHECK(related_loss(x_hat, labels, space, 0.01) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("related_loss two-class closed form ln(1+exp(-g))") {
  const SemanticSpace space = orthogonal_space(2, 0);
  Matrix x_hat(1, 2);
  x_hat(0, 0) = 0.35;  // logit gap g = 0.35 / tau
  const std::vector<std::size_t> labels = {0};
  const double tau = 0.1;
  const double g = 0.35 / tau;
  CHECK(related_loss(x_hat, labels, space, tau) ==
        doctest::Approx(std::log1p(std::exp(-g))).epsilon(1e-12));
}

TEST_CASE("related_loss rejects an out-of-range label") {
  const SemanticSpace space = orthogonal_space(2, 0);
  CHECK_THROWS_AS(related_loss(Matrix(1, 2), {5}, space, 0.1), LookupError);
}

TEST_CASE("unrelated encoding: eval sample equals mu, seeded train samples repeat") {
  DisentangleModules m = small_modules();
  Rng data_rng(4);
  const Matrix x = data_rng.normal_matrix(5, kDx);

  const UnrelatedResult eval = encode_unrelated(m, x);
  CHECK(eval.sample == eval.mu);

  Rng ra(77), rb(77);
  const UnrelatedResult t1 = encode_unrelated(m, x, true, &ra);
  const UnrelatedResult t2 = encode_unrelated(m, x, true, &rb);
  CHECK(t1.sample == t2.sample);
  CHECK(t1.sample != eval.mu);
}

TEST_CASE("log-variance is clamped to [-10, 10]") {
  DisentangleModules m = small_modules();
  // force the logvar head to emit a huge raw value via its bias
  for (std::size_t j = kDa; j < 2 * kDa; ++j) m.unrelated.b2.value(0, j) = 50.0;
  m.unrelated.w2.value.fill(0.0);
  const UnrelatedResult out = encode_unrelated(m, Matrix(2, kDx));
  for (std::size_t i = 0; i < out.logvar.size(); ++i) {
    CHECK(out.logvar.at(i) == 10.0);
  }
}

TEST_CASE("kl closed form: zero at the prior, 0.5 at unit mean") {
  CHECK(unrelated_kl(Matrix(3, 2), Matrix(3, 2)) == doctest::Approx(0.0));
  CHECK(unrelated_kl(Matrix{{1.0}}, Matrix{{0.0}}) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kl is nonnegative for random posteriors") {
  Rng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix mu = rng.normal_matrix(4, 3, 2.0);
    const Matrix logvar = rng.normal_matrix(4, 3, 1.5);
    CHECK(unrelated_kl(mu, logvar) >= 0.0);
  }
}

TEST_CASE("reconstruction loss is zero when the decoder hits the target") {
  DisentangleModules m = small_modules();
  // constant decoder: all weights zero, output bias = the constant target row
  m.decoder.w1.value.fill(0.0);
  m.decoder.w2.value.fill(0.0);
  Matrix target(3, kDx);
  for (std::size_t j = 0; j < kDx; ++j) {
    m.decoder.b2.value(0, j) = 0.1 * static_cast<double>(j);
    for (std::size_t i = 0; i < 3; ++i) target(i, j) = 0.1 * static_cast<double>(j);
  }
  CHECK(reconstruct_loss(m, target, Matrix(3, kDa), Matrix(3, kDa)) ==
        doctest::Approx(0.0));
}

TEST_CASE("constant offset c reconstructs with loss |c|") {
  DisentangleModules m = small_modules();
  m.decoder.w1.value.fill(0.0);
  m.decoder.w2.value.fill(0.0);
  for (std::size_t j = 0; j < kDx; ++j) m.decoder.b2.value(0, j) = -0.7;
  CHECK(reconstruct_loss(m, Matrix(4, kDx), Matrix(4, kDa), Matrix(4, kDa)) ==
        doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("mean-abs convention: X=(1,2) vs recon=(0,2) gives 0.5") {
  DisentangleModules m2 = init_disentangle(2, 2, DisentangleConfig{}, 5);
  m2.decoder.w1.value.fill(0.0);
  m2.decoder.w2.value.fill(0.0);
  m2.decoder.b2.value(0, 0) = 0.0;
  m2.decoder.b2.value(0, 1) = 2.0;
  const Matrix x{{1.0, 2.0}};
  CHECK(reconstruct_loss(m2, x, Matrix(1, 2), Matrix(1, 2)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("disentangle_loss equals the sum of its three terms") {
  const SemanticSpace space = orthogonal_space(3, 1);
  DisentangleModules m4 = init_disentangle(kDx, 4, DisentangleConfig{}, 11);
  Rng rng(6);
  const Matrix x = rng.normal_matrix(6, kDx);
  const std::vector<std::size_t> labels = {0, 1, 2, 3, 1, 0};

  const Matrix x_hat = encode_related(m4, x);
  const UnrelatedResult unr = encode_unrelated(m4, x);
  const double parts = related_loss(x_hat, labels, space, m4.cfg.tau) +
                       unrelated_kl(unr.mu, unr.logvar) +
                       reconstruct_loss(m4, x, x_hat, unr.sample);
  const double total = disentangle_loss(m4, x, labels, space);
  CHECK(total == doctest::Approx(parts).epsilon(1e-12));
  CHECK(total >= 0.0);
}

TEST_CASE("all three losses are nonnegative on random batches") {
  const SemanticSpace space = orthogonal_space(3, 1);
  DisentangleModules m4 = init_disentangle(kDx, 4, DisentangleConfig{}, 13);
  Rng rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = rng.normal_matrix(4, kDx, 1.5);
    const std::vector<std::size_t> labels = {rng.uniform_index(4), rng.uniform_index(4),
                                             rng.uniform_index(4), rng.uniform_index(4)};
    const Matrix x_hat = encode_related(m4, x);
    const UnrelatedResult unr = encode_unrelated(m4, x);
    CHECK(related_loss(x_hat, labels, space, 0.1) >= 0.0);
    CHECK(unrelated_kl(unr.mu, unr.logvar) >= 0.0);
    CHECK(reconstruct_loss(m4, x, x_hat, unr.sample) >= 0.0);
  }
}

TEST_CASE("training the kl term pulls the posterior mean toward zero") {
  Rng data_rng(31);
  const Matrix x = data_rng.normal_matrix(32, kDx, 2.0);
  double init_norm = 0.0, trained_norm = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DisentangleModules m = small_modules(seed);
    std::vector<Param*> params = {&m.unrelated.w1, &m.unrelated.b1, &m.unrelated.w2,
                                  &m.unrelated.b2};
    AdamState adam(1e-3);
    init_norm += frobenius_norm(encode_unrelated(m, x).mu);
    for (int step = 0; step < 500; ++step) {
      Graph g;
      auto enc = encode_unrelated_graph(g, m, g.input(x), false, nullptr);
      Value loss = unrelated_kl_graph(g, enc.mu, enc.logvar);
      zero_grads(params);
      g.backward(loss);
      adam_step(params, adam);
    }
    trained_norm += frobenius_norm(encode_unrelated(m, x).mu);
  }
  CHECK(trained_norm / 5.0 < init_norm / 5.0);
}

TEST_CASE("eval-mode disentangle pass is deterministic") {
  const SemanticSpace space = orthogonal_space(3, 1);
  DisentangleModules m4 = init_disentangle(kDx, 4, DisentangleConfig{}, 17);
  Rng rng(18);
  const Matrix x = rng.normal_matrix(5, kDx);
  const std::vector<std::size_t> labels = {0, 1, 2, 3, 2};
  CHECK(disentangle_loss(m4, x, labels, space) ==
        disentangle_loss(m4, x, labels, space));
}

}  // TEST_SUITE
