#include <doctest.h>

#include <cmath>

#include "pading/generator.hpp"
#include "pading/semantic_space.hpp"

using namespace pading;

namespace {

GeneratorModel small_model(std::uint64_t seed = 7) {
  return init_generator(/*d_a=*/5, /*d_k=*/8, /*d_x=*/11, /*n_primitives=*/6,
                        /*layer_count=*/3, seed);
}

}  // namespace

TEST_SUITE("generator") {

TEST_CASE("init is deterministic per seed") {
  GeneratorModel a = small_model(42);
  GeneratorModel b = small_model(42);
  GeneratorModel c = small_model(43);
  CHECK(a.bank.p.value == b.bank.p.value);
  CHECK(a.blocks[0].wq.value == b.blocks[0].wq.value);
  CHECK(a.bank.p.value != c.bank.p.value);
}

TEST_CASE("a 400-primitive bank at d_k=256 has shape 400x256") {
  GeneratorModel m = init_generator(16, 256, 32, 400, 3, 1);
  CHECK(m.bank.n_primitives() == 400);
  CHECK(m.bank.d_k() == 256);
  CHECK(m.bank.p.value.rows() == 400);
  CHECK(m.bank.p.value.cols() == 256);
}

TEST_CASE("invalid dimensions are rejected") {
  CHECK_THROWS_AS(init_generator(5, 8, 11, 6, 0, 1), ParameterError);
  CHECK_THROWS_AS(init_generator(5, 8, 11, 0, 3, 1), ParameterError);
  CHECK_THROWS_AS(init_generator(0, 8, 11, 6, 3, 1), ParameterError);
}

TEST_CASE("self-attention weights are row-stochastic") {
  GeneratorModel m = small_model();
  Matrix attn;
  const Matrix refined = primitive_self_attention(m, &attn);
  CHECK(refined.rows() == 6);
  CHECK(refined.cols() == 8);
  REQUIRE(attn.rows() == 6);
  for (std::size_t i = 0; i < attn.rows(); ++i) {
    double sum = 0.0;
    for (double v : attn.row(i)) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("a single primitive attends only to itself") {
  GeneratorModel m = init_generator(5, 8, 11, /*n_primitives=*/1, 2, 3);
  Matrix attn;
  const Matrix refined = primitive_self_attention(m, &attn);
  CHECK(attn(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // output = value projection + residual
  const Matrix v = matmul(m.bank.p.value, m.sa_wv.value);
  for (std::size_t j = 0; j < refined.cols(); ++j) {
    CHECK(refined(0, j) ==
          doctest::Approx(v(0, j) + m.bank.p.value(0, j)).epsilon(1e-12));
  }
}

TEST_CASE("permuting primitive rows permutes the refined bank identically") {
  GeneratorModel m = small_model(11);
  const Matrix before = primitive_self_attention(m);

  // rotate the bank rows by one
  const Matrix orig = m.bank.p.value;
  Matrix rotated(orig.rows(), orig.cols());
  for (std::size_t i = 0; i < orig.rows(); ++i) {
    const std::size_t src = (i + 1) % orig.rows();
    std::copy(orig.row(src).begin(), orig.row(src).end(), rotated.row(i).begin());
  }
  m.bank.p.value = rotated;
  const Matrix after = primitive_self_attention(m);

  for (std::size_t i = 0; i < orig.rows(); ++i) {
    const std::size_t src = (i + 1) % orig.rows();
    for (std::size_t j = 0; j < orig.cols(); ++j) {
      CHECK(after(i, j) == doctest::Approx(before(src, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("generate on an empty batch yields an empty matrix") {
  GeneratorModel m = small_model();
  const Matrix out = generate(m, Matrix(0, 5), Matrix(0, 8));
  CHECK(out.rows() == 0);
  CHECK(out.cols() == 11);
}

TEST_CASE("generate is deterministic given fixed noise") {
  GeneratorModel m = small_model();
  Rng rng(19);
  const Matrix sem = rng.normal_matrix(4, 5);
  const Matrix noise = rng.normal_matrix(4, 8);
  const Matrix a = generate(m, sem, noise);
  const Matrix b = generate(m, sem, noise);
  CHECK(a == b);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 11);
  CHECK(a.all_finite());
}

TEST_CASE("identical semantic rows with identical noise produce identical outputs") {
  GeneratorModel m = small_model(23);
  Rng rng(5);
  Matrix sem(3, 5);
  Matrix noise(3, 8);
  const Matrix one_sem = rng.normal_matrix(1, 5);
  const Matrix one_noise = rng.normal_matrix(1, 8);
  for (std::size_t i = 0; i < 3; ++i) {
    std::copy(one_sem.row(0).begin(), one_sem.row(0).end(), sem.row(i).begin());
    std::copy(one_noise.row(0).begin(), one_noise.row(0).end(), noise.row(i).begin());
  }
  const Matrix out = generate(m, sem, noise);
  for (std::size_t i = 1; i < 3; ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      CHECK(out(i, j) == out(0, j));
    }
  }
}

TEST_CASE("generate validates batch shapes") {
  GeneratorModel m = small_model();
  CHECK_THROWS_AS(generate(m, Matrix(2, 4), Matrix(2, 8)), DimensionError);
  CHECK_THROWS_AS(generate(m, Matrix(2, 5), Matrix(3, 8)), DimensionError);
  CHECK_THROWS_AS(generate(m, Matrix(2, 5), Matrix(2, 7)), DimensionError);
}

TEST_CASE("gaussian kernel identities") {
  const Matrix f{{0.3, -0.7, 1.1}};
  const Matrix fp{{-0.2, 0.4, 0.9}};
  CHECK(gaussian_kernel(f.row(0), f.row(0), 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gaussian_kernel(f.row(0), fp.row(0), 1.7) ==
        doctest::Approx(gaussian_kernel(fp.row(0), f.row(0), 1.7)).epsilon(1e-15));
  const Matrix a{{0.0, 0.0}};
  const Matrix b{{2.0, 0.0}};
  CHECK(gaussian_kernel(a.row(0), b.row(0), 2.0) ==
        doctest::Approx(0.6065306597126334).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_kernel(a.row(0), b.row(0), 0.0), ParameterError);
  CHECK_THROWS_AS(gaussian_kernel(a.row(0), Matrix(1, 3).row(0), 1.0), DimensionError);
}

TEST_CASE("mmd of a set with itself is zero to 1e-12") {
  Rng rng(13);
  MmdConfig cfg;
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = rng.normal_matrix(1 + rng.uniform_index(8), 3, 2.0);
    CHECK(std::fabs(mmd_loss(x, x, cfg)) <= 1e-12);
  }
}

TEST_CASE("mmd single-pair analytic value") {
  MmdConfig cfg;
  cfg.bandwidths = {2.0};
  const Matrix x{{0.0, 0.0}};
  const Matrix y{{2.0, 0.0}};
  CHECK(mmd_loss(x, y, cfg) == doctest::Approx(0.7869386805747332).epsilon(1e-9));
}

TEST_CASE("mmd is symmetric in its arguments") {
  Rng rng(17);
  MmdConfig cfg;
  const Matrix x = rng.normal_matrix(5, 4);
  const Matrix y = rng.normal_matrix(3, 4);
  CHECK(mmd_loss(x, y, cfg) == doctest::Approx(mmd_loss(y, x, cfg)).epsilon(1e-12));
}

TEST_CASE("mmd is nonnegative on random inputs") {
  Rng rng(19);
  MmdConfig cfg;
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix x = rng.normal_matrix(1 + rng.uniform_index(6), 3);
    const Matrix y = rng.normal_matrix(1 + rng.uniform_index(6), 3, 1.5);
    CHECK(mmd_loss(x, y, cfg) >= -1e-12);
  }
}

TEST_CASE("mmd rejects empty sets and bad bandwidths") {
  MmdConfig cfg;
  CHECK_THROWS_AS(mmd_loss(Matrix(0, 3), Matrix(1, 3), cfg), ParameterError);
  MmdConfig bad;
  bad.bandwidths = {1.0, -2.0};
  CHECK_THROWS_AS(mmd_loss(Matrix(1, 3), Matrix(1, 3), bad), ParameterError);
  MmdConfig empty;
  empty.bandwidths = {};
  CHECK_THROWS_AS(mmd_loss(Matrix(1, 3), Matrix(1, 3), empty), ParameterError);
}

}  // TEST_SUITE
