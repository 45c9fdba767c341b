#include <doctest.h>

#include <cmath>
#include <functional>

#include "pading/graph.hpp"
#include "pading/optim.hpp"
#include "pading/rng.hpp"

using namespace pading;

namespace {

// loss = sum(fixed_weights * op_output); checks every probed parameter
// against central finite differences
double op_grad_error(std::vector<Param*> params,
                     const std::function<Value(Graph&)>& forward, std::uint64_t seed) {
  Rng w_rng(seed ^ 0xabcd);
  Matrix weights;
  bool have_weights = false;
  auto loss_fn = [&]() {
    zero_grads(params);
    Graph g;
    Value out = forward(g);
    if (!have_weights) {
      weights = w_rng.normal_matrix(out.rows(), out.cols());
      have_weights = true;
    }
    Value loss = g.sum_all(g.mul(out, g.input(weights)));
    g.backward(loss);
    return loss.scalar();
  };
  Rng rng(seed);
  return grad_check(loss_fn, params, 20, 1e-5, rng).max_rel_error;
}

Matrix away_from_zero(Matrix m, double margin) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (std::fabs(m.at(i)) < margin) m.at(i) = m.at(i) < 0.0 ? -margin : margin;
  }
  return m;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("forward values match the matrix-level ops") {
  Graph g;
  const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  const Matrix b{{5.0}, {6.0}};
  CHECK(g.matmul(g.input(a), g.input(b)).matrix() == matmul(a, b));
  CHECK(g.transpose(g.input(a)).matrix() == transpose(a));
  CHECK(g.softmax_rows(g.input(a), 0.5).matrix() == softmax_rows(a, 0.5));
}

TEST_CASE("backward accumulates into params bound twice") {
  // y = w * w elementwise; dy/dw = 2w
  Param w(Matrix{{3.0, -2.0}});
  Graph g;
  Value wv = g.param(w);
  Value loss = g.sum_all(g.mul(wv, wv));
  g.backward(loss);
  CHECK(w.grad(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(w.grad(0, 1) == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("every differentiable op passes a finite-difference check") {
  Rng init(42);
  const double tol = 1e-4;

  SUBCASE("matmul") {
    Param a(init.normal_matrix(3, 4)), b(init.normal_matrix(4, 2));
    CHECK(op_grad_error({&a, &b}, [&](Graph& g) {
            return g.matmul(g.param(a), g.param(b));
          }, 1) < tol);
  }
  SUBCASE("transpose") {
    Param a(init.normal_matrix(3, 4));
    CHECK(op_grad_error({&a}, [&](Graph& g) { return g.transpose(g.param(a)); }, 2) < tol);
  }
  SUBCASE("add/sub/mul/affine") {
    Param a(init.normal_matrix(3, 3)), b(init.normal_matrix(3, 3));
    CHECK(op_grad_error({&a, &b}, [&](Graph& g) {
            return g.add(g.param(a), g.param(b));
          }, 3) < tol);
    CHECK(op_grad_error({&a, &b}, [&](Graph& g) {
            return g.sub(g.param(a), g.param(b));
          }, 4) < tol);
    CHECK(op_grad_error({&a, &b}, [&](Graph& g) {
            return g.mul(g.param(a), g.param(b));
          }, 5) < tol);
    CHECK(op_grad_error({&a}, [&](Graph& g) {
            return g.affine(g.param(a), -1.7, 0.4);
          }, 6) < tol);
  }
  SUBCASE("add_rowvec") {
    Param a(init.normal_matrix(4, 3)), bias(init.normal_matrix(1, 3));
    CHECK(op_grad_error({&a, &bias}, [&](Graph& g) {
            return g.add_rowvec(g.param(a), g.param(bias));
          }, 7) < tol);
  }
  SUBCASE("exp") {
    Param a(init.normal_matrix(3, 3));
    CHECK(op_grad_error({&a}, [&](Graph& g) { return g.exp(g.param(a)); }, 8) < tol);
  }
  SUBCASE("abs away from the kink") {
    Param a(away_from_zero(init.normal_matrix(3, 3), 0.05));
    CHECK(op_grad_error({&a}, [&](Graph& g) { return g.abs(g.param(a)); }, 9) < tol);
  }
  SUBCASE("clamp strictly inside the box") {
    Param a(init.normal_matrix(3, 3));
    CHECK(op_grad_error({&a}, [&](Graph& g) {
            return g.clamp(g.param(a), -50.0, 50.0);
          }, 10) < tol);
  }
  SUBCASE("leaky_relu away from the kink") {
    Param a(away_from_zero(init.normal_matrix(3, 3), 0.05));
    CHECK(op_grad_error({&a}, [&](Graph& g) {
            return g.leaky_relu(g.param(a), 0.2);
          }, 11) < tol);
  }
  SUBCASE("dropout with a fixed mask") {
    Param a(init.normal_matrix(4, 4));
    CHECK(op_grad_error({&a}, [&](Graph& g) {
            Rng mask_rng(99);
            return g.dropout(g.param(a), 0.25, mask_rng);
          }, 12) < tol);
  }
  SUBCASE("concat and slice") {
    Param a(init.normal_matrix(3, 2)), b(init.normal_matrix(3, 4));
    CHECK(op_grad_error({&a, &b}, [&](Graph& g) {
            return g.concat_cols(g.param(a), g.param(b));
          }, 13) < tol);
    Param c(init.normal_matrix(2, 3)), d(init.normal_matrix(4, 3));
    CHECK(op_grad_error({&c, &d}, [&](Graph& g) {
            return g.concat_rows(g.param(c), g.param(d));
          }, 14) < tol);
    Param e(init.normal_matrix(4, 6));
    CHECK(op_grad_error({&e}, [&](Graph& g) {
            return g.slice_cols(g.param(e), 1, 4);
          }, 15) < tol);
    CHECK(op_grad_error({&e}, [&](Graph& g) {
            return g.slice_rows(g.param(e), 1, 3);
          }, 16) < tol);
  }
  SUBCASE("softmax_rows with temperature") {
    Param a(init.normal_matrix(3, 5));
    CHECK(op_grad_error({&a}, [&](Graph& g) {
            return g.softmax_rows(g.param(a), 0.7);
          }, 17) < tol);
  }
  SUBCASE("l2_normalize_rows") {
    Param a(away_from_zero(init.normal_matrix(3, 4), 0.2));
    CHECK(op_grad_error({&a}, [&](Graph& g) {
            return g.l2_normalize_rows(g.param(a));
          }, 18) < tol);
  }
  SUBCASE("pairwise_sqdist") {
    Param a(init.normal_matrix(3, 4)), b(init.normal_matrix(2, 4));
    CHECK(op_grad_error({&a, &b}, [&](Graph& g) {
            return g.pairwise_sqdist(g.param(a), g.param(b));
          }, 19) < tol);
  }
  SUBCASE("reductions") {
    Param a(init.normal_matrix(3, 4));
    CHECK(op_grad_error({&a}, [&](Graph& g) { return g.sum_all(g.param(a)); }, 20) < tol);
    CHECK(op_grad_error({&a}, [&](Graph& g) { return g.mean_all(g.param(a)); }, 21) < tol);
  }
  SUBCASE("softmax_cross_entropy_mean") {
    Param logits(init.normal_matrix(5, 4));
    const std::vector<std::size_t> labels = {0, 2, 1, 3, 2};
    CHECK(op_grad_error({&logits}, [&](Graph& g) {
            return g.softmax_cross_entropy_mean(g.param(logits), labels);
          }, 22) < tol);
  }
  SUBCASE("masked_relational_kl") {
    Param scores(init.normal_matrix(4, 4));
    const std::vector<std::vector<std::size_t>> support = {{1, 2}, {0, 3}, {3}, {}};
    std::vector<std::vector<double>> log_q = {
        {std::log(0.3), std::log(0.7)}, {std::log(0.6), std::log(0.4)}, {0.0}, {}};
    CHECK(op_grad_error({&scores}, [&](Graph& g) {
            return g.masked_relational_kl(g.param(scores), support, log_q);
          }, 23) < tol);
  }
}

TEST_CASE("zero-row batches flow through without touching memory") {
  Graph g;
  const Matrix empty(0, 3);
  Value v = g.input(empty);
  Value out = g.matmul(v, g.input(Matrix::zeros(3, 2)));
  CHECK(out.rows() == 0);
  CHECK(out.cols() == 2);
  CHECK(g.softmax_rows(v).rows() == 0);
}

TEST_CASE("backward demands a scalar loss") {
  Graph g;
  Value v = g.input(Matrix::zeros(2, 2));
  CHECK_THROWS_AS(g.backward(v), DimensionError);
}

TEST_CASE("slice bounds are validated") {
  Graph g;
  Value v = g.input(Matrix::zeros(2, 3));
  CHECK_THROWS_AS(g.slice_cols(v, 2, 5), DimensionError);
  CHECK_THROWS_AS(g.slice_rows(v, 3, 3), DimensionError);
}

TEST_CASE("masked_relational_kl rejects a batch with no eligible anchors") {
  Graph g;
  Value scores = g.input(Matrix::zeros(2, 2));
  CHECK_THROWS_AS(g.masked_relational_kl(scores, {{}, {}}, {{}, {}}),
                  DegenerateInputError);
}

}  // TEST_SUITE
