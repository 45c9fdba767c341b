#include <doctest.h>

#include <cmath>

#include "pading/graph.hpp"
#include "pading/optim.hpp"

using namespace pading;

namespace {

Param make_param(std::initializer_list<double> values) {
  Matrix m(1, values.size(), std::vector<double>(values));
  return Param(std::move(m));
}

void set_grad(Param& p, std::initializer_list<double> values) {
  p.grad = Matrix(1, values.size(), std::vector<double>(values));
  p.grad_ready = true;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("sgd with zero gradient and zero weight decay leaves values alone") {
  Param p = make_param({1.0, -2.0});
  set_grad(p, {0.0, 0.0});
  SgdState state(0.1, 0.0, 0.9);
  Param* arr[] = {&p};
  sgd_step(arr, state);
  CHECK(p.value(0, 0) == 1.0);
  CHECK(p.value(0, 1) == -2.0);
}

TEST_CASE("one plain sgd step is value - lr * grad") {
  Param p = make_param({1.0});
  set_grad(p, {3.0});
  SgdState state(0.1, 0.0, 0.0);
  Param* arr[] = {&p};
  sgd_step(arr, state);
  CHECK(p.value(0, 0) == doctest::Approx(1.0 - 0.3).epsilon(1e-15));
}

TEST_CASE("two momentum steps on a constant gradient unroll to 0.1g + 0.19g") {
  Param p = make_param({0.0});
  SgdState state(0.1, 0.0, 0.9);
  Param* arr[] = {&p};
  set_grad(p, {1.0});
  sgd_step(arr, state);
  set_grad(p, {1.0});
  sgd_step(arr, state);
  // v1 = g, v2 = 0.9 g + g = 1.9 g; total update 0.1 g + 0.19 g
  CHECK(p.value(0, 0) == doctest::Approx(-0.29).epsilon(1e-12));
}

TEST_CASE("weight decay adds an l2 pull toward zero") {
  Param p = make_param({2.0});
  set_grad(p, {0.0});
  SgdState state(0.1, 0.5, 0.0);
  Param* arr[] = {&p};
  sgd_step(arr, state);
  CHECK(p.value(0, 0) == doctest::Approx(2.0 - 0.1 * 0.5 * 2.0).epsilon(1e-12));
}

TEST_CASE("stepping with an unpopulated gradient is a state error") {
  Param p = make_param({1.0});
  SgdState sgd;
  AdamState adam;
  Param* arr[] = {&p};
  CHECK_THROWS_AS(sgd_step(arr, sgd), StateError);
  CHECK_THROWS_AS(adam_step(arr, adam), StateError);
}

TEST_CASE("optimizer steps are bit-deterministic") {
  for (int variant = 0; variant < 2; ++variant) {
    Param a = make_param({0.3, -0.7, 1.1});
    Param b = make_param({0.3, -0.7, 1.1});
    SgdState sa(1e-2, 5e-4, 0.9), sb(1e-2, 5e-4, 0.9);
    AdamState aa(2e-4), ab(2e-4);
    Param* pa[] = {&a};
    Param* pb[] = {&b};
    for (int step = 0; step < 5; ++step) {
      set_grad(a, {0.1, -0.2, 0.35});
      set_grad(b, {0.1, -0.2, 0.35});
      if (variant == 0) {
        sgd_step(pa, sa);
        sgd_step(pb, sb);
      } else {
        adam_step(pa, aa);
        adam_step(pb, ab);
      }
      CHECK(a.value == b.value);
    }
  }
}

TEST_CASE("adam with zero gradient at t=1 leaves values unchanged") {
  Param p = make_param({0.5, -1.5});
  set_grad(p, {0.0, 0.0});
  AdamState state;
  Param* arr[] = {&p};
  adam_step(arr, state);
  CHECK(p.value(0, 0) == 0.5);
  CHECK(p.value(0, 1) == -1.5);
}

TEST_CASE("first adam step on a constant gradient moves by about lr") {
  Param p = make_param({0.0});
  set_grad(p, {0.7});
  AdamState state(1e-3);
  Param* arr[] = {&p};
  adam_step(arr, state);
  // bias corrections cancel at t=1: update = lr * g / (|g| + eps)
  CHECK(std::fabs(p.value(0, 0)) == doctest::Approx(1e-3).epsilon(1e-4));
  CHECK(p.value(0, 0) < 0.0);
}

TEST_CASE("adam moments stay finite over 1000 bounded-gradient steps") {
  Param p = make_param({0.0, 0.0});
  AdamState state(1e-2);
  Param* arr[] = {&p};
  Rng rng(17);
  for (int step = 0; step < 1000; ++step) {
    set_grad(p, {std::sin(0.1 * step), rng.uniform() - 0.5});
    adam_step(arr, state);
  }
  CHECK(p.value.all_finite());
  CHECK(state.first_moment[0].all_finite());
  CHECK(state.second_moment[0].all_finite());
  CHECK(state.timestep == 1000);
}

TEST_CASE("grad_check on a quadratic matches within 1e-6") {
  Param w(Matrix{{0.3, -1.2, 0.8}});
  Param* arr[] = {&w};
  auto loss_fn = [&]() {
    zero_grads(arr);
    Graph g;
    Value wv = g.param(w);
    Value loss = g.affine(g.sum_all(g.mul(wv, wv)), 0.5);
    g.backward(loss);
    return loss.scalar();
  };
  Rng rng(23);
  const auto report = grad_check(loss_fn, arr, 12, 1e-5, rng);
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("grad_check reports zero gradients for a constant loss") {
  Param w(Matrix{{1.0, 2.0}});
  Param* arr[] = {&w};
  auto loss_fn = [&]() {
    zero_grads(arr);
    w.grad_ready = true;  // constant loss: gradient is identically zero
    return 4.2;
  };
  Rng rng(29);
  const auto report = grad_check(loss_fn, arr, 8, 1e-5, rng);
  CHECK(report.max_rel_error == 0.0);
  for (const auto& probe : report.probes) {
    CHECK(probe.analytic == 0.0);
    CHECK(probe.finite_diff == 0.0);
  }
}

TEST_CASE("grad_check flags a sign error injected into the backward pass") {
  Param w(Matrix{{0.7, -0.4}});
  Param* arr[] = {&w};
  auto broken_loss_fn = [&]() {
    zero_grads(arr);
    double loss = 0.0;
    for (std::size_t i = 0; i < w.value.size(); ++i) {
      loss += 0.5 * w.value.at(i) * w.value.at(i);
      w.grad.at(i) += -w.value.at(i);  // sign flipped on purpose
    }
    w.grad_ready = true;
    return loss;
  };
  Rng rng(31);
  const auto report = grad_check(broken_loss_fn, arr, 8, 1e-5, rng);
  CHECK(report.max_rel_error > 0.5);
}

TEST_CASE("grad_check rejects a non-deterministic loss") {
  Param w(Matrix{{1.0}});
  Param* arr[] = {&w};
  double counter = 0.0;
  auto loss_fn = [&]() {
    w.grad_ready = true;
    return counter += 1.0;
  };
  Rng rng(37);
  CHECK_THROWS_AS(grad_check(loss_fn, arr, 4, 1e-5, rng), VerificationError);
}

TEST_CASE("grad_check validates its epsilon range") {
  Param w(Matrix{{1.0}});
  Param* arr[] = {&w};
  auto loss_fn = [&]() { return 0.0; };
  Rng rng(41);
  CHECK_THROWS_AS(grad_check(loss_fn, arr, 1, 1e-7, rng), ParameterError);
  CHECK_THROWS_AS(grad_check(loss_fn, arr, 1, 1e-2, rng), ParameterError);
}

}  // TEST_SUITE
