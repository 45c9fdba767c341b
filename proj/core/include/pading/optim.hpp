#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pading/graph.hpp"
#include "pading/rng.hpp"

namespace pading {

// Momentum SGD with additive L2 weight decay. Defaults follow the
// classifier training recipe.
struct SgdState {
  double learning_rate = 1e-3;
  double weight_decay = 5e-4;
  double momentum = 0.9;
  std::vector<Matrix> velocity;  // lazily shaped on first step

  SgdState() = default;
  SgdState(double lr, double wd, double mom)
      : learning_rate(lr), weight_decay(wd), momentum(mom) {}
};

// Adam with bias-corrected moments. Defaults follow the generator recipe.
struct AdamState {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t timestep = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  AdamState() = default;
  explicit AdamState(double lr) : learning_rate(lr) {}
};

// One update over params, in order. Gradients are left untouched;
// the caller zeroes them. Throws StateError if any gradient is
// unpopulated or the param list changed shape mid-run.
void sgd_step(std::span<Param* const> params, SgdState& state);
void adam_step(std::span<Param* const> params, AdamState& state);

void zero_grads(std::span<Param* const> params);

struct GradProbe {
  std::size_t param_index = 0;
  std::size_t flat_index = 0;
  double analytic = 0.0;
  double finite_diff = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<GradProbe> probes;
};

// Compares analytic gradients against central finite differences at
// probe_count randomly chosen scalar parameters. loss_fn must zero grads,
// run forward+backward, and return the loss; it must be deterministic
// (it is invoked repeatedly, including at perturbed parameter values).
GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           std::span<Param* const> params, std::size_t probe_count,
                           double eps, Rng& rng);

}  // namespace pading
