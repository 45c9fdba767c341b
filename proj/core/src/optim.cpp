#include "pading/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pading {

namespace {

void check_params_ready(std::span<Param* const> params, const char* who) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->grad_ready) {
      throw StateError(std::string(who) + ": gradient for param " + std::to_string(i) +
                       " has not been populated");
    }
    if (!params[i]->value.same_shape(params[i]->grad)) {
      throw StateError(std::string(who) + ": param " + std::to_string(i) +
                       " value/grad shapes diverged");
    }
  }
}

void ensure_slots(std::vector<Matrix>& slots, std::span<Param* const> params,
                  const char* who) {
  if (slots.empty()) {
    slots.reserve(params.size());
    for (const Param* p : params) slots.emplace_back(p->value.rows(), p->value.cols());
    return;
  }
  if (slots.size() != params.size()) {
    throw StateError(std::string(who) + ": state tracks " + std::to_string(slots.size()) +
                     " params, got " + std::to_string(params.size()));
  }
}

}  // namespace

void zero_grads(std::span<Param* const> params) {
  for (Param* p : params) p->zero_grad();
}

void sgd_step(std::span<Param* const> params, SgdState& state) {
  if (!(state.learning_rate > 0.0)) {
    throw ParameterError("sgd_step: learning_rate must be > 0");
  }
  if (state.momentum < 0.0 || state.momentum >= 1.0) {
    throw ParameterError("sgd_step: momentum must be in [0, 1)");
  }
  check_params_ready(params, "sgd_step");
  ensure_slots(state.velocity, params, "sgd_step");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    Matrix& v = state.velocity[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad.at(j) + state.weight_decay * p.value.at(j);
      v.at(j) = state.momentum * v.at(j) + g;
      p.value.at(j) -= state.learning_rate * v.at(j);
    }
  }
}

void adam_step(std::span<Param* const> params, AdamState& state) {
  if (!(state.learning_rate > 0.0)) {
    throw ParameterError("adam_step: learning_rate must be > 0");
  }
  check_params_ready(params, "adam_step");
  ensure_slots(state.first_moment, params, "adam_step");
  ensure_slots(state.second_moment, params, "adam_step");
  ++state.timestep;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.timestep));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.timestep));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad.at(j);
      m.at(j) = state.beta1 * m.at(j) + (1.0 - state.beta1) * g;
      v.at(j) = state.beta2 * v.at(j) + (1.0 - state.beta2) * g * g;
      const double mhat = m.at(j) / bc1;
      const double vhat = v.at(j) / bc2;
      p.value.at(j) -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           std::span<Param* const> params, std::size_t probe_count,
                           double eps, Rng& rng) {
  if (eps < 1e-6 || eps > 1e-3) {
    throw ParameterError("grad_check: eps must lie in [1e-6, 1e-3]");
  }
  if (params.empty()) {
    throw ParameterError("grad_check: no params to probe");
  }

  const double base = loss_fn();
  const double repeat = loss_fn();
  if (base != repeat) {
    throw VerificationError("grad_check: loss is not deterministic (" +
                            std::to_string(base) + " vs " + std::to_string(repeat) + ")");
  }

  // capture analytic gradients from a clean pass
  zero_grads(params);
  (void)loss_fn();
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (const Param* p : params) analytic.push_back(p->grad);

  GradCheckReport report;
  for (std::size_t probe = 0; probe < probe_count; ++probe) {
    const std::size_t pi = rng.uniform_index(params.size());
    Param& p = *params[pi];
    if (p.value.size() == 0) continue;
    const std::size_t fi = rng.uniform_index(p.value.size());
    const double saved = p.value.at(fi);

    p.value.at(fi) = saved + eps;
    const double lp = loss_fn();
    p.value.at(fi) = saved - eps;
    const double lm = loss_fn();
    p.value.at(fi) = saved;

    const double fd = (lp - lm) / (2.0 * eps);
    const double a = analytic[pi].at(fi);
    const double denom = std::max({std::fabs(a), std::fabs(fd), 1e-2});
    GradProbe gp{pi, fi, a, fd, std::fabs(a - fd) / denom};
    report.max_rel_error = std::max(report.max_rel_error, gp.rel_error);
    report.probes.push_back(gp);
  }

  // leave the analytic gradients in place for the caller
  zero_grads(params);
  (void)loss_fn();
  return report;
}

}  // namespace pading
