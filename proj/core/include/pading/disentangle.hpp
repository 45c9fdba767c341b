#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pading/graph.hpp"
#include "pading/semantic_space.hpp"

namespace pading {

struct DisentangleConfig {
  double tau = 0.1;          // temperature of the semantic-correlation softmax
  std::size_t hidden = 0;    // 0 -> 2 * d_x
  std::size_t d_u = 0;       // 0 -> d_a
  double dropout = 0.1;
  double leaky_slope = 0.2;

  void validate() const;
};

// One-hidden-layer MLP d_x -> d_a extracting the semantic-related part.
struct RelatedEncoder {
  Param w1, b1, w2, b2;
};

// One-hidden-layer MLP d_x -> 2*d_u emitting a diagonal-Gaussian posterior
// (mean and log-variance halves; log-variance clamped to [-10, 10]).
struct UnrelatedEncoder {
  Param w1, b1, w2, b2;
  std::size_t d_u = 0;
};

// Two stacked linear layers with LeakyReLU and dropout between,
// (d_a + d_u) -> d_x.
struct Decoder {
  Param w1, b1, w2, b2;
};

struct DisentangleModules {
  RelatedEncoder related;
  UnrelatedEncoder unrelated;
  Decoder decoder;
  DisentangleConfig cfg;
  std::size_t d_x = 0;
  std::size_t d_a = 0;

  std::vector<Param*> params();
  std::vector<std::pair<std::string, Param*>> named_params();
};

DisentangleModules init_disentangle(std::size_t d_x, std::size_t d_a,
                                    const DisentangleConfig& cfg, std::uint64_t seed);

// --- graph builders (train path) --------------------------------------------

Value encode_related_graph(Graph& g, DisentangleModules& m, Value x, bool train_mode,
                           Rng* rng);

struct UnrelatedEncoding {
  Value mu;
  Value logvar;
  Value sample;  // mu + exp(logvar/2) * eps in train mode, mu otherwise
};
UnrelatedEncoding encode_unrelated_graph(Graph& g, DisentangleModules& m, Value x,
                                         bool train_mode, Rng* rng);

Value related_loss_graph(Graph& g, Value x_hat, const std::vector<std::size_t>& labels,
                         const SemanticSpace& space, double tau);
Value unrelated_kl_graph(Graph& g, Value mu, Value logvar);
Value reconstruct_loss_graph(Graph& g, DisentangleModules& m, Value x, Value x_hat,
                             Value x_unrelated, bool train_mode, Rng* rng);

// --- plain wrappers (eval path / direct use) ---------------------------------

Matrix encode_related(DisentangleModules& m, const Matrix& x, bool train_mode = false,
                      Rng* rng = nullptr);

struct UnrelatedResult {
  Matrix mu;
  Matrix logvar;
  Matrix sample;
};
UnrelatedResult encode_unrelated(DisentangleModules& m, const Matrix& x,
                                 bool train_mode = false, Rng* rng = nullptr);

double related_loss(const Matrix& x_hat, const std::vector<std::size_t>& labels,
                    const SemanticSpace& space, double tau);
double unrelated_kl(const Matrix& mu, const Matrix& logvar);
double reconstruct_loss(DisentangleModules& m, const Matrix& x, const Matrix& x_hat,
                        const Matrix& x_unrelated, bool train_mode = false,
                        Rng* rng = nullptr);

// L_R + L_U + L_recon on one batch, evaluated in eval mode.
double disentangle_loss(DisentangleModules& m, const Matrix& x,
                        const std::vector<std::size_t>& labels,
                        const SemanticSpace& space);

}  // namespace pading
