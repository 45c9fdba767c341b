#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pading/graph.hpp"
#include "pading/optim.hpp"
#include "pading/rng.hpp"

namespace pading {

// Multi-bandwidth Gaussian-kernel set for the generator objective.
struct MmdConfig {
  std::vector<double> bandwidths = {2.0, 5.0, 10.0, 20.0, 40.0, 60.0};

  void validate() const;
};

// Learnable primitive bank; rows are fine-grained attribute vectors.
struct PrimitiveBank {
  Param p;  // n_primitives x d_k

  explicit PrimitiveBank(Matrix values) : p(std::move(values)) {}
  std::size_t n_primitives() const { return p.value.rows(); }
  std::size_t d_k() const { return p.value.cols(); }
};

// One cross-attention block: queries from the current stream, keys/values
// from the refined primitive bank, output projection to d_out.
struct CrossAttentionBlock {
  Param wq;  // d_in x d_k
  Param wk;  // d_k x d_k
  Param wv;  // d_k x d_k
  Param w1;  // d_k x d_out
};

// Primitive cross-modal generator: a self-attention refinement of the bank
// followed by stacked cross-attention blocks; semantic embeddings act as
// queries and the residual carries the projected query plus noise.
struct GeneratorModel {
  std::size_t d_a = 0;
  std::size_t d_k = 0;
  std::size_t d_x = 0;
  PrimitiveBank bank;
  Param sa_wq, sa_wk, sa_wv;  // d_k x d_k self-attention projections
  std::vector<CrossAttentionBlock> blocks;

  std::size_t layer_count() const { return blocks.size(); }
  std::size_t noise_dim() const { return d_k; }
  std::vector<Param*> params();
  std::vector<std::pair<std::string, Param*>> named_params();
};

GeneratorModel init_generator(std::size_t d_a, std::size_t d_k, std::size_t d_x,
                              std::size_t n_primitives, std::size_t layer_count,
                              std::uint64_t seed);

// Self-attention-refined primitive bank (n_primitives x d_k). When
// attention_out is non-null it receives the attention probabilities.
Matrix primitive_self_attention(GeneratorModel& model, Matrix* attention_out = nullptr);

// Standard-Gaussian noise batch shaped for generate().
Matrix sample_noise(std::size_t rows, std::size_t noise_dim, Rng& rng);

// Synthesizes features for a batch of semantic embeddings with the given
// noise. Supplying the noise keeps the call deterministic.
Matrix generate(GeneratorModel& model, const Matrix& semantic_batch, const Matrix& noise);

// Graph builders used by the training losses.
Value refined_bank_graph(Graph& g, GeneratorModel& model, Value* attention = nullptr);
Value generate_graph(Graph& g, GeneratorModel& model, Value semantic_batch, Value noise);

// Gaussian kernel exp(-||f - f'||^2 / (2 sigma^2)).
double gaussian_kernel(std::span<const double> f, std::span<const double> f_prime,
                       double sigma);

// Biased squared-MMD estimator between two sample sets, each term
// normalized by its population size, summed over the configured
// bandwidths. Always >= 0 up to roundoff.
double mmd_loss(const Matrix& x_real, const Matrix& x_syn, const MmdConfig& cfg);
Value mmd_loss_graph(Graph& g, Value x_real, Value x_syn, const MmdConfig& cfg);

}  // namespace pading
