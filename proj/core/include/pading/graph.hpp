#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pading/matrix.hpp"
#include "pading/rng.hpp"

namespace pading {

// Trainable tensor: value plus accumulated gradient of identical shape.
struct Param {
  Matrix value;
  Matrix grad;
  bool grad_ready = false;

  explicit Param(Matrix v) : value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() {
    grad.fill(0.0);
    grad_ready = false;
  }
};

class Graph;

// Handle to a node on a Graph tape.
struct Value {
  Graph* graph = nullptr;
  int id = -1;

  const Matrix& matrix() const;
  std::size_t rows() const { return matrix().rows(); }
  std::size_t cols() const { return matrix().cols(); }
  double scalar() const;
};

// Reverse-mode tape. Each op records its output and a backward closure;
// backward() sweeps the tape once in reverse creation order, which is a
// valid topological order because ops only consume earlier nodes.
// Graphs are single-use: build, backward, discard.
class Graph {
 public:
  Value input(Matrix m);        // leaf without gradient
  Value param(Param& p);        // leaf bound to p; backward adds into p.grad

  Value matmul(Value a, Value b);
  Value transpose(Value a);
  Value add(Value a, Value b);               // same shape
  Value sub(Value a, Value b);
  Value mul(Value a, Value b);               // elementwise
  Value affine(Value a, double scale, double shift = 0.0);
  Value add_rowvec(Value a, Value bias);     // bias is 1 x cols, broadcast over rows
  Value exp(Value a);
  Value abs(Value a);                        // subgradient 0 at ties
  Value clamp(Value a, double lo, double hi);
  Value leaky_relu(Value a, double negative_slope);
  Value dropout(Value a, double rate, Rng& rng);  // inverted dropout; call only in train mode
  Value concat_cols(Value a, Value b);
  Value concat_rows(Value a, Value b);
  Value slice_cols(Value a, std::size_t from, std::size_t to);  // [from, to)
  Value slice_rows(Value a, std::size_t from, std::size_t to);  // [from, to)
  Value softmax_rows(Value a, double temperature = 1.0);
  Value l2_normalize_rows(Value a, double epsilon_norm = 1e-12);  // rejects near-zero rows
  Value pairwise_sqdist(Value a, Value b);   // (i,j) -> ||a_i - b_j||^2
  Value sum_all(Value a);                    // 1x1
  Value mean_all(Value a);                   // 1x1

  // Mean negative log-likelihood of labels under row-wise softmax(logits).
  Value softmax_cross_entropy_mean(Value logits, const std::vector<std::size_t>& labels);

  // Relational KL: for each anchor i, p_i = softmax(scores[i, support[i]]),
  // loss = mean_i sum_j p_ij * (log p_ij - log_q[i][j]). Anchors with empty
  // support are skipped by construction (caller filters). log_q holds the
  // log target distribution per anchor, aligned with support[i].
  Value masked_relational_kl(Value scores,
                             const std::vector<std::vector<std::size_t>>& support,
                             const std::vector<std::vector<double>>& log_q);

  void backward(Value loss);  // loss must be 1x1

  const Matrix& value_of(int id) const { return nodes_[id].value; }
  const Matrix& grad_of(int id) const { return nodes_[id].grad; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Graph&)> backward;  // pulls from this node's grad
    Param* bound = nullptr;
  };

  Value make(Matrix value, std::function<void(Graph&)> backward = nullptr,
             Param* bound = nullptr);
  Matrix& grad_mut(int id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

}  // namespace pading
