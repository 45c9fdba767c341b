#include "pading/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pading {

void AlignConfig::validate() const {
  if (!(tau > 0.0)) throw ParameterError("AlignConfig: tau must be > 0");
  if (!include_intra && !include_inter) {
    throw ParameterError("AlignConfig: at least one of intra/inter must be enabled");
  }
  if (!(epsilon_norm > 0.0)) {
    throw ParameterError("AlignConfig: epsilon_norm must be > 0");
  }
}

void AlignBatch::validate(const SemanticSpace& space) const {
  if (labels.size() != x_hat.rows() || origins.size() != x_hat.rows()) {
    throw ValidationError("AlignBatch: label/origin lengths do not match rows");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= space.n_classes()) {
      throw LookupError("AlignBatch row " + std::to_string(i) + ": label out of range");
    }
    if (group_of_origin(origins[i]) != space.group_of(labels[i])) {
      throw ValidationError("AlignBatch row " + std::to_string(i) +
                            ": origin group contradicts the label's split");
    }
  }
}

Matrix pair_mask(const std::vector<Origin>& origins,
                 const std::vector<std::size_t>& labels, const AlignConfig& cfg) {
  cfg.validate();
  if (!labels.empty() && labels.size() != origins.size()) {
    throw DimensionError("pair_mask: labels and origins lengths differ");
  }
  const std::size_t n = origins.size();
  Matrix mask(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same_group = group_of_origin(origins[i]) == group_of_origin(origins[j]);
      const bool eligible = same_group ? cfg.include_intra : cfg.include_inter;
      mask(i, j) = eligible ? 1.0 : 0.0;
      mask(j, i) = mask(i, j);
    }
  }
  return mask;
}

Value alignment_loss_graph(Graph& g, Value x_hat, const std::vector<std::size_t>& labels,
                           const std::vector<Origin>& origins, const SemanticSpace& space,
                           const AlignConfig& cfg) {
  cfg.validate();
  const std::size_t n = x_hat.rows();
  if (n < 2) throw ParameterError("alignment_loss: need at least 2 rows");
  if (labels.size() != n || origins.size() != n) {
    throw DimensionError("alignment_loss: labels/origins do not match batch rows");
  }
  for (std::size_t l : labels) {
    if (l >= space.n_classes()) {
      throw LookupError("alignment_loss: label " + std::to_string(l) + " out of range");
    }
  }

  const Matrix mask = pair_mask(origins, labels, cfg);
  std::vector<std::vector<std::size_t>> support(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mask(i, j) != 0.0) support[i].push_back(j);
    }
  }

  // constant semantic side: softmax over the same supports at the same tau
  const Matrix sem_cos = cosine_matrix(space.rows_for(labels));
  std::vector<std::vector<double>> log_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sup = support[i];
    if (sup.empty()) continue;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j : sup) mx = std::max(mx, sem_cos(i, j) / cfg.tau);
    double z = 0.0;
    for (std::size_t j : sup) z += std::exp(sem_cos(i, j) / cfg.tau - mx);
    const double lz = std::log(z);
    log_q[i].reserve(sup.size());
    for (std::size_t j : sup) log_q[i].push_back(sem_cos(i, j) / cfg.tau - mx - lz);
  }

  Value xn = g.l2_normalize_rows(x_hat, cfg.epsilon_norm);
  Value scores = g.affine(g.matmul(xn, g.transpose(xn)), 1.0 / cfg.tau);
  return g.masked_relational_kl(scores, support, log_q);
}

double alignment_loss(const AlignBatch& batch, const SemanticSpace& space,
                      const AlignConfig& cfg) {
  batch.validate(space);
  Graph g;
  return alignment_loss_graph(g, g.input(batch.x_hat), batch.labels, batch.origins, space,
                              cfg)
      .scalar();
}

}  // namespace pading
