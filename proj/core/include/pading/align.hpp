#pragma once

#include <vector>

#include "pading/graph.hpp"
#include "pading/semantic_space.hpp"

namespace pading {

// Where a row of an alignment batch came from. Seen rows may be real or
// synthetic; unseen rows are synthetic only.
enum class Origin { kRealSeen, kSyntheticSeen, kSyntheticUnseen };

inline Group group_of_origin(Origin o) {
  return o == Origin::kSyntheticUnseen ? Group::kUnseen : Group::kSeen;
}

struct AlignConfig {
  double tau = 0.1;
  bool include_intra = true;
  bool include_inter = true;
  double epsilon_norm = 1e-8;  // reject rows shorter than this in cosine space

  void validate() const;
};

struct AlignBatch {
  Matrix x_hat;                      // n x d
  std::vector<std::size_t> labels;   // class id per row
  std::vector<Origin> origins;

  void validate(const SemanticSpace& space) const;
};

// Eligibility mask over row pairs: symmetric, zero diagonal, entry 1 iff
// the pair's groups satisfy the configured intra/inter flags.
Matrix pair_mask(const std::vector<Origin>& origins,
                 const std::vector<std::size_t>& labels, const AlignConfig& cfg);

// Relational alignment loss: per anchor row, the softmax (at temperature
// tau) over eligible pairwise cosine similarities in feature space is pulled
// toward the same distribution computed from the class semantic embeddings,
// via KL(visual || semantic), averaged over anchors. Anchors without an
// eligible pair are skipped; if every anchor is skipped the batch is
// degenerate. Gradients flow into x_hat only.
double alignment_loss(const AlignBatch& batch, const SemanticSpace& space,
                      const AlignConfig& cfg);
Value alignment_loss_graph(Graph& g, Value x_hat, const std::vector<std::size_t>& labels,
                           const std::vector<Origin>& origins, const SemanticSpace& space,
                           const AlignConfig& cfg);

}  // namespace pading
