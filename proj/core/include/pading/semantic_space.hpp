#pragma once

#include <string>
#include <vector>

#include "pading/matrix.hpp"
#include "pading/rng.hpp"

namespace pading {

enum class Group { kSeen, kUnseen };

// Class names plus l2-normalized semantic embeddings, partitioned into
// disjoint seen/unseen index sets. Row order is always seen names first,
// then unseen names.
class SemanticSpace {
 public:
  SemanticSpace(std::vector<std::string> class_names, Matrix embeddings,
                std::size_t n_seen);

  const std::vector<std::string>& class_names() const { return names_; }
  const Matrix& embeddings() const { return embeddings_; }
  std::size_t n_classes() const { return names_.size(); }
  std::size_t n_seen() const { return n_seen_; }
  std::size_t n_unseen() const { return names_.size() - n_seen_; }
  std::size_t dim() const { return embeddings_.cols(); }

  bool is_seen(std::size_t class_id) const { return class_id < n_seen_; }
  Group group_of(std::size_t class_id) const {
    return is_seen(class_id) ? Group::kSeen : Group::kUnseen;
  }
  const std::string& name_of(std::size_t class_id) const { return names_[class_id]; }
  std::size_t id_of(const std::string& name) const;  // LookupError if absent

  std::vector<std::size_t> seen_ids() const;
  std::vector<std::size_t> unseen_ids() const;

  // Embedding rows for the given class ids, stacked in order.
  Matrix rows_for(const std::vector<std::size_t>& class_ids) const;

 private:
  std::vector<std::string> names_;
  Matrix embeddings_;
  std::size_t n_seen_;
};

// Parses the embedding text format: header "N D", then one line per class,
// "name v0 v1 ... v{D-1}". Rows are l2-normalized on load. The file may
// contain more names than requested; requested names must all be present.
SemanticSpace load_semantic_space(const std::string& path,
                                  const std::vector<std::string>& seen_names,
                                  const std::vector<std::string>& unseen_names);

void save_semantic_space(const SemanticSpace& space, const std::string& path);

// Synthetic semantic space for the desk-scale benchmark: classes drawn
// around a few cluster archetypes so unseen classes have seen relatives.
// Each cluster interleaves seen and unseen members.
SemanticSpace make_synthetic_space(std::size_t n_seen, std::size_t n_unseen,
                                   std::size_t dim, std::size_t n_clusters,
                                   double cluster_spread, Rng& rng);

}  // namespace pading
