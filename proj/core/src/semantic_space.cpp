#include "pading/semantic_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pading {

SemanticSpace::SemanticSpace(std::vector<std::string> class_names, Matrix embeddings,
                             std::size_t n_seen)
    : names_(std::move(class_names)), embeddings_(std::move(embeddings)), n_seen_(n_seen) {
  if (names_.size() != embeddings_.rows()) {
    throw DimensionError("SemanticSpace: " + std::to_string(names_.size()) +
                         " names for " + embeddings_.shape_str() + " embeddings");
  }
  if (n_seen_ > names_.size()) {
    throw ParameterError("SemanticSpace: n_seen exceeds class count");
  }
  std::unordered_set<std::string> seen_names;
  for (const auto& n : names_) {
    if (!seen_names.insert(n).second) {
      throw ParseError("SemanticSpace: duplicate class name '" + n + "'");
    }
  }
  std::size_t zero_rows = 0;
  embeddings_ = l2_normalize_rows(embeddings_, &zero_rows);
  if (zero_rows > 0) {
    throw ParameterError("SemanticSpace: " + std::to_string(zero_rows) +
                         " zero embedding row(s); every class needs a direction");
  }
}

std::size_t SemanticSpace::id_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw LookupError("SemanticSpace: unknown class name '" + name + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<std::size_t> SemanticSpace::seen_ids() const {
  std::vector<std::size_t> ids(n_seen_);
  for (std::size_t i = 0; i < n_seen_; ++i) ids[i] = i;
  return ids;
}

std::vector<std::size_t> SemanticSpace::unseen_ids() const {
  std::vector<std::size_t> ids(n_unseen());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = n_seen_ + i;
  return ids;
}

Matrix SemanticSpace::rows_for(const std::vector<std::size_t>& class_ids) const {
  Matrix out(class_ids.size(), dim());
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    if (class_ids[i] >= n_classes()) {
      throw LookupError("SemanticSpace::rows_for: class id " +
                        std::to_string(class_ids[i]) + " out of range");
    }
    const auto src = embeddings_.row(class_ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

SemanticSpace load_semantic_space(const std::string& path,
                                  const std::vector<std::string>& seen_names,
                                  const std::vector<std::string>& unseen_names) {
  std::ifstream in(path);
  if (!in) throw IoError("load_semantic_space: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("load_semantic_space: empty file '" + path + "'");
  }
  std::istringstream header(line);
  std::size_t n = 0, d = 0;
  if (!(header >> n >> d)) {
    throw ParseError("load_semantic_space: line 1: expected header \"N D\", got \"" +
                     line + "\"");
  }
  std::string trailing;
  if (header >> trailing) {
    throw ParseError("load_semantic_space: line 1: trailing token '" + trailing + "'");
  }

  std::unordered_map<std::string, std::vector<double>> table;
  table.reserve(n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string name;
    row >> name;
    std::vector<double> vals(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!(row >> vals[j])) {
        throw ParseError("load_semantic_space: line " + std::to_string(line_no) +
                         ": expected " + std::to_string(d) + " values for '" + name + "'");
      }
    }
    double extra;
    if (row >> extra) {
      throw ParseError("load_semantic_space: line " + std::to_string(line_no) +
                       ": more than " + std::to_string(d) + " values for '" + name + "'");
    }
    if (!table.emplace(name, std::move(vals)).second) {
      throw ParseError("load_semantic_space: line " + std::to_string(line_no) +
                       ": duplicate name '" + name + "'");
    }
  }
  if (table.size() != n) {
    throw ParseError("load_semantic_space: header promises " + std::to_string(n) +
                     " rows, file has " + std::to_string(table.size()));
  }

  std::vector<std::string> order;
  order.reserve(seen_names.size() + unseen_names.size());
  order.insert(order.end(), seen_names.begin(), seen_names.end());
  order.insert(order.end(), unseen_names.begin(), unseen_names.end());

  Matrix emb(order.size(), d);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto it = table.find(order[i]);
    if (it == table.end()) {
      throw LookupError("load_semantic_space: requested name '" + order[i] +
                        "' not present in '" + path + "'");
    }
    std::copy(it->second.begin(), it->second.end(), emb.row(i).begin());
  }
  return SemanticSpace(std::move(order), std::move(emb), seen_names.size());
}

void save_semantic_space(const SemanticSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_semantic_space: cannot write '" + path + "'");
  out << space.n_classes() << " " << space.dim() << "\n";
  char buf[64];
  for (std::size_t i = 0; i < space.n_classes(); ++i) {
    out << space.name_of(i);
    for (double v : space.embeddings().row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("save_semantic_space: write failed for '" + path + "'");
}

SemanticSpace make_synthetic_space(std::size_t n_seen, std::size_t n_unseen,
                                   std::size_t dim, std::size_t n_clusters,
                                   double cluster_spread, Rng& rng) {
  if (n_seen == 0 || dim == 0) {
    throw ParameterError("make_synthetic_space: need n_seen >= 1 and dim >= 1");
  }
  if (n_clusters == 0) n_clusters = 1;
  const std::size_t total = n_seen + n_unseen;

  Matrix archetypes = rng.normal_matrix(n_clusters, dim);
  archetypes = l2_normalize_rows(archetypes);

  // round-robin cluster assignment keeps every cluster populated by both
  // groups, so each unseen class has seen relatives
  Matrix emb(total, dim);
  for (std::size_t c = 0; c < total; ++c) {
    const std::size_t cluster = c % n_clusters;
    for (std::size_t j = 0; j < dim; ++j) {
      emb(c, j) = archetypes(cluster, j) + cluster_spread * rng.normal();
    }
  }

  std::vector<std::string> names(total);
  for (std::size_t i = 0; i < n_seen; ++i) names[i] = "seen_" + std::to_string(i);
  for (std::size_t i = 0; i < n_unseen; ++i) names[n_seen + i] = "unseen_" + std::to_string(i);
  return SemanticSpace(std::move(names), std::move(emb), n_seen);
}

}  // namespace pading
