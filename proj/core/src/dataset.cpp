#include "pading/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pading {

namespace {

const char* provenance_str(Provenance p) {
  return p == Provenance::kReal ? "real" : "synthetic";
}
const char* group_str(Group g) { return g == Group::kSeen ? "seen" : "unseen"; }

Provenance parse_provenance(const std::string& s, std::size_t row) {
  if (s == "real") return Provenance::kReal;
  if (s == "synthetic") return Provenance::kSynthetic;
  throw ParseError("feature csv row " + std::to_string(row) + ": bad provenance '" + s +
                   "'");
}

Group parse_group(const std::string& s, std::size_t row) {
  if (s == "seen") return Group::kSeen;
  if (s == "unseen") return Group::kUnseen;
  throw ParseError("feature csv row " + std::to_string(row) + ": bad group '" + s + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

// column-orthonormal map via modified Gram-Schmidt on a Gaussian draw
Matrix orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows < cols) {
    throw ParameterError("orthonormal_columns: need rows >= cols, got " +
                         std::to_string(rows) + " x " + std::to_string(cols));
  }
  Matrix g = rng.normal_matrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double dot = 0.0;
      for (std::size_t r = 0; r < rows; ++r) dot += g(r, c) * g(r, prev);
      for (std::size_t r = 0; r < rows; ++r) g(r, c) -= dot * g(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += g(r, c) * g(r, c);
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      throw DegenerateInputError("orthonormal_columns: degenerate Gaussian draw");
    }
    for (std::size_t r = 0; r < rows; ++r) g(r, c) /= norm;
  }
  return g;
}

}  // namespace

void FeatureDataset::append_row(std::span<const double> row, std::size_t label,
                                Provenance prov, Group group) {
  if (features.rows() == 0 && features.cols() == 0) {
    features = Matrix(0, row.size());
  }
  if (row.size() != features.cols()) {
    throw DimensionError("FeatureDataset::append_row: row width " +
                         std::to_string(row.size()) + " vs dataset dim " +
                         std::to_string(features.cols()));
  }
  Matrix next(features.rows() + 1, features.cols());
  std::copy(features.data().begin(), features.data().end(), next.data().begin());
  std::copy(row.begin(), row.end(), next.row(features.rows()).begin());
  features = std::move(next);
  labels.push_back(label);
  provenance.push_back(prov);
  groups.push_back(group);
}

void FeatureDataset::append_all(const FeatureDataset& other) {
  if (other.size() == 0) return;
  if (size() == 0) {
    *this = other;
    return;
  }
  if (dim() != other.dim()) {
    throw DimensionError("FeatureDataset::append_all: dim mismatch " +
                         std::to_string(dim()) + " vs " + std::to_string(other.dim()));
  }
  Matrix next(size() + other.size(), dim());
  std::copy(features.data().begin(), features.data().end(), next.data().begin());
  std::copy(other.features.data().begin(), other.features.data().end(),
            next.data().begin() + static_cast<std::ptrdiff_t>(features.size()));
  features = std::move(next);
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  provenance.insert(provenance.end(), other.provenance.begin(), other.provenance.end());
  groups.insert(groups.end(), other.groups.begin(), other.groups.end());
}

FeatureDataset FeatureDataset::subset(const std::vector<std::size_t>& indices) const {
  FeatureDataset out;
  out.features = Matrix(indices.size(), dim());
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    const auto r = features.row(src);
    std::copy(r.begin(), r.end(), out.features.row(i).begin());
    out.labels.push_back(labels[src]);
    out.provenance.push_back(provenance[src]);
    out.groups.push_back(groups[src]);
  }
  return out;
}

std::vector<std::size_t> FeatureDataset::indices_of_class(std::size_t class_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == class_id) out.push_back(i);
  return out;
}

void FeatureDataset::validate(const SemanticSpace& space,
                              bool generator_training_input) const {
  if (labels.size() != features.rows() || provenance.size() != labels.size() ||
      groups.size() != labels.size()) {
    throw ValidationError("FeatureDataset: label/provenance/group lengths disagree");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= space.n_classes()) {
      throw ValidationError("FeatureDataset row " + std::to_string(i) + ": label " +
                            std::to_string(labels[i]) + " out of range");
    }
    if (groups[i] != space.group_of(labels[i])) {
      throw ValidationError("FeatureDataset row " + std::to_string(i) + ": group tag '" +
                            group_str(groups[i]) + "' contradicts the split of class '" +
                            space.name_of(labels[i]) + "'");
    }
    if (generator_training_input && provenance[i] == Provenance::kReal &&
        groups[i] == Group::kUnseen) {
      throw ValidationError("FeatureDataset row " + std::to_string(i) +
                            ": real unseen-labeled row is not allowed in "
                            "generator-training input");
    }
  }
}

void SyntheticSpec::validate() const {
  if (d_a == 0 || d_x == 0) throw ParameterError("SyntheticSpec: dims must be >= 1");
  if (nuisance_dim + d_a > d_x) {
    throw ParameterError("SyntheticSpec: need d_x >= d_a + nuisance_dim (" +
                         std::to_string(d_x) + " < " + std::to_string(d_a) + " + " +
                         std::to_string(nuisance_dim) + ")");
  }
  if (related_noise < 0.0 || nuisance_scale < 0.0) {
    throw ParameterError("SyntheticSpec: noise scales must be >= 0");
  }
  if (samples_per_class == 0) {
    throw ParameterError("SyntheticSpec: samples_per_class must be >= 1");
  }
  if (test_samples_per_class == 0) {
    throw ParameterError("SyntheticSpec: test_samples_per_class must be >= 1");
  }
}

Matrix synthetic_class_means(const SemanticSpace& space, const SyntheticSpec& spec) {
  spec.validate();
  if (space.dim() != spec.d_a) {
    throw DimensionError("synthetic_class_means: space dim " + std::to_string(space.dim()) +
                         " vs spec d_a " + std::to_string(spec.d_a));
  }
  Rng root(spec.seed);
  Rng rng_map = root.fork(0x6d6170);      // shared semantic-to-feature map
  Rng rng_class = root.fork(0x636c73);    // per-class nuisance vectors

  const std::size_t related_dim = spec.d_x - spec.nuisance_dim;
  const Matrix w = orthonormal_columns(related_dim, spec.d_a, rng_map);

  Matrix means(space.n_classes(), spec.d_x);
  for (std::size_t c = 0; c < space.n_classes(); ++c) {
    for (std::size_t r = 0; r < related_dim; ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < spec.d_a; ++j) s += w(r, j) * space.embeddings()(c, j);
      means(c, r) = s;
    }
    for (std::size_t r = 0; r < spec.nuisance_dim; ++r) {
      means(c, related_dim + r) = spec.nuisance_scale * rng_class.normal();
    }
  }
  return means;
}

std::pair<FeatureDataset, FeatureDataset> make_synthetic_dataset(
    const SemanticSpace& space, const SyntheticSpec& spec) {
  const Matrix means = synthetic_class_means(space, spec);
  Rng root(spec.seed);
  Rng rng_train = root.fork(0x7472);
  Rng rng_test = root.fork(0x7465);

  auto draw = [&](std::size_t class_id, Rng& rng, Matrix& dst, std::size_t row) {
    for (std::size_t j = 0; j < spec.d_x; ++j) {
      dst(row, j) = means(class_id, j) + spec.related_noise * rng.normal();
    }
  };

  FeatureDataset train;
  train.features = Matrix(space.n_seen() * spec.samples_per_class, spec.d_x);
  std::size_t row = 0;
  for (std::size_t c = 0; c < space.n_seen(); ++c) {
    for (std::size_t s = 0; s < spec.samples_per_class; ++s, ++row) {
      draw(c, rng_train, train.features, row);
      train.labels.push_back(c);
      train.provenance.push_back(Provenance::kReal);
      train.groups.push_back(Group::kSeen);
    }
  }

  FeatureDataset test;
  test.features = Matrix(space.n_classes() * spec.test_samples_per_class, spec.d_x);
  row = 0;
  for (std::size_t c = 0; c < space.n_classes(); ++c) {
    for (std::size_t s = 0; s < spec.test_samples_per_class; ++s, ++row) {
      draw(c, rng_test, test.features, row);
      test.labels.push_back(c);
      test.provenance.push_back(Provenance::kReal);
      test.groups.push_back(space.group_of(c));
    }
  }
  return {std::move(train), std::move(test)};
}

FeatureDataset load_feature_dataset(const std::string& path, const SemanticSpace& space,
                                    bool generator_training_input) {
  std::ifstream in(path);
  if (!in) throw IoError("load_feature_dataset: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("load_feature_dataset: '" + path + "' is empty (no header)");
  }
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "label" || header[1] != "provenance" ||
      header[2] != "group") {
    throw ParseError("load_feature_dataset: bad header in '" + path + "'");
  }
  const std::size_t d = header.size() - 3;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[3 + j] != "f" + std::to_string(j)) {
      throw ParseError("load_feature_dataset: bad feature column name '" + header[3 + j] +
                       "'");
    }
  }

  FeatureDataset out;
  std::vector<double> row_vals(d);
  std::size_t row_index = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row_index;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3 + d) {
      throw ParseError("feature csv row " + std::to_string(row_index) + ": expected " +
                       std::to_string(3 + d) + " fields, got " +
                       std::to_string(fields.size()));
    }
    std::size_t label;
    try {
      label = space.id_of(fields[0]);
    } catch (const LookupError&) {
      throw ParseError("feature csv row " + std::to_string(row_index) +
                       ": unknown label '" + fields[0] + "'");
    }
    const Provenance prov = parse_provenance(fields[1], row_index);
    const Group group = parse_group(fields[2], row_index);
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& f = fields[3 + j];
      std::size_t pos = 0;
      try {
        row_vals[j] = std::stod(f, &pos);
      } catch (const std::exception&) {
        throw ParseError("feature csv row " + std::to_string(row_index) +
                         ": non-numeric field '" + f + "'");
      }
      if (pos != f.size()) {
        throw ParseError("feature csv row " + std::to_string(row_index) +
                         ": non-numeric field '" + f + "'");
      }
    }
    rows.push_back(row_vals);
    out.labels.push_back(label);
    out.provenance.push_back(prov);
    out.groups.push_back(group);
  }

  out.features = Matrix(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), out.features.row(i).begin());
  }
  out.validate(space, generator_training_input);
  return out;
}

void export_features(const FeatureDataset& dataset, const SemanticSpace& space,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("export_features: cannot write '" + path + "'");
  out << "label,provenance,group";
  for (std::size_t j = 0; j < dataset.dim(); ++j) out << ",f" << j;
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << space.name_of(dataset.labels[i]) << "," << provenance_str(dataset.provenance[i])
        << "," << group_str(dataset.groups[i]);
    for (double v : dataset.features.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("export_features: write failed for '" + path + "'");
}

std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, std::size_t batch_size,
                                                    Rng& rng) {
  if (batch_size == 0) throw ParameterError("batch_indices: batch_size must be >= 1");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace pading
