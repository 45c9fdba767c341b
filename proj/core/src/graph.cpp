#include "pading/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pading {

const Matrix& Value::matrix() const { return graph->value_of(id); }

double Value::scalar() const {
  const Matrix& m = matrix();
  if (m.rows() != 1 || m.cols() != 1) {
    throw DimensionError("Value::scalar: node is " + m.shape_str() + ", want 1x1");
  }
  return m(0, 0);
}

Value Graph::make(Matrix value, std::function<void(Graph&)> backward, Param* bound) {
  Node n;
  n.grad = Matrix(value.rows(), value.cols());
  n.value = std::move(value);
  n.backward = std::move(backward);
  n.bound = bound;
  nodes_.push_back(std::move(n));
  return Value{this, static_cast<int>(nodes_.size()) - 1};
}

Value Graph::input(Matrix m) { return make(std::move(m)); }

Value Graph::param(Param& p) { return make(p.value, nullptr, &p); }

Value Graph::matmul(Value a, Value b) {
  const int ia = a.id, ib = b.id;
  Value out = make(pading::matmul(a.matrix(), b.matrix()));
  const int self = out.id;
  nodes_[self].backward = [ia, ib, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& va = g.nodes_[ia].value;
    const Matrix& vb = g.nodes_[ib].value;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    const std::size_t n = va.rows(), k = va.cols(), m = vb.cols();
    // gA += G * B^T
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += gout(i, j) * vb(p, j);
        ga(i, p) += s;
      }
    }
    // gB += A^T * G
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double av = va(i, p);
        if (av == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) gb(p, j) += av * gout(i, j);
      }
    }
  };
  return out;
}

Value Graph::transpose(Value a) {
  const int ia = a.id;
  Value out = make(pading::transpose(a.matrix()));
  const int self = out.id;
  nodes_[self].backward = [ia, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.rows(); ++i)
      for (std::size_t j = 0; j < gout.cols(); ++j) ga(j, i) += gout(i, j);
  };
  return out;
}

Value Graph::add(Value a, Value b) {
  const int ia = a.id, ib = b.id;
  Value out = make(pading::add(a.matrix(), b.matrix()));
  const int self = out.id;
  nodes_[self].backward = [ia, ib, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      ga.at(i) += gout.at(i);
      gb.at(i) += gout.at(i);
    }
  };
  return out;
}

Value Graph::sub(Value a, Value b) {
  const int ia = a.id, ib = b.id;
  Value out = make(pading::sub(a.matrix(), b.matrix()));
  const int self = out.id;
  nodes_[self].backward = [ia, ib, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      ga.at(i) += gout.at(i);
      gb.at(i) -= gout.at(i);
    }
  };
  return out;
}

Value Graph::mul(Value a, Value b) {
  const int ia = a.id, ib = b.id;
  Value out = make(pading::hadamard(a.matrix(), b.matrix()));
  const int self = out.id;
  nodes_[self].backward = [ia, ib, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& va = g.nodes_[ia].value;
    const Matrix& vb = g.nodes_[ib].value;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      ga.at(i) += gout.at(i) * vb.at(i);
      gb.at(i) += gout.at(i) * va.at(i);
    }
  };
  return out;
}

Value Graph::affine(Value a, double s, double shift) {
  const int ia = a.id;
  Matrix m = a.matrix();
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = s * m.at(i) + shift;
  Value out = make(std::move(m));
  const int self = out.id;
  nodes_[self].backward = [ia, s, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.size(); ++i) ga.at(i) += s * gout.at(i);
  };
  return out;
}

Value Graph::add_rowvec(Value a, Value bias) {
  const Matrix& am = a.matrix();
  const Matrix& bm = bias.matrix();
  if (bm.rows() != 1 || bm.cols() != am.cols()) {
    throw DimensionError("add_rowvec: bias " + bm.shape_str() + " does not broadcast over " +
                         am.shape_str());
  }
  Matrix out = am;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bm(0, j);
  const int ia = a.id, ib = bias.id;
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, ib, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < gout.rows(); ++i)
      for (std::size_t j = 0; j < gout.cols(); ++j) {
        ga(i, j) += gout(i, j);
        gb(0, j) += gout(i, j);
      }
  };
  return v;
}

Value Graph::exp(Value a) {
  Matrix m = a.matrix();
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = std::exp(m.at(i));
  const int ia = a.id;
  Value out = make(std::move(m));
  const int self = out.id;
  nodes_[self].backward = [ia, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& y = g.nodes_[self].value;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.size(); ++i) ga.at(i) += gout.at(i) * y.at(i);
  };
  return out;
}

Value Graph::abs(Value a) {
  Matrix m = a.matrix();
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = std::fabs(m.at(i));
  const int ia = a.id;
  Value out = make(std::move(m));
  const int self = out.id;
  nodes_[self].backward = [ia, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& x = g.nodes_[ia].value;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      const double s = x.at(i) > 0.0 ? 1.0 : (x.at(i) < 0.0 ? -1.0 : 0.0);
      ga.at(i) += gout.at(i) * s;
    }
  };
  return out;
}

Value Graph::clamp(Value a, double lo, double hi) {
  Matrix m = a.matrix();
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = std::clamp(m.at(i), lo, hi);
  const int ia = a.id;
  Value out = make(std::move(m));
  const int self = out.id;
  nodes_[self].backward = [ia, lo, hi, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& x = g.nodes_[ia].value;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.size(); ++i) {
      if (x.at(i) > lo && x.at(i) < hi) ga.at(i) += gout.at(i);
    }
  };
  return out;
}

Value Graph::leaky_relu(Value a, double negative_slope) {
  Matrix m = a.matrix();
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.at(i) < 0.0) m.at(i) *= negative_slope;
  const int ia = a.id;
  Value out = make(std::move(m));
  const int self = out.id;
  nodes_[self].backward = [ia, negative_slope, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& x = g.nodes_[ia].value;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.size(); ++i)
      ga.at(i) += gout.at(i) * (x.at(i) > 0.0 ? 1.0 : negative_slope);
  };
  return out;
}

Value Graph::dropout(Value a, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ParameterError("dropout: rate must be in [0, 1), got " + std::to_string(rate));
  }
  const double keep = 1.0 - rate;
  Matrix mask(a.rows(), a.cols());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask.at(i) = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
  Matrix m = pading::hadamard(a.matrix(), mask);
  const int ia = a.id;
  Value out = make(std::move(m));
  const int self = out.id;
  nodes_[self].backward = [ia, mask = std::move(mask), self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.size(); ++i) ga.at(i) += gout.at(i) * mask.at(i);
  };
  return out;
}

Value Graph::concat_cols(Value a, Value b) {
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  if (am.rows() != bm.rows()) {
    throw DimensionError("concat_cols: row mismatch " + am.shape_str() + " vs " +
                         bm.shape_str());
  }
  Matrix out(am.rows(), am.cols() + bm.cols());
  for (std::size_t i = 0; i < am.rows(); ++i) {
    for (std::size_t j = 0; j < am.cols(); ++j) out(i, j) = am(i, j);
    for (std::size_t j = 0; j < bm.cols(); ++j) out(i, am.cols() + j) = bm(i, j);
  }
  const int ia = a.id, ib = b.id;
  const std::size_t acols = am.cols(), bcols = bm.cols();
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, ib, acols, bcols, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < gout.rows(); ++i) {
      for (std::size_t j = 0; j < acols; ++j) ga(i, j) += gout(i, j);
      for (std::size_t j = 0; j < bcols; ++j) gb(i, j) += gout(i, acols + j);
    }
  };
  return v;
}

Value Graph::concat_rows(Value a, Value b) {
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  if (am.cols() != bm.cols()) {
    throw DimensionError("concat_rows: column mismatch " + am.shape_str() + " vs " +
                         bm.shape_str());
  }
  Matrix out(am.rows() + bm.rows(), am.cols());
  std::copy(am.data().begin(), am.data().end(), out.data().begin());
  std::copy(bm.data().begin(), bm.data().end(),
            out.data().begin() + static_cast<std::ptrdiff_t>(am.size()));
  const int ia = a.id, ib = b.id;
  const std::size_t arows = am.rows();
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, ib, arows, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < arows; ++i)
      for (std::size_t j = 0; j < gout.cols(); ++j) ga(i, j) += gout(i, j);
    for (std::size_t i = arows; i < gout.rows(); ++i)
      for (std::size_t j = 0; j < gout.cols(); ++j) gb(i - arows, j) += gout(i, j);
  };
  return v;
}

Value Graph::slice_rows(Value a, std::size_t from, std::size_t to) {
  const Matrix& am = a.matrix();
  if (from > to || to > am.rows()) {
    throw DimensionError("slice_rows: range [" + std::to_string(from) + ", " +
                         std::to_string(to) + ") out of bounds for " + am.shape_str());
  }
  Matrix out(to - from, am.cols());
  std::copy(am.data().begin() + static_cast<std::ptrdiff_t>(from * am.cols()),
            am.data().begin() + static_cast<std::ptrdiff_t>(to * am.cols()),
            out.data().begin());
  const int ia = a.id;
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, from, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.rows(); ++i)
      for (std::size_t j = 0; j < gout.cols(); ++j) ga(from + i, j) += gout(i, j);
  };
  return v;
}

Value Graph::slice_cols(Value a, std::size_t from, std::size_t to) {
  const Matrix& am = a.matrix();
  if (from > to || to > am.cols()) {
    throw DimensionError("slice_cols: range [" + std::to_string(from) + ", " +
                         std::to_string(to) + ") out of bounds for " + am.shape_str());
  }
  Matrix out(am.rows(), to - from);
  for (std::size_t i = 0; i < am.rows(); ++i)
    for (std::size_t j = from; j < to; ++j) out(i, j - from) = am(i, j);
  const int ia = a.id;
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, from, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < gout.rows(); ++i)
      for (std::size_t j = 0; j < gout.cols(); ++j) ga(i, from + j) += gout(i, j);
  };
  return v;
}

Value Graph::softmax_rows(Value a, double temperature) {
  Matrix out = pading::softmax_rows(a.matrix(), temperature);
  const int ia = a.id;
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, temperature, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& p = g.nodes_[self].value;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < p.cols(); ++j) dot += gout(i, j) * p(i, j);
      for (std::size_t j = 0; j < p.cols(); ++j)
        ga(i, j) += p(i, j) * (gout(i, j) - dot) / temperature;
    }
  };
  return v;
}

Value Graph::l2_normalize_rows(Value a, double epsilon_norm) {
  const Matrix& am = a.matrix();
  std::vector<double> norms(am.rows());
  for (std::size_t i = 0; i < am.rows(); ++i) {
    double sq = 0.0;
    for (double x : am.row(i)) sq += x * x;
    norms[i] = std::sqrt(sq);
    if (norms[i] < epsilon_norm) {
      throw DegenerateInputError("l2_normalize_rows: row " + std::to_string(i) +
                                 " has near-zero norm");
    }
  }
  Matrix out = am;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) /= norms[i];
  const int ia = a.id;
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, norms = std::move(norms), self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& y = g.nodes_[self].value;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += gout(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j)
        ga(i, j) += (gout(i, j) - dot * y(i, j)) / norms[i];
    }
  };
  return v;
}

Value Graph::pairwise_sqdist(Value a, Value b) {
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  if (am.cols() != bm.cols()) {
    throw DimensionError("pairwise_sqdist: width mismatch " + am.shape_str() + " vs " +
                         bm.shape_str());
  }
  Matrix out(am.rows(), bm.rows());
  for (std::size_t i = 0; i < am.rows(); ++i)
    for (std::size_t j = 0; j < bm.rows(); ++j) out(i, j) = row_sqdist(am, i, bm, j);
  const int ia = a.id, ib = b.id;
  Value v = make(std::move(out));
  const int self = v.id;
  nodes_[self].backward = [ia, ib, self](Graph& g) {
    const Matrix& gout = g.nodes_[self].grad;
    const Matrix& va = g.nodes_[ia].value;
    const Matrix& vb = g.nodes_[ib].value;
    Matrix& ga = g.grad_mut(ia);
    Matrix& gb = g.grad_mut(ib);
    for (std::size_t i = 0; i < va.rows(); ++i) {
      for (std::size_t j = 0; j < vb.rows(); ++j) {
        const double w = 2.0 * gout(i, j);
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < va.cols(); ++k) {
          const double d = va(i, k) - vb(j, k);
          ga(i, k) += w * d;
          gb(j, k) -= w * d;
        }
      }
    }
  };
  return v;
}

Value Graph::sum_all(Value a) {
  const Matrix& am = a.matrix();
  double s = 0.0;
  for (std::size_t i = 0; i < am.size(); ++i) s += am.at(i);
  const int ia = a.id;
  Value v = make(Matrix{{s}});
  const int self = v.id;
  nodes_[self].backward = [ia, self](Graph& g) {
    const double gout = g.nodes_[self].grad(0, 0);
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.at(i) += gout;
  };
  return v;
}

Value Graph::mean_all(Value a) {
  const Matrix& am = a.matrix();
  if (am.size() == 0) throw ParameterError("mean_all: empty matrix");
  double s = 0.0;
  for (std::size_t i = 0; i < am.size(); ++i) s += am.at(i);
  const double inv = 1.0 / static_cast<double>(am.size());
  const int ia = a.id;
  Value v = make(Matrix{{s * inv}});
  const int self = v.id;
  nodes_[self].backward = [ia, inv, self](Graph& g) {
    const double gout = g.nodes_[self].grad(0, 0) * inv;
    Matrix& ga = g.grad_mut(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga.at(i) += gout;
  };
  return v;
}

Value Graph::softmax_cross_entropy_mean(Value logits, const std::vector<std::size_t>& labels) {
  const Matrix& lm = logits.matrix();
  if (lm.rows() == 0) throw ParameterError("softmax_cross_entropy_mean: empty batch");
  if (labels.size() != lm.rows()) {
    throw DimensionError("softmax_cross_entropy_mean: " + std::to_string(labels.size()) +
                         " labels for " + lm.shape_str() + " logits");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= lm.cols()) {
      throw LookupError("softmax_cross_entropy_mean: label " + std::to_string(labels[i]) +
                        " out of range for " + std::to_string(lm.cols()) + " classes");
    }
  }
  double total = 0.0;
  Matrix probs = pading::softmax_rows(lm, 1.0);
  for (std::size_t i = 0; i < lm.rows(); ++i) {
    // recompute the log-prob stably instead of log(probs)
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : lm.row(i)) mx = std::max(mx, x);
    double lse = 0.0;
    for (double x : lm.row(i)) lse += std::exp(x - mx);
    total += -(lm(i, labels[i]) - mx - std::log(lse));
  }
  const double invn = 1.0 / static_cast<double>(lm.rows());
  const int il = logits.id;
  Value v = make(Matrix{{total * invn}});
  const int self = v.id;
  nodes_[self].backward = [il, labels, probs = std::move(probs), invn, self](Graph& g) {
    const double gout = g.nodes_[self].grad(0, 0);
    Matrix& gl = g.grad_mut(il);
    for (std::size_t i = 0; i < probs.rows(); ++i) {
      for (std::size_t j = 0; j < probs.cols(); ++j) {
        double d = probs(i, j);
        if (j == labels[i]) d -= 1.0;
        gl(i, j) += gout * invn * d;
      }
    }
  };
  return v;
}

Value Graph::masked_relational_kl(Value scores,
                                  const std::vector<std::vector<std::size_t>>& support,
                                  const std::vector<std::vector<double>>& log_q) {
  const Matrix& sm = scores.matrix();
  if (support.size() != sm.rows() || log_q.size() != sm.rows()) {
    throw DimensionError("masked_relational_kl: support/log_q rows do not match scores " +
                         sm.shape_str());
  }
  std::size_t anchors = 0;
  for (const auto& s : support)
    if (!s.empty()) ++anchors;
  if (anchors == 0) {
    throw DegenerateInputError("masked_relational_kl: no anchor has an eligible pair");
  }

  // per-anchor softmax over the support, then KL against the target
  std::vector<std::vector<double>> p(sm.rows());
  std::vector<double> kl(sm.rows(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < sm.rows(); ++i) {
    const auto& sup = support[i];
    if (sup.empty()) continue;
    if (log_q[i].size() != sup.size()) {
      throw DimensionError("masked_relational_kl: log_q[" + std::to_string(i) +
                           "] does not match support size");
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j : sup) mx = std::max(mx, sm(i, j));
    double z = 0.0;
    p[i].resize(sup.size());
    for (std::size_t k = 0; k < sup.size(); ++k) {
      p[i][k] = std::exp(sm(i, sup[k]) - mx);
      z += p[i][k];
    }
    double lz = std::log(z);
    double kli = 0.0;
    for (std::size_t k = 0; k < sup.size(); ++k) {
      p[i][k] /= z;
      const double logp = sm(i, sup[k]) - mx - lz;
      kli += p[i][k] * (logp - log_q[i][k]);
    }
    kl[i] = kli;
    total += kli;
  }
  const double invn = 1.0 / static_cast<double>(anchors);
  const int is = scores.id;
  Value v = make(Matrix{{total * invn}});
  const int self = v.id;
  nodes_[self].backward = [is, support, p = std::move(p), kl = std::move(kl), log_q, invn,
                           self](Graph& g) {
    const double gout = g.nodes_[self].grad(0, 0);
    Matrix& gs = g.grad_mut(is);
    for (std::size_t i = 0; i < support.size(); ++i) {
      const auto& sup = support[i];
      for (std::size_t k = 0; k < sup.size(); ++k) {
        const double logp = std::log(p[i][k]);
        gs(i, sup[k]) += gout * invn * p[i][k] * (logp - log_q[i][k] - kl[i]);
      }
    }
  };
  return v;
}

void Graph::backward(Value loss) {
  const Matrix& lm = loss.matrix();
  if (lm.rows() != 1 || lm.cols() != 1) {
    throw DimensionError("backward: loss must be 1x1, got " + lm.shape_str());
  }
  for (auto& n : nodes_) n.grad.fill(0.0);
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(*this);
  }
  for (auto& n : nodes_) {
    if (n.bound) {
      Matrix& pg = n.bound->grad;
      for (std::size_t i = 0; i < pg.size(); ++i) pg.at(i) += n.grad.at(i);
      n.bound->grad_ready = true;
    }
  }
}

}  // namespace pading
