#include "pading/disentangle.hpp"

#include <cmath>

namespace pading {

namespace {
constexpr double kLogvarClamp = 10.0;

Matrix init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  return rng.normal_matrix(fan_in, fan_out, 1.0 / std::sqrt(static_cast<double>(fan_in)));
}

// linear -> LeakyReLU -> dropout -> linear
Value mlp2_graph(Graph& g, Param& w1, Param& b1, Param& w2, Param& b2, Value x,
                 double slope, double dropout, bool train_mode, Rng* rng) {
  Value h = g.add_rowvec(g.matmul(x, g.param(w1)), g.param(b1));
  h = g.leaky_relu(h, slope);
  if (train_mode && dropout > 0.0) {
    if (!rng) throw ParameterError("mlp2: train mode with dropout needs an rng");
    h = g.dropout(h, dropout, *rng);
  }
  return g.add_rowvec(g.matmul(h, g.param(w2)), g.param(b2));
}

}  // namespace

void DisentangleConfig::validate() const {
  if (!(tau > 0.0)) throw ParameterError("DisentangleConfig: tau must be > 0");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ParameterError("DisentangleConfig: dropout must be in [0, 1)");
  }
}

std::vector<Param*> DisentangleModules::params() {
  return {&related.w1, &related.b1, &related.w2,   &related.b2,
          &unrelated.w1, &unrelated.b1, &unrelated.w2, &unrelated.b2,
          &decoder.w1, &decoder.b1, &decoder.w2,   &decoder.b2};
}

std::vector<std::pair<std::string, Param*>> DisentangleModules::named_params() {
  return {{"dis.related.w1", &related.w1},     {"dis.related.b1", &related.b1},
          {"dis.related.w2", &related.w2},     {"dis.related.b2", &related.b2},
          {"dis.unrelated.w1", &unrelated.w1}, {"dis.unrelated.b1", &unrelated.b1},
          {"dis.unrelated.w2", &unrelated.w2}, {"dis.unrelated.b2", &unrelated.b2},
          {"dis.decoder.w1", &decoder.w1},     {"dis.decoder.b1", &decoder.b1},
          {"dis.decoder.w2", &decoder.w2},     {"dis.decoder.b2", &decoder.b2}};
}

DisentangleModules init_disentangle(std::size_t d_x, std::size_t d_a,
                                    const DisentangleConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (d_x == 0 || d_a == 0) throw ParameterError("init_disentangle: dims must be >= 1");
  DisentangleConfig resolved = cfg;
  if (resolved.hidden == 0) resolved.hidden = 2 * d_x;
  if (resolved.d_u == 0) resolved.d_u = d_a;
  const std::size_t h = resolved.hidden;
  const std::size_t d_u = resolved.d_u;

  Rng rng(seed);
  DisentangleModules m{
      RelatedEncoder{Param(init_weight(d_x, h, rng)), Param(Matrix(1, h)),
                     Param(init_weight(h, d_a, rng)), Param(Matrix(1, d_a))},
      UnrelatedEncoder{Param(init_weight(d_x, h, rng)), Param(Matrix(1, h)),
                       Param(init_weight(h, 2 * d_u, rng)), Param(Matrix(1, 2 * d_u)),
                       d_u},
      Decoder{Param(init_weight(d_a + d_u, h, rng)), Param(Matrix(1, h)),
              Param(init_weight(h, d_x, rng)), Param(Matrix(1, d_x))},
      resolved,
      d_x,
      d_a,
  };
  return m;
}

Value encode_related_graph(Graph& g, DisentangleModules& m, Value x, bool train_mode,
                           Rng* rng) {
  if (x.cols() != m.d_x) {
    throw DimensionError("encode_related: input is " + x.matrix().shape_str() +
                         ", encoder expects d_x=" + std::to_string(m.d_x));
  }
  return mlp2_graph(g, m.related.w1, m.related.b1, m.related.w2, m.related.b2, x,
                    m.cfg.leaky_slope, m.cfg.dropout, train_mode, rng);
}

UnrelatedEncoding encode_unrelated_graph(Graph& g, DisentangleModules& m, Value x,
                                         bool train_mode, Rng* rng) {
  if (x.cols() != m.d_x) {
    throw DimensionError("encode_unrelated: input is " + x.matrix().shape_str() +
                         ", encoder expects d_x=" + std::to_string(m.d_x));
  }
  const std::size_t d_u = m.unrelated.d_u;
  Value raw = mlp2_graph(g, m.unrelated.w1, m.unrelated.b1, m.unrelated.w2,
                         m.unrelated.b2, x, m.cfg.leaky_slope, m.cfg.dropout, train_mode,
                         rng);
  Value mu = g.slice_cols(raw, 0, d_u);
  Value logvar = g.clamp(g.slice_cols(raw, d_u, 2 * d_u), -kLogvarClamp, kLogvarClamp);
  Value sample = mu;
  if (train_mode) {
    if (!rng) throw ParameterError("encode_unrelated: train mode needs an rng");
    Value eps = g.input(rng->normal_matrix(x.rows(), d_u));
    Value std_dev = g.exp(g.affine(logvar, 0.5));
    sample = g.add(mu, g.mul(std_dev, eps));
  }
  return {mu, logvar, sample};
}

Value related_loss_graph(Graph& g, Value x_hat, const std::vector<std::size_t>& labels,
                         const SemanticSpace& space, double tau) {
  if (!(tau > 0.0)) throw ParameterError("related_loss: tau must be > 0");
  if (x_hat.cols() != space.dim()) {
    throw DimensionError("related_loss: features are " + x_hat.matrix().shape_str() +
                         ", semantic dim is " + std::to_string(space.dim()));
  }
  for (std::size_t l : labels) {
    if (l >= space.n_classes()) {
      throw LookupError("related_loss: label " + std::to_string(l) + " out of range");
    }
  }
  // logits against all seen+unseen semantic rows
  Value a_t = g.input(transpose(space.embeddings()));
  Value logits = g.affine(g.matmul(x_hat, a_t), 1.0 / tau);
  return g.softmax_cross_entropy_mean(logits, labels);
}

Value unrelated_kl_graph(Graph& g, Value mu, Value logvar) {
  check_same_shape(mu.matrix(), logvar.matrix(), "unrelated_kl");
  if (mu.rows() == 0) throw ParameterError("unrelated_kl: empty batch");
  // 1/2 (mu^2 + exp(logvar) - logvar - 1), summed over dims, mean over batch
  Value terms = g.sub(g.add(g.mul(mu, mu), g.exp(logvar)), g.affine(logvar, 1.0, 1.0));
  return g.affine(g.sum_all(terms), 0.5 / static_cast<double>(mu.rows()));
}

Value reconstruct_loss_graph(Graph& g, DisentangleModules& m, Value x, Value x_hat,
                             Value x_unrelated, bool train_mode, Rng* rng) {
  if (x.rows() != x_hat.rows() || x.rows() != x_unrelated.rows()) {
    throw DimensionError("reconstruct_loss: batch sizes disagree");
  }
  Value joint = g.concat_cols(x_hat, x_unrelated);
  Value recon = mlp2_graph(g, m.decoder.w1, m.decoder.b1, m.decoder.w2, m.decoder.b2,
                           joint, m.cfg.leaky_slope, m.cfg.dropout, train_mode, rng);
  if (recon.cols() != x.cols()) {
    throw DimensionError("reconstruct_loss: decoder emits " +
                         recon.matrix().shape_str() + ", target is " +
                         x.matrix().shape_str());
  }
  return g.mean_all(g.abs(g.sub(x, recon)));
}

Matrix encode_related(DisentangleModules& m, const Matrix& x, bool train_mode, Rng* rng) {
  Graph g;
  return encode_related_graph(g, m, g.input(x), train_mode, rng).matrix();
}

UnrelatedResult encode_unrelated(DisentangleModules& m, const Matrix& x, bool train_mode,
                                 Rng* rng) {
  Graph g;
  auto enc = encode_unrelated_graph(g, m, g.input(x), train_mode, rng);
  return {enc.mu.matrix(), enc.logvar.matrix(), enc.sample.matrix()};
}

double related_loss(const Matrix& x_hat, const std::vector<std::size_t>& labels,
                    const SemanticSpace& space, double tau) {
  Graph g;
  return related_loss_graph(g, g.input(x_hat), labels, space, tau).scalar();
}

double unrelated_kl(const Matrix& mu, const Matrix& logvar) {
  Graph g;
  return unrelated_kl_graph(g, g.input(mu), g.input(logvar)).scalar();
}

double reconstruct_loss(DisentangleModules& m, const Matrix& x, const Matrix& x_hat,
                        const Matrix& x_unrelated, bool train_mode, Rng* rng) {
  Graph g;
  return reconstruct_loss_graph(g, m, g.input(x), g.input(x_hat), g.input(x_unrelated),
                                train_mode, rng)
      .scalar();
}

double disentangle_loss(DisentangleModules& m, const Matrix& x,
                        const std::vector<std::size_t>& labels,
                        const SemanticSpace& space) {
  Graph g;
  Value xv = g.input(x);
  Value x_hat = encode_related_graph(g, m, xv, false, nullptr);
  auto unr = encode_unrelated_graph(g, m, xv, false, nullptr);
  Value l_r = related_loss_graph(g, x_hat, labels, space, m.cfg.tau);
  Value l_u = unrelated_kl_graph(g, unr.mu, unr.logvar);
  Value l_rec = reconstruct_loss_graph(g, m, xv, x_hat, unr.sample, false, nullptr);
  return g.add(g.add(l_r, l_u), l_rec).scalar();
}

}  // namespace pading
