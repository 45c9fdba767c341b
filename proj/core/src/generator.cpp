#include "pading/generator.hpp"

#include <cmath>

namespace pading {

void MmdConfig::validate() const {
  if (bandwidths.empty()) throw ParameterError("MmdConfig: bandwidth list is empty");
  for (double s : bandwidths) {
    if (!(s > 0.0)) {
      throw ParameterError("MmdConfig: bandwidth must be > 0, got " + std::to_string(s));
    }
  }
}

std::vector<Param*> GeneratorModel::params() {
  std::vector<Param*> out = {&bank.p, &sa_wq, &sa_wk, &sa_wv};
  for (auto& b : blocks) {
    out.push_back(&b.wq);
    out.push_back(&b.wk);
    out.push_back(&b.wv);
    out.push_back(&b.w1);
  }
  return out;
}

std::vector<std::pair<std::string, Param*>> GeneratorModel::named_params() {
  std::vector<std::pair<std::string, Param*>> out = {
      {"gen.bank", &bank.p},
      {"gen.self.wq", &sa_wq},
      {"gen.self.wk", &sa_wk},
      {"gen.self.wv", &sa_wv},
  };
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string prefix = "gen.block" + std::to_string(i) + ".";
    out.emplace_back(prefix + "wq", &blocks[i].wq);
    out.emplace_back(prefix + "wk", &blocks[i].wk);
    out.emplace_back(prefix + "wv", &blocks[i].wv);
    out.emplace_back(prefix + "w1", &blocks[i].w1);
  }
  return out;
}

namespace {

Matrix init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  return rng.normal_matrix(fan_in, fan_out, 1.0 / std::sqrt(static_cast<double>(fan_in)));
}

}  // namespace

GeneratorModel init_generator(std::size_t d_a, std::size_t d_k, std::size_t d_x,
                              std::size_t n_primitives, std::size_t layer_count,
                              std::uint64_t seed) {
  if (d_a == 0 || d_k == 0 || d_x == 0) {
    throw ParameterError("init_generator: dims must be >= 1");
  }
  if (n_primitives == 0) {
    throw ParameterError("init_generator: n_primitives must be >= 1");
  }
  if (layer_count == 0) {
    throw ParameterError("init_generator: layer_count must be >= 1");
  }
  Rng rng(seed);
  GeneratorModel m{
      d_a,
      d_k,
      d_x,
      PrimitiveBank(init_weight(n_primitives, d_k, rng)),
      Param(init_weight(d_k, d_k, rng)),
      Param(init_weight(d_k, d_k, rng)),
      Param(init_weight(d_k, d_k, rng)),
      {},
  };
  m.blocks.reserve(layer_count);
  for (std::size_t l = 0; l < layer_count; ++l) {
    const std::size_t d_in = (l == 0) ? d_a : d_k;
    const std::size_t d_out = (l + 1 == layer_count) ? d_x : d_k;
    m.blocks.push_back(CrossAttentionBlock{
        Param(init_weight(d_in, d_k, rng)),
        Param(init_weight(d_k, d_k, rng)),
        Param(init_weight(d_k, d_k, rng)),
        Param(init_weight(d_k, d_out, rng)),
    });
  }
  return m;
}

Value refined_bank_graph(Graph& g, GeneratorModel& model, Value* attention) {
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(model.d_k));
  Value p = g.param(model.bank.p);
  Value q = g.matmul(p, g.param(model.sa_wq));
  Value k = g.matmul(p, g.param(model.sa_wk));
  Value v = g.matmul(p, g.param(model.sa_wv));
  Value attn = g.softmax_rows(g.affine(g.matmul(q, g.transpose(k)), inv_sqrt_dk));
  if (attention) *attention = attn;
  return g.add(g.matmul(attn, v), p);
}

Value generate_graph(Graph& g, GeneratorModel& model, Value semantic_batch, Value noise) {
  if (semantic_batch.cols() != model.d_a) {
    throw DimensionError("generate: semantic batch is " +
                         semantic_batch.matrix().shape_str() + ", model expects d_a=" +
                         std::to_string(model.d_a));
  }
  if (noise.rows() != semantic_batch.rows() || noise.cols() != model.noise_dim()) {
    throw DimensionError("generate: noise is " + noise.matrix().shape_str() +
                         ", want " + std::to_string(semantic_batch.rows()) + "x" +
                         std::to_string(model.noise_dim()));
  }
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(model.d_k));
  Value bank = refined_bank_graph(g, model);
  Value cur = semantic_batch;
  for (auto& block : model.blocks) {
    Value q = g.matmul(cur, g.param(block.wq));
    Value k = g.matmul(bank, g.param(block.wk));
    Value v = g.matmul(bank, g.param(block.wv));
    Value attn = g.softmax_rows(g.affine(g.matmul(q, g.transpose(k)), inv_sqrt_dk));
    Value h = g.add(g.add(g.matmul(attn, v), q), noise);
    cur = g.matmul(h, g.param(block.w1));
  }
  return cur;
}

Matrix primitive_self_attention(GeneratorModel& model, Matrix* attention_out) {
  Graph g;
  Value attn;
  Value out = refined_bank_graph(g, model, &attn);
  if (attention_out) *attention_out = attn.matrix();
  return out.matrix();
}

Matrix sample_noise(std::size_t rows, std::size_t noise_dim, Rng& rng) {
  return rng.normal_matrix(rows, noise_dim);
}

Matrix generate(GeneratorModel& model, const Matrix& semantic_batch, const Matrix& noise) {
  Graph g;
  return generate_graph(g, model, g.input(semantic_batch), g.input(noise)).matrix();
}

double gaussian_kernel(std::span<const double> f, std::span<const double> f_prime,
                       double sigma) {
  if (f.size() != f_prime.size()) {
    throw DimensionError("gaussian_kernel: dims differ, " + std::to_string(f.size()) +
                         " vs " + std::to_string(f_prime.size()));
  }
  if (!(sigma > 0.0)) {
    throw ParameterError("gaussian_kernel: sigma must be > 0, got " +
                         std::to_string(sigma));
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - f_prime[i];
    sq += d * d;
  }
  return std::exp(-sq / (2.0 * sigma * sigma));
}

Value mmd_loss_graph(Graph& g, Value x_real, Value x_syn, const MmdConfig& cfg) {
  cfg.validate();
  const std::size_t n = x_real.rows();
  const std::size_t m = x_syn.rows();
  if (n == 0 || m == 0) {
    throw ParameterError("mmd_loss: both sample sets must be non-empty");
  }
  if (x_real.cols() != x_syn.cols()) {
    throw DimensionError("mmd_loss: width mismatch " + x_real.matrix().shape_str() +
                         " vs " + x_syn.matrix().shape_str());
  }
  Value d_rr = g.pairwise_sqdist(x_real, x_real);
  Value d_ss = g.pairwise_sqdist(x_syn, x_syn);
  Value d_rs = g.pairwise_sqdist(x_real, x_syn);
  const double inv_nn = 1.0 / static_cast<double>(n * n);
  const double inv_mm = 1.0 / static_cast<double>(m * m);
  const double inv_nm = 1.0 / static_cast<double>(n * m);

  Value total;
  bool first = true;
  for (double sigma : cfg.bandwidths) {
    const double c = -1.0 / (2.0 * sigma * sigma);
    Value t_rr = g.affine(g.sum_all(g.exp(g.affine(d_rr, c))), inv_nn);
    Value t_ss = g.affine(g.sum_all(g.exp(g.affine(d_ss, c))), inv_mm);
    Value t_rs = g.affine(g.sum_all(g.exp(g.affine(d_rs, c))), 2.0 * inv_nm);
    Value term = g.sub(g.add(t_rr, t_ss), t_rs);
    total = first ? term : g.add(total, term);
    first = false;
  }
  return total;
}

double mmd_loss(const Matrix& x_real, const Matrix& x_syn, const MmdConfig& cfg) {
  Graph g;
  return mmd_loss_graph(g, g.input(x_real), g.input(x_syn), cfg).scalar();
}

}  // namespace pading
