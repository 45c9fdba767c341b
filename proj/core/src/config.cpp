#include "pading/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace pading {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      const std::string t = trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string t = trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(trim(value));
  T out;
  if (!(in >> out)) {
    throw ParameterError("config key '" + key + "': cannot parse '" + value + "'");
  }
  std::string rest;
  if (in >> rest) {
    throw ParameterError("config key '" + key + "': trailing junk in '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParameterError("config key '" + key + "': expected true/false, got '" + value +
                       "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

struct KeyAdapter {
  std::string description;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::map<std::string, KeyAdapter>& registry() {
  static const std::map<std::string, KeyAdapter> table = [] {
    std::map<std::string, KeyAdapter> r;
    auto add = [&r](const std::string& key, const std::string& desc, auto set, auto get) {
      r.emplace(key, KeyAdapter{desc, set, get});
    };

    add("seed", "base seed for data and training",
        [](ExperimentConfig& c, const std::string& v) {
          c.seed = parse_number<std::uint64_t>("seed", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); });
    add("run.threads", "worker threads for ablation rows/seeds (0 = hardware)",
        [](ExperimentConfig& c, const std::string& v) {
          c.threads = parse_number<std::size_t>("run.threads", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.threads); });

    add("data.source", "synthetic | files",
        [](ExperimentConfig& c, const std::string& v) {
          const std::string t = trim(v);
          if (t == "synthetic") c.data_source = DataSource::kSynthetic;
          else if (t == "files") c.data_source = DataSource::kFiles;
          else throw ParameterError("config key 'data.source': got '" + v + "'");
        },
        [](const ExperimentConfig& c) {
          return c.data_source == DataSource::kSynthetic ? std::string("synthetic")
                                                         : std::string("files");
        });
    add("data.embeddings", "embedding file path (files mode)",
        [](ExperimentConfig& c, const std::string& v) { c.data_embeddings = trim(v); },
        [](const ExperimentConfig& c) { return c.data_embeddings; });
    add("data.train", "training feature csv (files mode)",
        [](ExperimentConfig& c, const std::string& v) { c.data_train = trim(v); },
        [](const ExperimentConfig& c) { return c.data_train; });
    add("data.test", "test feature csv (files mode)",
        [](ExperimentConfig& c, const std::string& v) { c.data_test = trim(v); },
        [](const ExperimentConfig& c) { return c.data_test; });
    add("data.seen_names", "comma list of seen class names (files mode)",
        [](ExperimentConfig& c, const std::string& v) { c.data_seen_names = split_list(v); },
        [](const ExperimentConfig& c) { return join_list(c.data_seen_names); });
    add("data.unseen_names", "comma list of unseen class names (files mode)",
        [](ExperimentConfig& c, const std::string& v) {
          c.data_unseen_names = split_list(v);
        },
        [](const ExperimentConfig& c) { return join_list(c.data_unseen_names); });

    add("space.seen", "seen class count (synthetic mode)",
        [](ExperimentConfig& c, const std::string& v) {
          c.space_seen = parse_number<std::size_t>("space.seen", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.space_seen); });
    add("space.unseen", "unseen class count (synthetic mode)",
        [](ExperimentConfig& c, const std::string& v) {
          c.space_unseen = parse_number<std::size_t>("space.unseen", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.space_unseen); });
    add("space.d_a", "semantic embedding dim",
        [](ExperimentConfig& c, const std::string& v) {
          c.space_d_a = parse_number<std::size_t>("space.d_a", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.space_d_a); });
    add("space.clusters", "semantic cluster count (synthetic mode)",
        [](ExperimentConfig& c, const std::string& v) {
          c.space_clusters = parse_number<std::size_t>("space.clusters", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.space_clusters); });
    add("space.spread", "within-cluster spread of class embeddings",
        [](ExperimentConfig& c, const std::string& v) {
          c.space_spread = parse_number<double>("space.spread", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.space_spread); });

    add("synth.d_x", "feature dim of the synthetic benchmark",
        [](ExperimentConfig& c, const std::string& v) {
          c.synth_d_x = parse_number<std::size_t>("synth.d_x", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.synth_d_x); });
    add("synth.train_per_class", "training samples per seen class",
        [](ExperimentConfig& c, const std::string& v) {
          c.synth_train_per_class = parse_number<std::size_t>("synth.train_per_class", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.synth_train_per_class); });
    add("synth.test_per_class", "test samples per class",
        [](ExperimentConfig& c, const std::string& v) {
          c.synth_test_per_class = parse_number<std::size_t>("synth.test_per_class", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.synth_test_per_class); });
    add("synth.noise", "per-sample Gaussian noise stddev",
        [](ExperimentConfig& c, const std::string& v) {
          c.synth_noise = parse_number<double>("synth.noise", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.synth_noise); });
    add("synth.nuisance_dim", "width of the semantic-unrelated block",
        [](ExperimentConfig& c, const std::string& v) {
          c.synth_nuisance_dim = parse_number<std::size_t>("synth.nuisance_dim", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.synth_nuisance_dim); });
    add("synth.nuisance_scale", "stddev of per-class nuisance vectors",
        [](ExperimentConfig& c, const std::string& v) {
          c.synth_nuisance_scale = parse_number<double>("synth.nuisance_scale", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.synth_nuisance_scale); });

    add("gen.primitives", "primitive count",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.n_primitives = parse_number<std::size_t>("gen.primitives", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.n_primitives); });
    add("gen.d_k", "primitive/attention channel dim",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.d_k = parse_number<std::size_t>("gen.d_k", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.d_k); });
    add("gen.layers", "cross-attention block count",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.generator_layers = parse_number<std::size_t>("gen.layers", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.generator_layers); });
    add("gen.lr", "Adam learning rate for generator + disentangle modules",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.generator_lr = parse_number<double>("gen.lr", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.train.generator_lr); });
    add("gen.epochs", "generator training epochs",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.generator_epochs = parse_number<std::size_t>("gen.epochs", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.generator_epochs); });
    add("gen.classes_per_step", "seen classes matched per optimization step",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.classes_per_step = parse_number<std::size_t>("gen.classes_per_step", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.classes_per_step); });
    add("gen.mmd_batch", "real/synthetic rows per class per step",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.mmd_batch_per_class = parse_number<std::size_t>("gen.mmd_batch", v);
        },
        [](const ExperimentConfig& c) {
          return std::to_string(c.train.mmd_batch_per_class);
        });
    add("gen.align_unseen_per_class", "synthetic unseen rows per class per step",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.align_unseen_per_class =
              parse_number<std::size_t>("gen.align_unseen_per_class", v);
        },
        [](const ExperimentConfig& c) {
          return std::to_string(c.train.align_unseen_per_class);
        });
    add("gen.gmmn_hidden", "hidden width of the direct MLP baseline",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.gmmn_hidden = parse_number<std::size_t>("gen.gmmn_hidden", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.gmmn_hidden); });

    add("mmd.bandwidths", "comma list of Gaussian kernel bandwidths",
        [](ExperimentConfig& c, const std::string& v) {
          std::vector<double> bw;
          for (const auto& tok : split_list(v)) {
            bw.push_back(parse_number<double>("mmd.bandwidths", tok));
          }
          c.train.mmd.bandwidths = std::move(bw);
        },
        [](const ExperimentConfig& c) {
          std::vector<std::string> toks;
          for (double b : c.train.mmd.bandwidths) toks.push_back(format_double(b));
          return join_list(toks);
        });
    add("mmd.per_class", "class-conditional matching (pooled when false)",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.mmd_per_class = parse_bool("mmd.per_class", v);
        },
        [](const ExperimentConfig& c) {
          return c.train.mmd_per_class ? std::string("true") : std::string("false");
        });

    add("dis.hidden", "encoder/decoder hidden width (0 = 2*d_x)",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.disentangle.hidden = parse_number<std::size_t>("dis.hidden", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.disentangle.hidden); });
    add("dis.d_u", "semantic-unrelated dim (0 = d_a)",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.disentangle.d_u = parse_number<std::size_t>("dis.d_u", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.disentangle.d_u); });
    add("dis.dropout", "encoder/decoder dropout rate",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.disentangle.dropout = parse_number<double>("dis.dropout", v);
        },
        [](const ExperimentConfig& c) {
          return format_double(c.train.disentangle.dropout);
        });

    add("align.intra", "include same-group pairs",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.align.include_intra = parse_bool("align.intra", v);
        },
        [](const ExperimentConfig& c) {
          return c.train.align.include_intra ? std::string("true") : std::string("false");
        });
    add("align.inter", "include cross-group pairs",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.align.include_inter = parse_bool("align.inter", v);
        },
        [](const ExperimentConfig& c) {
          return c.train.align.include_inter ? std::string("true") : std::string("false");
        });

    add("train.lambda", "weight of disentanglement + alignment terms",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.lambda = parse_number<double>("train.lambda", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.train.lambda); });
    add("train.tau", "shared softmax temperature",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.tau = parse_number<double>("train.tau", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.train.tau); });
    add("train.ablation", "projection | gmmn | p_only | p_a | full",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.ablation = parse_ablation(trim(v));
        },
        [](const ExperimentConfig& c) { return ablation_name(c.train.ablation); });
    add("train.synthetic_per_class", "synthetic unseen samples per class for retraining",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.synthetic_per_class =
              parse_number<std::size_t>("train.synthetic_per_class", v);
        },
        [](const ExperimentConfig& c) {
          return std::to_string(c.train.synthetic_per_class);
        });
    add("train.include_synthetic_seen", "also feed synthetic seen rows to retraining",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.include_synthetic_seen_in_retrain =
              parse_bool("train.include_synthetic_seen", v);
        },
        [](const ExperimentConfig& c) {
          return c.train.include_synthetic_seen_in_retrain ? std::string("true")
                                                           : std::string("false");
        });
    add("train.pretrain_epochs", "classifier pretraining epochs",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.pretrain.epochs = parse_number<std::size_t>("train.pretrain_epochs", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.pretrain.epochs); });
    add("train.pretrain_batch", "classifier pretraining batch size",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.pretrain.batch_size =
              parse_number<std::size_t>("train.pretrain_batch", v);
        },
        [](const ExperimentConfig& c) {
          return std::to_string(c.train.pretrain.batch_size);
        });
    add("train.finetune_epochs", "classifier fine-tuning epochs",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.finetune.epochs = parse_number<std::size_t>("train.finetune_epochs", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.train.finetune.epochs); });
    add("train.finetune_batch", "classifier fine-tuning batch size",
        [](ExperimentConfig& c, const std::string& v) {
          c.train.finetune.batch_size =
              parse_number<std::size_t>("train.finetune_batch", v);
        },
        [](const ExperimentConfig& c) {
          return std::to_string(c.train.finetune.batch_size);
        });
    add("train.sgd_lr", "SGD learning rate for the classifier",
        [](ExperimentConfig& c, const std::string& v) {
          const double lr = parse_number<double>("train.sgd_lr", v);
          c.train.pretrain.sgd.learning_rate = lr;
          c.train.finetune.sgd.learning_rate = lr;
        },
        [](const ExperimentConfig& c) {
          return format_double(c.train.pretrain.sgd.learning_rate);
        });
    add("train.sgd_weight_decay", "SGD weight decay for the classifier",
        [](ExperimentConfig& c, const std::string& v) {
          const double wd = parse_number<double>("train.sgd_weight_decay", v);
          c.train.pretrain.sgd.weight_decay = wd;
          c.train.finetune.sgd.weight_decay = wd;
        },
        [](const ExperimentConfig& c) {
          return format_double(c.train.pretrain.sgd.weight_decay);
        });
    add("train.sgd_momentum", "SGD momentum for the classifier",
        [](ExperimentConfig& c, const std::string& v) {
          const double m = parse_number<double>("train.sgd_momentum", v);
          c.train.pretrain.sgd.momentum = m;
          c.train.finetune.sgd.momentum = m;
        },
        [](const ExperimentConfig& c) {
          return format_double(c.train.pretrain.sgd.momentum);
        });

    add("ablate.rows", "comma list of ablation rows",
        [](ExperimentConfig& c, const std::string& v) {
          c.ablate_rows = split_list(v);
          for (const auto& r : c.ablate_rows) parse_ablation(r);
        },
        [](const ExperimentConfig& c) { return join_list(c.ablate_rows); });
    add("ablate.seeds", "comma list of training seeds",
        [](ExperimentConfig& c, const std::string& v) {
          std::vector<std::uint64_t> seeds;
          for (const auto& tok : split_list(v)) {
            seeds.push_back(parse_number<std::uint64_t>("ablate.seeds", tok));
          }
          if (seeds.empty()) throw ParameterError("config key 'ablate.seeds': empty list");
          c.ablate_seeds = std::move(seeds);
        },
        [](const ExperimentConfig& c) {
          std::vector<std::string> toks;
          for (auto s : c.ablate_seeds) toks.push_back(std::to_string(s));
          return join_list(toks);
        });
    add("sweep.primitives", "comma list of primitive counts to sweep",
        [](ExperimentConfig& c, const std::string& v) {
          std::vector<std::size_t> counts;
          for (const auto& tok : split_list(v)) {
            counts.push_back(parse_number<std::size_t>("sweep.primitives", tok));
          }
          c.sweep_primitives = std::move(counts);
        },
        [](const ExperimentConfig& c) {
          std::vector<std::string> toks;
          for (auto n : c.sweep_primitives) toks.push_back(std::to_string(n));
          return join_list(toks);
        });
    return r;
  }();
  return table;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto& reg = registry();
  const auto it = reg.find(key);
  if (it == reg.end()) {
    throw ParameterError("unknown config key '" + key + "'");
  }
  it->second.set(*this, value);
}

std::map<std::string, std::string> ExperimentConfig::to_kv() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, adapter] : registry()) out[key] = adapter.get(*this);
  return out;
}

std::string ExperimentConfig::documented_defaults() {
  const ExperimentConfig d;
  std::ostringstream out;
  for (const auto& [key, adapter] : registry()) {
    out << key << " = " << adapter.get(d) << "  # " << adapter.description << "\n";
  }
  return out.str();
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("ExperimentConfig::save: cannot write '" + path + "'");
  for (const auto& [key, value] : to_kv()) out << key << " = " << value << "\n";
}

namespace {

void apply_line(ExperimentConfig& cfg, const std::string& raw, const std::string& where) {
  std::string line = raw;
  const auto hash = line.find('#');
  if (hash != std::string::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ParameterError(where + ": expected key=value, got '" + trim(raw) + "'");
  }
  cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    apply_line(cfg, line, path + ":" + std::to_string(line_no));
  }
  for (const auto& ov : overrides) apply_line(cfg, ov, "override");
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_overrides(const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  for (const auto& ov : overrides) apply_line(cfg, ov, "override");
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  train.validate();
  if (data_source == DataSource::kFiles) {
    if (data_embeddings.empty() || data_train.empty() || data_test.empty()) {
      throw ParameterError(
          "config: data.source=files requires data.embeddings, data.train, data.test");
    }
    if (data_seen_names.empty() || data_unseen_names.empty()) {
      throw ParameterError(
          "config: data.source=files requires data.seen_names and data.unseen_names");
    }
  } else {
    if (space_seen == 0 || space_unseen == 0) {
      throw ParameterError("config: synthetic benchmark needs seen and unseen classes");
    }
  }
  for (const auto& r : ablate_rows) parse_ablation(r);
}

SyntheticSpec synthetic_spec_of(const ExperimentConfig& cfg) {
  SyntheticSpec spec;
  spec.d_a = cfg.space_d_a;
  spec.d_x = cfg.synth_d_x;
  spec.samples_per_class = cfg.synth_train_per_class;
  spec.test_samples_per_class = cfg.synth_test_per_class;
  spec.related_noise = cfg.synth_noise;
  spec.nuisance_dim = cfg.synth_nuisance_dim;
  spec.nuisance_scale = cfg.synth_nuisance_scale;
  spec.seed = derive_seed(cfg.seed, 0x64617461);
  return spec;
}

BenchmarkInstance make_benchmark(const ExperimentConfig& cfg) {
  if (cfg.data_source == DataSource::kFiles) {
    SemanticSpace space = load_semantic_space(cfg.data_embeddings, cfg.data_seen_names,
                                              cfg.data_unseen_names);
    FeatureDataset train = load_feature_dataset(cfg.data_train, space,
                                                /*generator_training_input=*/true);
    FeatureDataset test = load_feature_dataset(cfg.data_test, space);
    return {std::move(space), std::move(train), std::move(test)};
  }
  Rng space_rng(derive_seed(cfg.seed, 0x737063));
  SemanticSpace space = make_synthetic_space(cfg.space_seen, cfg.space_unseen,
                                             cfg.space_d_a, cfg.space_clusters,
                                             cfg.space_spread, space_rng);
  auto [train, test] = make_synthetic_dataset(space, synthetic_spec_of(cfg));
  return {std::move(space), std::move(train), std::move(test)};
}

}  // namespace pading
