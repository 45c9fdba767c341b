#include "pading/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "pading/checkpoint.hpp"

namespace pading {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::pair<std::string, Param*>> checkpoint_entries(
    SynthModel& model, std::optional<DisentangleModules>& dis) {
  auto named = model.named_params();
  if (dis) {
    for (auto& [name, param] : dis->named_params()) named.emplace_back(name, param);
  }
  return named;
}

}  // namespace

void cmd_synth_data(const ExperimentConfig& cfg, const std::string& out_dir,
                    std::ostream& log) {
  if (cfg.data_source != DataSource::kSynthetic) {
    throw ParameterError("synth-data requires data.source=synthetic");
  }
  synthetic_spec_of(cfg).validate();
  ensure_dir(out_dir);
  const BenchmarkInstance bench = make_benchmark(cfg);

  const std::string emb = join(out_dir, "embeddings.txt");
  const std::string train = join(out_dir, "train.csv");
  const std::string test = join(out_dir, "test.csv");
  save_semantic_space(bench.space, emb);
  export_features(bench.train, bench.space, train);
  export_features(bench.test, bench.space, test);

  log << "wrote " << emb << " (" << bench.space.n_classes() << " classes, dim "
      << bench.space.dim() << ")\n";
  log << "wrote " << train << " (" << bench.train.size() << " rows)\n";
  log << "wrote " << test << " (" << bench.test.size() << " rows)\n";
}

RunReport cmd_run(const ExperimentConfig& cfg, const std::string& out_dir,
                  std::ostream& log) {
  cfg.validate();
  ensure_dir(out_dir);

  RunReport report;
  report.config = cfg.to_kv();
  report.ablation = ablation_name(cfg.train.ablation);
  report.seed = cfg.seed;

  const auto data_start = std::chrono::steady_clock::now();
  const BenchmarkInstance bench = make_benchmark(cfg);
  report.timings_ms.emplace_back(
      "data", std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - data_start)
                  .count());

  RunResult result = run_experiment(bench.space, bench.train, bench.test, cfg.train,
                                    cfg.seed, &report.timings_ms);
  report.gzsl = result.report;
  report.pretrain_seen_mean = result.pretrain_seen_mean;
  report.pretrain_curve = std::move(result.pretrain_curve);
  report.generator_curve = std::move(result.generator_curve);
  report.finetune_curve = std::move(result.finetune_curve);

  cfg.save(join(out_dir, "config.txt"));
  report.artifacts.emplace_back("config", "config.txt");
  if (result.model) {
    auto entries = checkpoint_entries(*result.model, result.disentangle);
    save_checkpoint(entries, join(out_dir, "checkpoint.bin"));
    report.artifacts.emplace_back("checkpoint", "checkpoint.bin");
  }
  report.artifacts.emplace_back("report", "run_report.json");
  save_run_report(report, join(out_dir, "run_report.json"));

  log << "ablation " << report.ablation << ", seed " << report.seed << "\n";
  log << format_gzsl(report.gzsl);
  for (const auto& [stage, ms] : report.timings_ms) {
    log << "  " << stage << ": " << ms << " ms\n";
  }
  log << "report written to " << join(out_dir, "run_report.json") << "\n";
  return report;
}

AblateOutput cmd_ablate(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
  cfg.validate();
  ensure_dir(out_dir);
  if (cfg.ablate_seeds.size() < 5) {
    log << "warning: ordering assertions need >= 5 seeds, got "
        << cfg.ablate_seeds.size() << "\n";
  }
  const BenchmarkInstance bench = make_benchmark(cfg);
  const std::size_t threads =
      cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;

  std::vector<Ablation> rows;
  for (const auto& name : cfg.ablate_rows) rows.push_back(parse_ablation(name));

  AblateOutput out;
  out.rows = run_ablation(bench.space, bench.train, bench.test, cfg.train, rows,
                          cfg.ablate_seeds, threads);
  const std::string table = format_ablation_table(out.rows);
  log << table;
  write_text(join(out_dir, "ablation.txt"), table);
  write_text(join(out_dir, "ablation.json"),
             ablation_table_json(out.rows, cfg.ablate_seeds, cfg.to_kv()));
  log << "ablation table written to " << join(out_dir, "ablation.json") << "\n";

  if (!cfg.sweep_primitives.empty()) {
    out.sweep = run_primitive_sweep(bench.space, bench.train, bench.test, cfg.train,
                                    cfg.sweep_primitives, cfg.ablate_seeds, threads);
    const std::string sweep_table = format_sweep_table(out.sweep);
    log << sweep_table;
    write_text(join(out_dir, "sweep.txt"), sweep_table);
    write_text(join(out_dir, "sweep.json"),
               sweep_table_json(out.sweep, cfg.ablate_seeds, cfg.to_kv()));
    log << "sweep table written to " << join(out_dir, "sweep.json") << "\n";
  }
  return out;
}

VerifyReport cmd_verify(std::uint64_t seed, std::ostream& log) {
  const VerifyReport report = run_verification_battery(seed);
  log << format_verify_report(report);
  return report;
}

void cmd_export(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                const std::string& out_csv, std::size_t per_class, bool include_real,
                std::ostream& log) {
  cfg.validate();
  if (per_class == 0) throw ParameterError("export: per_class must be >= 1");
  const BenchmarkInstance bench = make_benchmark(cfg);

  SynthModel model{
      cfg.train.ablation == Ablation::kGmmn
          ? std::variant<GeneratorModel, GmmnModel>(
                init_gmmn(bench.space.dim(), cfg.train.d_k, bench.train.dim(),
                          cfg.train.gmmn_hidden, 0))
          : std::variant<GeneratorModel, GmmnModel>(
                init_generator(bench.space.dim(), cfg.train.d_k, bench.train.dim(),
                               cfg.train.n_primitives, cfg.train.generator_layers, 0))};
  load_checkpoint_into(model.named_params(), checkpoint_path);

  FeatureDataset out = synthesize_unseen(model, bench.space, per_class,
                                         derive_seed(cfg.seed, 0x657870));
  if (include_real) out.append_all(bench.test);
  export_features(out, bench.space, out_csv);
  log << "wrote " << out_csv << " (" << out.size() << " rows, "
      << (include_real ? "synthetic+real" : "synthetic only") << ")\n";
}

}  // namespace pading
