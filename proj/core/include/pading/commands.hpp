#pragma once

#include <ostream>
#include <string>

#include "pading/config.hpp"
#include "pading/report.hpp"
#include "pading/verify.hpp"

namespace pading {

// Command implementations shared by the CLI binary and the test suites.
// Each throws on error; the CLI maps exception types to exit codes
// (input errors -> 2, divergence -> 3).

// Writes embeddings.txt, train.csv and test.csv for the configured
// synthetic benchmark into out_dir.
void cmd_synth_data(const ExperimentConfig& cfg, const std::string& out_dir,
                    std::ostream& log);

// Runs the full training algorithm and writes run_report.json, config.txt
// and (for generative rows) checkpoint.bin into out_dir.
RunReport cmd_run(const ExperimentConfig& cfg, const std::string& out_dir,
                  std::ostream& log);

// Runs the ablation ladder (and the primitive sweep when configured),
// writing ablation.json / sweep.json plus aligned text tables.
struct AblateOutput {
  std::vector<AblationRow> rows;
  std::vector<SweepRow> sweep;
};
AblateOutput cmd_ablate(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log);

// Runs the verification battery; returns it so callers can set exit codes.
VerifyReport cmd_verify(std::uint64_t seed, std::ostream& log);

// Loads a checkpoint, synthesizes features for every unseen class and
// writes them (optionally together with the real test features) as a
// feature csv for external visualization.
void cmd_export(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                const std::string& out_csv, std::size_t per_class, bool include_real,
                std::ostream& log);

}  // namespace pading
