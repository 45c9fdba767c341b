#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pading/pipeline.hpp"

namespace pading {

inline constexpr const char kReportSchema[] = "pading-run-report-1";

// Everything a run produces. The deterministic part (config, results,
// curves, artifact paths) round-trips bit-exactly; wall-clock timings are
// serialized alongside it but excluded from the deterministic form.
struct RunReport {
  std::string schema = kReportSchema;
  std::map<std::string, std::string> config;  // resolved key=value table
  std::string ablation;
  std::uint64_t seed = 0;
  GzslReport gzsl;
  double pretrain_seen_mean = 0.0;
  std::vector<double> pretrain_curve;
  std::vector<double> generator_curve;
  std::vector<double> finetune_curve;
  std::vector<std::pair<std::string, std::string>> artifacts;  // name -> relative path
  std::vector<std::pair<std::string, double>> timings_ms;      // stage -> wall time
};

// Full document (deterministic "report" subtree + "timing_ms").
std::string run_report_json(const RunReport& report);
// Only the deterministic subtree; identical runs serialize identically.
std::string deterministic_report_json(const RunReport& report);

RunReport parse_run_report(const std::string& json_text);
void save_run_report(const RunReport& report, const std::string& path);
RunReport load_run_report(const std::string& path);

// Aligned human-readable rendering of a single evaluation.
std::string format_gzsl(const GzslReport& report, bool per_class = false);

// Ablation / sweep tables, both forms.
std::string format_ablation_table(const std::vector<AblationRow>& rows);
std::string ablation_table_json(const std::vector<AblationRow>& rows,
                                const std::vector<std::uint64_t>& seeds,
                                const std::map<std::string, std::string>& config);
std::string format_sweep_table(const std::vector<SweepRow>& rows);
std::string sweep_table_json(const std::vector<SweepRow>& rows,
                             const std::vector<std::uint64_t>& seeds,
                             const std::map<std::string, std::string>& config);

}  // namespace pading
