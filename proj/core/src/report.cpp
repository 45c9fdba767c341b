#include "pading/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace pading {

namespace {

using nlohmann::json;

json gzsl_to_json(const GzslReport& r) {
  json j;
  j["class_names"] = r.class_names;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["counts"] = r.counts;
  j["seen_mean"] = r.seen_mean;
  j["unseen_mean"] = r.unseen_mean;
  j["hm"] = r.hm;
  j["warnings"] = r.warnings;
  return j;
}

GzslReport gzsl_from_json(const json& j) {
  GzslReport r;
  r.class_names = j.at("class_names").get<std::vector<std::string>>();
  r.per_class_accuracy = j.at("per_class_accuracy").get<std::vector<double>>();
  r.counts = j.at("counts").get<std::vector<std::size_t>>();
  r.seen_mean = j.at("seen_mean").get<double>();
  r.unseen_mean = j.at("unseen_mean").get<double>();
  r.hm = j.at("hm").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

json deterministic_subtree(const RunReport& r) {
  json j;
  j["schema"] = r.schema;
  j["config"] = r.config;
  j["ablation"] = r.ablation;
  j["seed"] = r.seed;
  j["gzsl"] = gzsl_to_json(r.gzsl);
  j["pretrain_seen_mean"] = r.pretrain_seen_mean;
  j["curves"]["pretrain"] = r.pretrain_curve;
  j["curves"]["generator"] = r.generator_curve;
  j["curves"]["finetune"] = r.finetune_curve;
  json arts = json::object();
  for (const auto& [name, path] : r.artifacts) arts[name] = path;
  j["artifacts"] = arts;
  return j;
}

}  // namespace

std::string run_report_json(const RunReport& report) {
  json j;
  j["report"] = deterministic_subtree(report);
  json timings = json::object();
  for (const auto& [stage, ms] : report.timings_ms) timings[stage] = ms;
  j["timing_ms"] = timings;
  return j.dump(2) + "\n";
}

std::string deterministic_report_json(const RunReport& report) {
  return deterministic_subtree(report).dump(2) + "\n";
}

RunReport parse_run_report(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("run report: invalid json: ") + e.what());
  }
  const json& r = j.at("report");
  RunReport out;
  out.schema = r.at("schema").get<std::string>();
  if (out.schema != kReportSchema) {
    throw ParseError("run report: unsupported schema '" + out.schema + "'");
  }
  out.config = r.at("config").get<std::map<std::string, std::string>>();
  out.ablation = r.at("ablation").get<std::string>();
  out.seed = r.at("seed").get<std::uint64_t>();
  out.gzsl = gzsl_from_json(r.at("gzsl"));
  out.pretrain_seen_mean = r.at("pretrain_seen_mean").get<double>();
  out.pretrain_curve = r.at("curves").at("pretrain").get<std::vector<double>>();
  out.generator_curve = r.at("curves").at("generator").get<std::vector<double>>();
  out.finetune_curve = r.at("curves").at("finetune").get<std::vector<double>>();
  for (const auto& [name, path] : r.at("artifacts").items()) {
    out.artifacts.emplace_back(name, path.get<std::string>());
  }
  if (j.contains("timing_ms")) {
    for (const auto& [stage, ms] : j.at("timing_ms").items()) {
      out.timings_ms.emplace_back(stage, ms.get<double>());
    }
  }
  return out;
}

void save_run_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_run_report: cannot write '" + path + "'");
  out << run_report_json(report);
  if (!out) throw IoError("save_run_report: write failed for '" + path + "'");
}

RunReport load_run_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_run_report: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_report(buf.str());
}

std::string format_gzsl(const GzslReport& report, bool per_class) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "seen_mean=" << report.seen_mean << "  unseen_mean=" << report.unseen_mean
      << "  hm=" << report.hm << "\n";
  if (per_class) {
    for (std::size_t c = 0; c < report.class_names.size(); ++c) {
      out << "  " << std::setw(16) << std::left << report.class_names[c] << " acc="
          << report.per_class_accuracy[c] << "  n=" << report.counts[c] << "\n";
    }
  }
  for (const auto& w : report.warnings) out << "  warning: " << w << "\n";
  return out.str();
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::setw(12) << std::left << "ablation" << std::setw(10) << "seen"
      << std::setw(10) << "unseen" << std::setw(10) << "hm"
      << "seeds\n";
  for (const auto& row : rows) {
    out << std::setw(12) << std::left << ablation_name(row.ablation) << std::setw(10)
        << row.mean_seen << std::setw(10) << row.mean_unseen << std::setw(10)
        << row.mean_hm << row.per_seed.size() << "\n";
  }
  return out.str();
}

std::string ablation_table_json(const std::vector<AblationRow>& rows,
                                const std::vector<std::uint64_t>& seeds,
                                const std::map<std::string, std::string>& config) {
  json j;
  j["schema"] = "pading-ablation-table-1";
  j["config"] = config;
  j["seeds"] = seeds;
  j["rows"] = json::array();
  for (const auto& row : rows) {
    json r;
    r["ablation"] = ablation_name(row.ablation);
    r["mean_seen"] = row.mean_seen;
    r["mean_unseen"] = row.mean_unseen;
    r["mean_hm"] = row.mean_hm;
    r["per_seed"] = json::array();
    for (const auto& rep : row.per_seed) r["per_seed"].push_back(gzsl_to_json(rep));
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::setw(12) << std::left << "primitives" << std::setw(10) << "unseen"
      << std::setw(10) << "hm"
      << "seeds\n";
  for (const auto& row : rows) {
    out << std::setw(12) << std::left << row.n_primitives << std::setw(10)
        << row.mean_unseen << std::setw(10) << row.mean_hm << row.per_seed.size() << "\n";
  }
  return out.str();
}

std::string sweep_table_json(const std::vector<SweepRow>& rows,
                             const std::vector<std::uint64_t>& seeds,
                             const std::map<std::string, std::string>& config) {
  json j;
  j["schema"] = "pading-sweep-table-1";
  j["config"] = config;
  j["seeds"] = seeds;
  j["rows"] = json::array();
  for (const auto& row : rows) {
    json r;
    r["n_primitives"] = row.n_primitives;
    r["mean_unseen"] = row.mean_unseen;
    r["mean_hm"] = row.mean_hm;
    r["per_seed"] = json::array();
    for (const auto& rep : row.per_seed) r["per_seed"].push_back(gzsl_to_json(rep));
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

}  // namespace pading
