#pragma once

// Component ablation: the full model and one variant per removed component,
// all trained from the same seed. Deltas are reported in percentage points
// relative to the full model, whose row reads "/".

#include <cstddef>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/tasks/train.hpp"

namespace ecue::tasks {

struct AblationRow {
  std::string name;
  TrainConfig config;
  std::size_t parameters = 0;
  Metrics metrics;
  double final_loss = 0.0;
  bool baseline = false;
};

struct AblationTable {
  std::vector<AblationRow> rows;  // full first
};

inline std::vector<std::pair<std::string, TrainConfig>> ablation_variants(const TrainConfig& base) {
  TrainConfig full = base;
  full.no_kwrt = full.no_pe = full.no_tmf = false;
  auto no_kwrt = full, no_pe = full, no_tmf = full;
  no_kwrt.no_kwrt = true;
  no_pe.no_pe = true;
  no_tmf.no_tmf = true;
  return {{"Ours", full}, {"w/o KWRT", no_kwrt}, {"w/o PE", no_pe}, {"w/o TMF", no_tmf}};
}

using AblationProgress = std::function<void(const std::string& variant, const EpochRecord&)>;

// Trains on `train` and scores on `eval` for each variant.
inline AblationTable run_ablation(const Dataset& train, const Dataset& eval,
                                  const Vocabulary& vocab, const TrainConfig& cfg,
                                  const AblationProgress& progress = {}) {
  if (cfg.modality != Modality::TextSpeech)
    throw ValidationError("ablation needs the T+S modality");
  AblationTable table;
  for (const auto& [name, vcfg] : ablation_variants(cfg)) {
    const auto& variant = name;
    auto result = train_model(train, vocab, vcfg, [&](const EpochRecord& r) {
      if (progress) progress(variant, r);
    });
    AblationRow row;
    row.name = name;
    row.config = vcfg;
    row.parameters = result.model.parameter_count();
    row.metrics = evaluate_model(result.model, eval.instances).metrics;
    row.final_loss = result.trace.empty() ? 0.0 : result.trace.back().mean_loss;
    row.baseline = table.rows.empty();
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string format_delta(double delta_points) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", delta_points);
  return buf;
}

// Plain-text table: variant | UAR delta | M-F1 delta | parameters.
inline std::string format_ablation(const AblationTable& t) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s | %8s | %8s | %10s\n", "", "UAR", "M-F1", "params");
  out << line;
  out << std::string(46, '-') << '\n';
  const auto& full = t.rows.front().metrics;
  for (const auto& r : t.rows) {
    const std::string uar = r.baseline ? "/" : format_delta(100.0 * (r.metrics.uar - full.uar));
    const std::string mf1 =
        r.baseline ? "/" : format_delta(100.0 * (r.metrics.macro_f1 - full.macro_f1));
    std::snprintf(line, sizeof line, "%-10s | %8s | %8s | %10zu\n", r.name.c_str(), uar.c_str(),
                  mf1.c_str(), r.parameters);
    out << line;
  }
  return out.str();
}

inline nlohmann::json ablation_json(const AblationTable& t) {
  auto rows = nlohmann::json::array();
  const auto& full = t.rows.front().metrics;
  for (const auto& r : t.rows) {
    nlohmann::json j = {{"variant", r.name},
                        {"parameters", r.parameters},
                        {"final_loss", r.final_loss},
                        {"uar", r.metrics.uar},
                        {"macro_f1", r.metrics.macro_f1},
                        {"accuracy", r.metrics.accuracy},
                        {"weighted_f1", r.metrics.weighted_f1}};
    if (r.baseline) {
      j["delta_uar"] = "/";
      j["delta_macro_f1"] = "/";
    } else {
      j["delta_uar"] = 100.0 * (r.metrics.uar - full.uar);
      j["delta_macro_f1"] = 100.0 * (r.metrics.macro_f1 - full.macro_f1);
    }
    rows.push_back(std::move(j));
  }
  return {{"rows", rows}};
}

}  // namespace ecue::tasks
