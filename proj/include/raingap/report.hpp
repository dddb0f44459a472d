#pragma once

#include <json.hpp>

#include "raingap/hurdle.hpp"
#include "raingap/surface.hpp"

namespace raingap {

inline const char* kToolVersion = "raingap 1.0.0";

// Everything that determines a report's bytes. Wall-clock timing is kept out
// of the report (logged separately) so reruns stay byte-identical.
struct RunManifest {
    std::string subcommand;
    std::string tool_version = kToolVersion;
    nlohmann::json resolved_config = nlohmann::json::object();
    std::map<std::string, std::string> input_digests;  // label -> digest
    std::uint64_t seed = 0;
    std::string fold_digest;
};

// FNV-1a digests used for manifests and leak audits.
std::string bytes_digest(const void* data, std::size_t n_bytes);
std::string file_digest(const std::string& path);
std::string fold_plan_digest(const FoldPlan& folds);

nlohmann::json manifest_json(const RunManifest& m);

// Per-metric {mean, sd, per_fold[]} blocks under keys
// acc, prec, recall, f1, weighted_f1, r2, rmse. Fold-level r2 may be null.
nlohmann::json metrics_json(const std::vector<MetricReport>& per_fold,
                            const FoldSummary& summary);

nlohmann::json hurdle_report(const HurdleRun& run, const RunManifest& m);
nlohmann::json regional_report(const RegionalRun& run, const RunManifest& m);
nlohmann::json baseline_report(const BaselineResult& result, const FoldPlan& folds,
                               const RunManifest& m);

void write_report(const nlohmann::json& report, const std::string& path);
nlohmann::json load_report(const std::string& path);

// Per-metric deltas (a minus b), per fold and averaged. Refuses reports whose
// fold-plan digests differ.
nlohmann::json compare_reports(const nlohmann::json& a, const nlohmann::json& b);
std::string render_compare(const nlohmann::json& comparison);

// Plot-ready long-format CSV of (timestamp, truth, prediction) over the
// inclusive window. `pred_per_row` is indexed by table row; NaN cells are
// written empty. Throws when the window contains no rows.
void export_series_csv(const SeriesTable& table, const std::vector<double>& pred_per_row,
                       std::int64_t window_start, std::int64_t window_end,
                       const std::string& path);

}  // namespace raingap
