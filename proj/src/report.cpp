#include "raingap/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "raingap/csvio.hpp"

namespace raingap {

using nlohmann::json;

std::string bytes_digest(const void* data, std::size_t n_bytes) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n_bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("file_digest: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    return bytes_digest(bytes.data(), bytes.size());
}

std::string fold_plan_digest(const FoldPlan& folds) {
    std::string bytes;
    bytes.append(reinterpret_cast<const char*>(&folds.n_folds), sizeof(folds.n_folds));
    bytes.append(reinterpret_cast<const char*>(&folds.seed), sizeof(folds.seed));
    bytes.append(reinterpret_cast<const char*>(folds.assignment.data()),
                 folds.assignment.size() * sizeof(int));
    return bytes_digest(bytes.data(), bytes.size());
}

json manifest_json(const RunManifest& m) {
    json out;
    out["subcommand"] = m.subcommand;
    out["tool_version"] = m.tool_version;
    out["resolved_config"] = m.resolved_config;
    out["input_digests"] = m.input_digests;
    out["seed"] = m.seed;
    out["fold_digest"] = m.fold_digest;
    return out;
}

namespace {

json mean_sd_json(const MeanSd& ms) { return {{"mean", ms.mean}, {"sd", ms.sd}}; }

json metric_block(const MeanSd& ms, const std::vector<double>& per_fold) {
    json out = mean_sd_json(ms);
    out["per_fold"] = per_fold;
    return out;
}

}  // namespace

json metrics_json(const std::vector<MetricReport>& per_fold, const FoldSummary& summary) {
    auto collect = [&](auto extract) {
        std::vector<double> v;
        for (const MetricReport& r : per_fold) v.push_back(extract(r));
        return v;
    };
    json out;
    out["acc"] = metric_block(summary.accuracy_pct,
                              collect([](const MetricReport& r) { return r.accuracy_pct; }));
    out["prec"] = metric_block(summary.precision,
                               collect([](const MetricReport& r) { return r.precision; }));
    out["recall"] = metric_block(summary.recall,
                                 collect([](const MetricReport& r) { return r.recall; }));
    out["f1"] =
        metric_block(summary.f1, collect([](const MetricReport& r) { return r.f1; }));
    out["weighted_f1"] = metric_block(
        summary.weighted_f1, collect([](const MetricReport& r) { return r.weighted_f1; }));

    json r2 = mean_sd_json(summary.r2);
    if (summary.r2_missing_folds == per_fold.size()) {
        r2["mean"] = nullptr;
        r2["sd"] = nullptr;
    }
    r2["per_fold"] = json::array();
    for (const MetricReport& r : per_fold)
        r2["per_fold"].push_back(r.r2 ? json(*r.r2) : json(nullptr));
    out["r2"] = r2;

    out["rmse"] =
        metric_block(summary.rmse, collect([](const MetricReport& r) { return r.rmse; }));
    return out;
}

namespace {

json hurdle_body(const HurdleRun& run) {
    json out;
    out["classifier_family"] = family_name(run.classifier_winner);
    out["regressor_family"] = family_name(run.regressor_winner);
    out["svm_train_capped"] = run.svm_capped;
    out["n_rows_scored"] = run.row_index.size();
    json clf = json::object(), reg = json::object();
    for (const auto& [f, scores] : run.clf_accuracy) {
        json arr = json::array();
        for (double v : scores) arr.push_back(is_missing(v) ? json(nullptr) : json(v));
        clf[family_name(f)] = arr;
    }
    for (const auto& [f, scores] : run.reg_rmse) {
        json arr = json::array();
        for (double v : scores) arr.push_back(is_missing(v) ? json(nullptr) : json(v));
        reg[family_name(f)] = arr;
    }
    out["classifier_accuracy_per_fold"] = clf;
    out["regressor_rmse_per_fold"] = reg;
    out["metrics"] = metrics_json(run.per_fold, run.summary);
    return out;
}

}  // namespace

json hurdle_report(const HurdleRun& run, const RunManifest& m) {
    json out = hurdle_body(run);
    out["kind"] = "hurdle";
    out["manifest"] = manifest_json(m);
    return out;
}

json regional_report(const RegionalRun& run, const RunManifest& m) {
    json out = hurdle_body(run.run);
    out["kind"] = "regional";
    out["manifest"] = manifest_json(m);
    out["sites"] = json::array();
    for (const SiteBreakdown& sb : run.sites) {
        json site;
        site["site_id"] = sb.site_id;
        site["metrics"] = metrics_json(sb.per_fold, sb.summary);
        out["sites"].push_back(std::move(site));
    }
    return out;
}

json baseline_report(const BaselineResult& result, const FoldPlan& folds,
                     const RunManifest& m) {
    json out;
    out["kind"] = "baseline";
    out["manifest"] = manifest_json(m);
    out["chosen_k"] = result.chosen_k;
    out["n_unpredictable"] = result.n_unpredictable;
    out["metrics"] = metrics_json(result.per_fold, result.summary);
    (void)folds;
    return out;
}

void write_report(const json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_report: cannot write " + path);
    out << report.dump(2) << '\n';
}

json load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_report: cannot open " + path);
    return json::parse(in);
}

json compare_reports(const json& a, const json& b) {
    const std::string da = a.at("manifest").at("fold_digest").get<std::string>();
    const std::string db = b.at("manifest").at("fold_digest").get<std::string>();
    if (da != db)
        throw DataError(
            "compare: fold-plan digests differ (" + da + " vs " + db +
            "); the reports were not computed over the same fold partition");

    static const char* kMetrics[] = {"acc",         "prec", "recall", "f1",
                                     "weighted_f1", "r2",   "rmse"};
    json out;
    out["kind"] = "compare";
    out["fold_digest"] = da;
    out["metrics"] = json::object();
    for (const char* metric : kMetrics) {
        const json& ma = a.at("metrics").at(metric);
        const json& mb = b.at("metrics").at(metric);
        json entry;
        if (ma.at("mean").is_null() || mb.at("mean").is_null())
            entry["mean_delta"] = nullptr;
        else
            entry["mean_delta"] = ma.at("mean").get<double>() - mb.at("mean").get<double>();
        const json& pa = ma.at("per_fold");
        const json& pb = mb.at("per_fold");
        if (pa.size() != pb.size())
            throw DataError(std::string("compare: fold counts differ for metric ") + metric);
        json deltas = json::array();
        for (std::size_t f = 0; f < pa.size(); ++f) {
            if (pa[f].is_null() || pb[f].is_null())
                deltas.push_back(nullptr);
            else
                deltas.push_back(pa[f].get<double>() - pb[f].get<double>());
        }
        entry["per_fold_delta"] = std::move(deltas);
        out["metrics"][metric] = std::move(entry);
    }
    return out;
}

std::string render_compare(const json& comparison) {
    std::ostringstream os;
    os << "metric        mean_delta  per_fold\n";
    for (const auto& [metric, entry] : comparison.at("metrics").items()) {
        os << metric;
        for (std::size_t i = metric.size(); i < 14; ++i) os << ' ';
        if (entry.at("mean_delta").is_null())
            os << "        n/a";
        else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%+11.6f", entry.at("mean_delta").get<double>());
            os << buf;
        }
        os << "  [";
        const json& pf = entry.at("per_fold_delta");
        for (std::size_t f = 0; f < pf.size(); ++f) {
            if (f) os << ", ";
            if (pf[f].is_null())
                os << "n/a";
            else {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%+.6f", pf[f].get<double>());
                os << buf;
            }
        }
        os << "]\n";
    }
    return os.str();
}

void export_series_csv(const SeriesTable& table, const std::vector<double>& pred_per_row,
                       std::int64_t window_start, std::int64_t window_end,
                       const std::string& path) {
    if (pred_per_row.size() != table.n_rows())
        throw DataError("export_series: prediction vector does not match the table");
    std::ofstream out(path);
    if (!out) throw DataError("export_series: cannot write " + path);
    out << "timestamp,truth,prediction\n";
    std::size_t n_written = 0;
    char buf[32];
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        std::int64_t ts = table.timestamps[r];
        if (ts < window_start || ts > window_end) continue;
        out << format_iso8601(ts) << ',';
        if (!is_missing(table.target[r])) {
            std::snprintf(buf, sizeof(buf), "%.17g", table.target[r]);
            out << buf;
        }
        out << ',';
        if (!is_missing(pred_per_row[r])) {
            std::snprintf(buf, sizeof(buf), "%.17g", pred_per_row[r]);
            out << buf;
        }
        out << '\n';
        n_written++;
    }
    if (n_written == 0) throw DataError("export_series: window contains no rows");
}

}  // namespace raingap
