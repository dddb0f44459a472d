// raingap command-line interface.
//
// Subcommands: ingest, synth, tune, impute, baseline, compare, export.
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
// RAINGAP_THREADS (or --threads) caps worker threads. A JSON config file
// supplies defaults; explicit flags override config keys of the same name.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "raingap/csvio.hpp"
#include "raingap/report.hpp"
#include "raingap/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace raingap;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

// Applies a config-file value when the flag was not given on the command line.
template <class T>
void cfg(const json& j, const CLI::App* cmd, const std::string& flag,
         const std::string& key, T& var) {
    if (cmd->count(flag) > 0 || !j.contains(key)) return;
    try {
        var = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

const SeriesTable& find_table(const Dataset& ds, const std::string& site) {
    for (const auto& t : ds.tables)
        if (t.site_id == site) return t;
    throw DataError("dataset has no site '" + site + "'");
}

std::map<std::string, std::string> dataset_digests(const std::string& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        out[entry.path().filename().string()] = file_digest(entry.path().string());
    }
    return out;
}

std::vector<std::size_t> rows_with_target(const SeriesTable& table) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.n_rows(); ++r)
        if (!is_missing(table.target[r])) rows.push_back(r);
    return rows;
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    std::size_t sites = 2, gauges = 6;
    double days = 30.0;
    std::uint64_t seed = 0;
    double rain_fraction = 0.10, single_sample_fraction = 0.485;
    double corr_length_m = 8000.0;
    double miss_target = 0.02, miss_covariate = 0.05, miss_gauge = 0.05;
    std::string out, config_path;
};

int cmd_synth(const SynthArgs& a, const CLI::App* cmd) {
    json j = load_config(a.config_path);
    SynthArgs r = a;
    cfg(j, cmd, "--sites", "sites", r.sites);
    cfg(j, cmd, "--gauges", "gauges", r.gauges);
    cfg(j, cmd, "--days", "days", r.days);
    cfg(j, cmd, "--seed", "seed", r.seed);
    cfg(j, cmd, "--rain-fraction", "rain_fraction", r.rain_fraction);
    cfg(j, cmd, "--single-sample-fraction", "single_sample_fraction",
        r.single_sample_fraction);
    cfg(j, cmd, "--corr-length-m", "corr_length_m", r.corr_length_m);
    cfg(j, cmd, "--missing-target", "missing_target", r.miss_target);
    cfg(j, cmd, "--missing-covariate", "missing_covariate", r.miss_covariate);
    cfg(j, cmd, "--missing-gauge", "missing_gauge", r.miss_gauge);
    if (r.out.empty()) throw ConfigError("synth: --out is required");

    SynthConfig sc;
    sc.n_sites = r.sites;
    sc.n_gauges = r.gauges;
    sc.days = r.days;
    sc.seed = r.seed;
    sc.rain_fraction = r.rain_fraction;
    sc.single_sample_fraction = r.single_sample_fraction;
    sc.corr_length_m = r.corr_length_m;
    sc.missing_rate_target = r.miss_target;
    sc.missing_rate_covariate = r.miss_covariate;
    sc.missing_rate_gauge = r.miss_gauge;

    SynthOutput synth = generate(sc);
    json config_json = {{"subcommand", "synth"},
                        {"sites", sc.n_sites},
                        {"gauges", sc.n_gauges},
                        {"days", sc.days},
                        {"seed", sc.seed},
                        {"rain_fraction", sc.rain_fraction},
                        {"single_sample_fraction", sc.single_sample_fraction},
                        {"corr_length_m", sc.corr_length_m},
                        {"missing_target", sc.missing_rate_target},
                        {"missing_covariate", sc.missing_rate_covariate},
                        {"missing_gauge", sc.missing_rate_gauge},
                        {"tool_version", kToolVersion}};
    write_dataset(synth.observed, r.out, config_json.dump(2));
    Dataset truth;
    truth.tables = synth.truth;
    truth.catalog = synth.observed.catalog;
    write_dataset(truth, (fs::path(r.out) / "truth").string(), config_json.dump(2));
    std::cerr << "synth: wrote " << synth.observed.tables.size() << " site(s) to "
              << r.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- ingest ---

struct IngestArgs {
    std::vector<std::string> station_csvs;
    std::string catalog_path, gauge_dir, out, config_path;
    double radius_km = 30.0, missing_threshold = 0.10;
};

int cmd_ingest(const IngestArgs& a, const CLI::App* cmd) {
    json j = load_config(a.config_path);
    IngestArgs r = a;
    cfg(j, cmd, "--radius-km", "radius_km", r.radius_km);
    cfg(j, cmd, "--missing-threshold", "missing_threshold", r.missing_threshold);
    if (r.station_csvs.empty()) throw ConfigError("ingest: at least one --station-csv");
    if (r.catalog_path.empty() || r.out.empty())
        throw ConfigError("ingest: --catalog and --out are required");
    IngestConfig ic;
    ic.radius_km = r.radius_km;
    ic.missing_threshold = r.missing_threshold;
    ic.validate();

    Dataset ds;
    ds.catalog = read_catalog_csv(r.catalog_path);
    for (const std::string& path : r.station_csvs) {
        std::string site_id = fs::path(path).stem().string();
        SeriesTable table = read_series_csv(path, site_id);
        if (!r.gauge_dir.empty()) {
            for (const std::string& gid :
                 select_gauges_in_radius(ds.catalog, site_id, r.radius_km)) {
                fs::path gpath = fs::path(r.gauge_dir) / (gid + ".csv");
                if (!fs::exists(gpath)) continue;  // catalogued but undelivered
                SeriesTable raw = read_series_csv(gpath.string(), gid);
                std::vector<TimedReading> readings(raw.n_rows());
                for (std::size_t i = 0; i < raw.n_rows(); ++i)
                    readings[i] = {raw.timestamps[i], raw.target[i]};
                std::vector<TimedReading> agg = aggregate_gauge_15min(readings);
                std::vector<double> col(table.n_rows(), kMissing);
                std::size_t k = 0;
                for (std::size_t i = 0; i < table.n_rows(); ++i) {
                    while (k < agg.size() && agg[k].timestamp < table.timestamps[i]) k++;
                    if (k < agg.size() && agg[k].timestamp == table.timestamps[i])
                        col[i] = agg[k].value;
                }
                table.feature_names.push_back(gid);
                table.feature_origins.push_back(ColumnOrigin::ExternalGauge);
                table.features.push_back(std::move(col));
            }
        }
        table = drop_sparse_columns(table, r.missing_threshold);
        table.validate();
        ds.tables.push_back(std::move(table));
    }
    json config_json = {{"subcommand", "ingest"},
                        {"radius_km", r.radius_km},
                        {"missing_threshold", r.missing_threshold},
                        {"tool_version", kToolVersion}};
    write_dataset(ds, r.out, config_json.dump(2));
    std::cerr << "ingest: wrote " << ds.tables.size() << " site(s) to " << r.out << "\n";
    return 0;
}

// ------------------------------------------------------------------ tune ---

struct TuneArgs {
    std::string dataset, store, site, region, grid = "desk", config_path;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

int cmd_tune(const TuneArgs& a, const CLI::App* cmd) {
    json j = load_config(a.config_path);
    TuneArgs r = a;
    cfg(j, cmd, "--grid", "grid", r.grid);
    cfg(j, cmd, "--seed", "seed", r.seed);
    cfg(j, cmd, "--threads", "threads", r.threads);
    if (r.dataset.empty() || r.store.empty())
        throw ConfigError("tune: --dataset and --store are required");
    GridKind kind = grid_kind_from_name(r.grid);

    Dataset ds = read_dataset(r.dataset);
    std::vector<SeriesTable> targets;
    if (!r.region.empty()) {
        RegionSpec spec;
        spec.member_sites = split_csv_list(r.region);
        std::vector<SeriesTable> members;
        for (const auto& s : spec.member_sites) members.push_back(find_table(ds, s));
        targets.push_back(pool_region(members, spec));
    } else if (!r.site.empty()) {
        targets.push_back(find_table(ds, r.site));
    } else {
        targets = ds.tables;
    }

    TunedStore store;
    if (fs::exists(r.store)) store = TunedStore::load(r.store);
    store.split_seed = r.seed;
    for (const SeriesTable& table : targets) {
        for (Family family : kFamilyOrder) {
            for (Task task : {Task::Classify, Task::Regress}) {
                GridSearchResult res =
                    grid_search(table, family, task, r.seed, kind, r.threads);
                store.put(table.site_id, family, task, {res.params, res.score});
                std::cerr << "tune: " << table.site_id << " " << family_name(family)
                          << " " << task_name(task) << " score " << res.score << "\n";
            }
        }
    }
    store.save(r.store);
    return 0;
}

// ---------------------------------------------------------------- impute ---

struct ImputeArgs {
    std::string dataset, store, site, region, report_path, predictions_path;
    std::string features = "cosmos+ea", cyclic = "on", grid = "desk", config_path;
    int folds = 5;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t imputer_trees = 100, svm_cap = 20000;
};

std::vector<double> predictions_per_row(const SeriesTable& table, const HurdleRun& run) {
    std::vector<double> pred(table.n_rows(), kMissing);
    for (std::size_t i = 0; i < run.row_index.size(); ++i)
        pred[run.row_index[i]] = run.final_predictions[i];
    return pred;
}

int cmd_impute(const ImputeArgs& a, const CLI::App* cmd) {
    json j = load_config(a.config_path);
    ImputeArgs r = a;
    cfg(j, cmd, "--features", "features", r.features);
    cfg(j, cmd, "--cyclic", "cyclic", r.cyclic);
    cfg(j, cmd, "--grid", "grid", r.grid);
    cfg(j, cmd, "--folds", "folds", r.folds);
    cfg(j, cmd, "--seed", "seed", r.seed);
    cfg(j, cmd, "--threads", "threads", r.threads);
    cfg(j, cmd, "--imputer-trees", "imputer_trees", r.imputer_trees);
    cfg(j, cmd, "--svm-cap", "svm_cap", r.svm_cap);
    if (r.dataset.empty() || r.store.empty() || r.report_path.empty())
        throw ConfigError("impute: --dataset, --store and --report are required");
    if (r.cyclic != "on" && r.cyclic != "off")
        throw ConfigError("impute: --cyclic expects on|off");
    if (r.folds < 2) throw ConfigError("impute: --folds must be at least 2");

    HurdleConfig hc;
    hc.n_folds = r.folds;
    hc.seed = r.seed;
    hc.feature_set = feature_set_from_name(r.features);
    hc.cyclic = r.cyclic == "on";
    hc.grid = grid_kind_from_name(r.grid);
    hc.imputer_trees = r.imputer_trees;
    hc.svm_train_cap = r.svm_cap;
    hc.threads = r.threads;

    Dataset ds = read_dataset(r.dataset);
    TunedStore store = TunedStore::load(r.store);

    RunManifest m;
    m.subcommand = "impute";
    m.seed = r.seed;
    m.input_digests = dataset_digests(r.dataset);
    m.input_digests["tuned_store"] = file_digest(r.store);
    m.resolved_config = {{"features", r.features}, {"cyclic", r.cyclic},
                         {"grid", r.grid},         {"folds", r.folds},
                         {"seed", r.seed},         {"imputer_trees", r.imputer_trees},
                         {"svm_cap", r.svm_cap},   {"site", r.site},
                         {"region", r.region}};

    json report;
    if (!r.region.empty()) {
        RegionSpec spec;
        spec.member_sites = split_csv_list(r.region);
        std::vector<SeriesTable> members;
        for (const auto& s : spec.member_sites) {
            SeriesTable t = find_table(ds, s);
            if (hc.cyclic) append_cyclic_features(t);
            members.push_back(std::move(t));
        }
        RegionalRun run = run_regional(members, spec, store, hc);
        m.fold_digest = fold_plan_digest(run.run.folds);
        report = regional_report(run, m);
        if (!r.predictions_path.empty())
            export_series_csv(run.pooled, predictions_per_row(run.pooled, run.run),
                              run.pooled.timestamps.front(),
                              run.pooled.timestamps.back(), r.predictions_path);
    } else {
        if (r.site.empty()) throw ConfigError("impute: --site or --region is required");
        SeriesTable table = find_table(ds, r.site);
        if (hc.cyclic) append_cyclic_features(table);
        HurdleRun run = run_hurdle(table, store, hc);
        m.fold_digest = fold_plan_digest(run.folds);
        report = hurdle_report(run, m);
        if (!r.predictions_path.empty())
            export_series_csv(table, predictions_per_row(table, run),
                              table.timestamps.front(), table.timestamps.back(),
                              r.predictions_path);
    }
    write_report(report, r.report_path);
    std::cerr << "impute: wrote " << r.report_path << "\n";
    return 0;
}

// -------------------------------------------------------------- baseline ---

struct BaselineArgs {
    std::string dataset, site, report_path, predictions_path, config_path;
    int folds = 5;
    std::uint64_t seed = 0;
    std::size_t max_candidates = 12;
};

int cmd_baseline(const BaselineArgs& a, const CLI::App* cmd) {
    json j = load_config(a.config_path);
    BaselineArgs r = a;
    cfg(j, cmd, "--folds", "folds", r.folds);
    cfg(j, cmd, "--seed", "seed", r.seed);
    cfg(j, cmd, "--max-candidates", "max_candidates", r.max_candidates);
    if (r.dataset.empty() || r.site.empty() || r.report_path.empty())
        throw ConfigError("baseline: --dataset, --site and --report are required");
    if (r.folds < 2) throw ConfigError("baseline: --folds must be at least 2");

    Dataset ds = read_dataset(r.dataset);
    const SeriesTable& table = find_table(ds, r.site);

    // Same compact fold plan (over present-target rows) as the hurdle run,
    // so the two reports stay comparable.
    std::vector<std::size_t> scored = rows_with_target(table);
    FoldPlan compact = make_folds(scored.size(), r.folds, r.seed);
    FoldPlan expanded;
    expanded.n_folds = r.folds;
    expanded.seed = r.seed;
    expanded.assignment.assign(table.n_rows(), -1);
    for (std::size_t i = 0; i < scored.size(); ++i)
        expanded.assignment[scored[i]] = compact.assignment[i];

    std::size_t n_gauges = gauges_for_site(table, ds.catalog).size();
    if (n_gauges == 0) throw DataError("baseline: site has no external gauge columns");
    std::vector<std::size_t> candidates;
    for (std::size_t k = 2; k <= std::min(r.max_candidates, n_gauges); ++k)
        candidates.push_back(k);
    if (candidates.empty()) candidates.push_back(1);

    GaugeCountChoice choice = select_gauge_count(table, ds.catalog, candidates, scored);
    BaselineResult result = baseline_predict(table, ds.catalog, choice, expanded);

    RunManifest m;
    m.subcommand = "baseline";
    m.seed = r.seed;
    m.input_digests = dataset_digests(r.dataset);
    m.fold_digest = fold_plan_digest(compact);
    m.resolved_config = {{"site", r.site},
                         {"folds", r.folds},
                         {"seed", r.seed},
                         {"max_candidates", r.max_candidates},
                         {"chosen_k", choice.chosen_k}};
    write_report(baseline_report(result, expanded, m), r.report_path);
    if (!r.predictions_path.empty())
        export_series_csv(table, result.predictions, table.timestamps.front(),
                          table.timestamps.back(), r.predictions_path);
    std::cerr << "baseline: chose k=" << choice.chosen_k << ", wrote " << r.report_path
              << "\n";
    return 0;
}

// --------------------------------------------------------------- compare ---

int cmd_compare(const std::string& a_path, const std::string& b_path,
                const std::string& out_path) {
    json cmp = compare_reports(load_report(a_path), load_report(b_path));
    std::cout << render_compare(cmp);
    if (!out_path.empty()) write_report(cmp, out_path);
    return 0;
}

// ---------------------------------------------------------------- export ---

int cmd_export(const std::string& series_path, const std::string& from,
               const std::string& to, const std::string& out_path) {
    std::int64_t t0 = parse_iso8601(from);
    std::int64_t t1 = parse_iso8601(to);
    if (t0 > t1) throw ConfigError("export: --from is after --to");
    std::ifstream in(series_path);
    if (!in) throw DataError("export: cannot open " + series_path);
    std::ofstream out(out_path);
    if (!out) throw DataError("export: cannot write " + out_path);
    std::string line;
    if (!std::getline(in, line) || line != "timestamp,truth,prediction")
        throw DataError("export: " + series_path + " is not a prediction series CSV");
    out << line << '\n';
    std::size_t n = 0;
    while (std::getline(in, line)) {
        std::int64_t ts = parse_iso8601(line.substr(0, line.find(',')));
        if (ts < t0 || ts > t1) continue;
        out << line << '\n';
        n++;
    }
    if (n == 0) throw DataError("export: window contains no rows");
    std::cerr << "export: wrote " << n << " row(s) to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"raingap: two-step precipitation gap filling"};
    app.require_subcommand(1);

    SynthArgs sa;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--sites", sa.sites);
    synth_cmd->add_option("--gauges", sa.gauges);
    synth_cmd->add_option("--days", sa.days);
    synth_cmd->add_option("--seed", sa.seed);
    synth_cmd->add_option("--rain-fraction", sa.rain_fraction);
    synth_cmd->add_option("--single-sample-fraction", sa.single_sample_fraction);
    synth_cmd->add_option("--corr-length-m", sa.corr_length_m);
    synth_cmd->add_option("--missing-target", sa.miss_target);
    synth_cmd->add_option("--missing-covariate", sa.miss_covariate);
    synth_cmd->add_option("--missing-gauge", sa.miss_gauge);
    synth_cmd->add_option("--out", sa.out);
    synth_cmd->add_option("--config", sa.config_path);

    IngestArgs ia;
    CLI::App* ingest_cmd = app.add_subcommand("ingest", "build a dataset from raw CSVs");
    ingest_cmd->add_option("--station-csv", ia.station_csvs);
    ingest_cmd->add_option("--catalog", ia.catalog_path);
    ingest_cmd->add_option("--gauge-dir", ia.gauge_dir);
    ingest_cmd->add_option("--radius-km", ia.radius_km);
    ingest_cmd->add_option("--missing-threshold", ia.missing_threshold);
    ingest_cmd->add_option("--out", ia.out);
    ingest_cmd->add_option("--config", ia.config_path);

    TuneArgs ta;
    CLI::App* tune_cmd = app.add_subcommand("tune", "grid-search hyperparameters");
    tune_cmd->add_option("--dataset", ta.dataset);
    tune_cmd->add_option("--store", ta.store);
    tune_cmd->add_option("--site", ta.site);
    tune_cmd->add_option("--region", ta.region);
    tune_cmd->add_option("--grid", ta.grid);
    tune_cmd->add_option("--seed", ta.seed);
    tune_cmd->add_option("--threads", ta.threads);
    tune_cmd->add_option("--config", ta.config_path);

    ImputeArgs ma;
    CLI::App* impute_cmd = app.add_subcommand("impute", "run the two-step pipeline");
    impute_cmd->add_option("--dataset", ma.dataset);
    impute_cmd->add_option("--store", ma.store);
    impute_cmd->add_option("--site", ma.site);
    impute_cmd->add_option("--region", ma.region);
    impute_cmd->add_option("--features", ma.features);
    impute_cmd->add_option("--cyclic", ma.cyclic);
    impute_cmd->add_option("--grid", ma.grid);
    impute_cmd->add_option("--folds", ma.folds);
    impute_cmd->add_option("--seed", ma.seed);
    impute_cmd->add_option("--threads", ma.threads);
    impute_cmd->add_option("--imputer-trees", ma.imputer_trees);
    impute_cmd->add_option("--svm-cap", ma.svm_cap);
    impute_cmd->add_option("--report", ma.report_path);
    impute_cmd->add_option("--predictions", ma.predictions_path);
    impute_cmd->add_option("--config", ma.config_path);

    BaselineArgs ba;
    CLI::App* baseline_cmd = app.add_subcommand("baseline", "multiquadric surface fit");
    baseline_cmd->add_option("--dataset", ba.dataset);
    baseline_cmd->add_option("--site", ba.site);
    baseline_cmd->add_option("--folds", ba.folds);
    baseline_cmd->add_option("--seed", ba.seed);
    baseline_cmd->add_option("--max-candidates", ba.max_candidates);
    baseline_cmd->add_option("--report", ba.report_path);
    baseline_cmd->add_option("--predictions", ba.predictions_path);
    baseline_cmd->add_option("--config", ba.config_path);

    std::string cmp_a, cmp_b, cmp_out;
    CLI::App* compare_cmd = app.add_subcommand("compare", "diff two reports");
    compare_cmd->add_option("--a", cmp_a)->required();
    compare_cmd->add_option("--b", cmp_b)->required();
    compare_cmd->add_option("--out", cmp_out);

    std::string exp_series, exp_from, exp_to, exp_out;
    CLI::App* export_cmd = app.add_subcommand("export", "window a prediction series CSV");
    export_cmd->add_option("--series", exp_series)->required();
    export_cmd->add_option("--from", exp_from)->required();
    export_cmd->add_option("--to", exp_to)->required();
    export_cmd->add_option("--out", exp_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    auto started = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        if (synth_cmd->parsed()) rc = cmd_synth(sa, synth_cmd);
        else if (ingest_cmd->parsed()) rc = cmd_ingest(ia, ingest_cmd);
        else if (tune_cmd->parsed()) rc = cmd_tune(ta, tune_cmd);
        else if (impute_cmd->parsed()) rc = cmd_impute(ma, impute_cmd);
        else if (baseline_cmd->parsed()) rc = cmd_baseline(ba, baseline_cmd);
        else if (compare_cmd->parsed()) rc = cmd_compare(cmp_a, cmp_b, cmp_out);
        else if (export_cmd->parsed()) rc = cmd_export(exp_series, exp_from, exp_to, exp_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    std::cerr << "elapsed: " << elapsed.count() << " s\n";  // never in report bytes
    return rc;
}
