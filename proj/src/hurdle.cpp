#include "raingap/hurdle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raingap/learners/svm.hpp"

namespace raingap {

const std::vector<std::string> kCoreFeatureNames = {
    "pressure", "humidity", "temperature", "wind_speed"};

std::vector<std::size_t> select_feature_columns(const SeriesTable& table,
                                                FeatureSet set, bool cyclic) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table.n_features(); ++c) {
        ColumnOrigin origin = table.feature_origins[c];
        if (origin == ColumnOrigin::SiteTag) continue;
        if (origin == ColumnOrigin::Cyclic) {
            if (cyclic) cols.push_back(c);
            continue;
        }
        bool station = origin == ColumnOrigin::StationSensor;
        switch (set) {
            case FeatureSet::Core:
                if (station && std::find(kCoreFeatureNames.begin(), kCoreFeatureNames.end(),
                                         table.feature_names[c]) != kCoreFeatureNames.end())
                    cols.push_back(c);
                break;
            case FeatureSet::AllStation:
                if (station) cols.push_back(c);
                break;
            case FeatureSet::ExternalGauges:
                if (!station) cols.push_back(c);
                break;
            case FeatureSet::StationPlusGauges:
                cols.push_back(c);
                break;
        }
    }
    if (cols.empty()) throw DataError("no feature columns match the requested feature set");
    return cols;
}

Family select_winner(const std::map<Family, std::vector<double>>& scores, bool maximize) {
    Family winner = kFamilyOrder.front();
    double best = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    bool found = false;
    for (Family f : kFamilyOrder) {
        auto it = scores.find(f);
        if (it == scores.end()) continue;
        double sum = 0.0;
        std::size_t n = 0;
        for (double v : it->second)
            if (!is_missing(v)) {
                sum += v;
                n++;
            }
        if (n == 0) continue;
        double mean = sum / n;
        if (!found || (maximize ? mean > best : mean < best)) {
            found = true;
            best = mean;
            winner = f;
        }
    }
    if (!found) throw DataError("select_winner: no family produced a score");
    return winner;
}

std::vector<double> reassemble_predictions(const std::vector<int>& labels,
                                           const std::vector<double>& regressed) {
    std::vector<double> out(labels.size(), 0.0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1) continue;
        if (j >= regressed.size())
            throw DataError("reassemble: fewer regressed values than class-1 labels");
        out[i] = std::max(0.0, regressed[j++]);
    }
    if (j != regressed.size())
        throw DataError("reassemble: more regressed values than class-1 labels");
    return out;
}

namespace {

struct FoldData {
    std::vector<std::size_t> test_pos;       // positions into row_index
    std::vector<std::size_t> train_pos;      // complete-case training positions
    Matrix X_train;                          // scaled
    Matrix X_test;                           // imputed + scaled
    std::vector<double> y_train_mm;
    std::vector<double> y_test_mm;
    std::map<Family, std::vector<int>> clf_pred;     // per family, per test row
    std::map<Family, std::vector<double>> reg_pred;  // clipped, per class-1 row
};

LearnerSpec tuned_spec(const TunedStore& store, const std::string& site, Family family,
                       Task task, const HurdleConfig& config) {
    LearnerSpec spec;
    spec.family = family;
    spec.task = task;
    spec.params = store.lookup(site, family, task).params;
    spec.seed = mix_seed(config.seed, static_cast<std::uint64_t>(family) * 2 +
                                          (task == Task::Regress ? 1 : 0));
    if (family == Family::Svm)
        spec.params.num["train_cap"] = static_cast<double>(config.svm_train_cap);
    return spec;
}

}  // namespace

HurdleRun run_hurdle(const SeriesTable& table, const TunedStore& store,
                     const HurdleConfig& config) {
    HurdleRun run;
    run.config = config;

    std::vector<std::size_t> cols =
        select_feature_columns(table, config.feature_set, config.cyclic);
    std::vector<std::string> col_names;
    for (std::size_t c : cols) col_names.push_back(table.feature_names[c]);

    // Samples with missing precipitation are discarded up front.
    for (std::size_t r = 0; r < table.n_rows(); ++r)
        if (!is_missing(table.target[r])) run.row_index.push_back(r);
    if (run.row_index.size() < static_cast<std::size_t>(config.n_folds))
        throw DataError("run_hurdle: too few rows with a present target");

    run.folds = make_folds(run.row_index.size(), config.n_folds, config.seed);
    run.final_predictions.assign(run.row_index.size(), kMissing);

    const unsigned threads = effective_threads(config.threads);
    std::vector<FoldData> folds(config.n_folds);

    for (int f = 0; f < config.n_folds; ++f) {
        FoldData& fd = folds[f];
        fd.test_pos = run.folds.fold_rows(f);
        std::vector<std::size_t> train_all = run.folds.other_rows(f);

        auto to_rows = [&](const std::vector<std::size_t>& pos) {
            std::vector<std::size_t> rows;
            rows.reserve(pos.size());
            for (std::size_t p : pos) rows.push_back(run.row_index[p]);
            return rows;
        };

        Matrix train_raw_all = rows_to_matrix(table, to_rows(train_all), cols);
        std::vector<std::size_t> cc = complete_case_rows(train_raw_all, {});
        if (cc.empty())
            throw DataError("run_hurdle: fold " + std::to_string(f) +
                            " has no complete-case training rows");
        fd.train_pos.reserve(cc.size());
        for (std::size_t i : cc) fd.train_pos.push_back(train_all[i]);

        Matrix train_raw(cc.size(), cols.size());
        fd.y_train_mm.resize(cc.size());
        for (std::size_t i = 0; i < cc.size(); ++i) {
            std::copy(train_raw_all.row(cc[i]), train_raw_all.row(cc[i]) + cols.size(),
                      train_raw.row(i));
            fd.y_train_mm[i] = table.target[run.row_index[fd.train_pos[i]]];
        }

        Matrix test_raw = rows_to_matrix(table, to_rows(fd.test_pos), cols);
        fd.y_test_mm.resize(fd.test_pos.size());
        for (std::size_t i = 0; i < fd.test_pos.size(); ++i)
            fd.y_test_mm[i] = table.target[run.row_index[fd.test_pos[i]]];

        ImputerModel::Options iopt;
        iopt.n_trees = config.imputer_trees;
        iopt.max_rounds = config.imputer_max_rounds;
        iopt.seed = mix_seed(config.seed, 0x1117 + f);
        ImputerModel imputer = ImputerModel::fit(train_raw, iopt, col_names, threads);
        Matrix test_imputed = imputer.impute(test_raw, threads);

        MinMaxScaler scaler = MinMaxScaler::fit(train_raw);
        fd.X_train = scaler.transform(train_raw);
        fd.X_test = scaler.transform(test_imputed);
    }

    // Classification: every family on every fold, winner by mean accuracy.
    for (Family family : kFamilyOrder)
        run.clf_accuracy[family].assign(config.n_folds, kMissing);
    for (int f = 0; f < config.n_folds; ++f) {
        FoldData& fd = folds[f];
        std::vector<double> y_train_cls(fd.y_train_mm.size());
        for (std::size_t i = 0; i < y_train_cls.size(); ++i)
            y_train_cls[i] = fd.y_train_mm[i] > 0.0 ? 1.0 : 0.0;
        for (Family family : kFamilyOrder) {
            LearnerSpec spec =
                tuned_spec(store, table.site_id, family, Task::Classify, config);
            if (family == Family::Svm) run.svm_capped =
                run.svm_capped || fd.X_train.rows > config.svm_train_cap;
            auto model = fit(spec, fd.X_train, y_train_cls, threads);
            std::vector<double> pred = model->predict(fd.X_test);
            std::vector<int>& labels = fd.clf_pred[family];
            labels.resize(pred.size());
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                labels[i] = pred[i] > 0.5 ? 1 : 0;
                if (labels[i] == (fd.y_test_mm[i] > 0.0 ? 1 : 0)) hits++;
            }
            run.clf_accuracy[family][f] =
                pred.empty() ? kMissing : static_cast<double>(hits) / pred.size();
        }
    }
    run.classifier_winner = select_winner(run.clf_accuracy, /*maximize=*/true);

    // Regression: trained on rain rows only, evaluated on the rows the
    // winning classifier labelled 1.
    for (Family family : kFamilyOrder)
        run.reg_rmse[family].assign(config.n_folds, kMissing);
    for (int f = 0; f < config.n_folds; ++f) {
        FoldData& fd = folds[f];
        std::vector<std::size_t> rain_rows;
        for (std::size_t i = 0; i < fd.y_train_mm.size(); ++i)
            if (fd.y_train_mm[i] > 0.0) rain_rows.push_back(i);
        if (rain_rows.empty())
            throw DataError("run_hurdle: fold " + std::to_string(f) +
                            " training set contains no rain rows");

        std::vector<std::size_t> predicted_rain;
        const std::vector<int>& winner_labels = fd.clf_pred[run.classifier_winner];
        for (std::size_t i = 0; i < winner_labels.size(); ++i)
            if (winner_labels[i] == 1) predicted_rain.push_back(i);
        if (predicted_rain.empty()) continue;  // nothing to regress this fold

        Matrix X_rain(rain_rows.size(), fd.X_train.cols);
        std::vector<double> y_rain(rain_rows.size());
        for (std::size_t i = 0; i < rain_rows.size(); ++i) {
            std::copy(fd.X_train.row(rain_rows[i]),
                      fd.X_train.row(rain_rows[i]) + fd.X_train.cols, X_rain.row(i));
            y_rain[i] = fd.y_train_mm[rain_rows[i]];
        }
        Matrix X_pred(predicted_rain.size(), fd.X_test.cols);
        std::vector<double> y_pred_truth(predicted_rain.size());
        for (std::size_t i = 0; i < predicted_rain.size(); ++i) {
            std::copy(fd.X_test.row(predicted_rain[i]),
                      fd.X_test.row(predicted_rain[i]) + fd.X_test.cols, X_pred.row(i));
            y_pred_truth[i] = fd.y_test_mm[predicted_rain[i]];
        }

        for (Family family : kFamilyOrder) {
            LearnerSpec spec =
                tuned_spec(store, table.site_id, family, Task::Regress, config);
            auto model = fit(spec, X_rain, y_rain, threads);
            std::vector<double> pred = model->predict(X_pred);
            for (double& p : pred) p = std::max(0.0, p);  // negative clipping
            double ss = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i)
                ss += (pred[i] - y_pred_truth[i]) * (pred[i] - y_pred_truth[i]);
            run.reg_rmse[family][f] = std::sqrt(ss / pred.size());
            fd.reg_pred[family] = std::move(pred);
        }
    }
    // A classifier that never predicts rain leaves nothing to regress; the
    // reassembled series is then all zeros and the regressor choice is moot.
    bool any_reg_score = false;
    for (const auto& [family, scores] : run.reg_rmse)
        for (double s : scores)
            if (!is_missing(s)) any_reg_score = true;
    run.regressor_winner =
        any_reg_score ? select_winner(run.reg_rmse, /*maximize=*/false)
                      : kFamilyOrder.front();

    // Reassembly + final-prediction scoring.
    for (int f = 0; f < config.n_folds; ++f) {
        FoldData& fd = folds[f];
        const std::vector<int>& labels = fd.clf_pred[run.classifier_winner];
        auto reg_it = fd.reg_pred.find(run.regressor_winner);
        std::vector<double> final_pred = reassemble_predictions(
            labels, reg_it != fd.reg_pred.end() ? reg_it->second : std::vector<double>{});
        for (std::size_t i = 0; i < fd.test_pos.size(); ++i)
            run.final_predictions[fd.test_pos[i]] = final_pred[i];
        run.per_fold.push_back(score_final_predictions(fd.y_test_mm, final_pred));
    }
    run.summary = average_folds(run.per_fold);
    return run;
}

RegionalRun run_regional(const std::vector<SeriesTable>& tables, const RegionSpec& spec,
                         const TunedStore& store, const HurdleConfig& config) {
    RegionalRun out;
    out.pooled = pool_region(tables, spec);
    out.run = run_hurdle(out.pooled, store, config);

    int tag = out.pooled.feature_index(kSiteTagColumn);
    if (tag < 0) throw DataError("run_regional: pooled table lost its site tag");

    for (std::size_t s = 0; s < spec.member_sites.size(); ++s) {
        SiteBreakdown breakdown;
        breakdown.site_id = spec.member_sites[s];
        for (int f = 0; f < config.n_folds; ++f) {
            std::vector<double> truth, pred;
            for (std::size_t pos : out.run.folds.fold_rows(f)) {
                std::size_t row = out.run.row_index[pos];
                if (out.pooled.features[tag][row] != static_cast<double>(s)) continue;
                truth.push_back(out.pooled.target[row]);
                pred.push_back(out.run.final_predictions[pos]);
            }
            if (truth.empty()) continue;  // fold holds no rows for this site
            breakdown.per_fold.push_back(score_final_predictions(truth, pred));
        }
        if (breakdown.per_fold.empty())
            throw DataError("run_regional: no scorable rows for site " + breakdown.site_id);
        breakdown.summary = average_folds(breakdown.per_fold);
        out.sites.push_back(std::move(breakdown));
    }
    return out;
}

}  // namespace raingap
