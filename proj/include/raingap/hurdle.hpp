#pragma once

#include <map>

#include "raingap/imputer.hpp"
#include "raingap/metrics.hpp"
#include "raingap/preprocess.hpp"
#include "raingap/series.hpp"
#include "raingap/tuning.hpp"

namespace raingap {

struct HurdleConfig {
    int n_folds = 5;
    std::uint64_t seed = 0;
    FeatureSet feature_set = FeatureSet::StationPlusGauges;
    bool cyclic = true;
    GridKind grid = GridKind::Desk;  // recorded in the config snapshot
    std::size_t imputer_trees = 100;
    std::size_t imputer_max_rounds = 10;
    std::size_t svm_train_cap = 20000;
    unsigned threads = 0;
};

// Station-sensor columns admitted under the "core" feature set.
extern const std::vector<std::string> kCoreFeatureNames;

std::vector<std::size_t> select_feature_columns(const SeriesTable& table,
                                                FeatureSet set, bool cyclic);

struct HurdleRun {
    FoldPlan folds;                       // over retained rows
    std::vector<std::size_t> row_index;   // table rows with a present target
    Family classifier_winner = Family::Boosting;
    Family regressor_winner = Family::Boosting;
    std::map<Family, std::vector<double>> clf_accuracy;  // per family, per fold
    std::map<Family, std::vector<double>> reg_rmse;      // NaN where fold skipped
    std::vector<double> final_predictions;               // per retained row, mm
    std::vector<MetricReport> per_fold;
    FoldSummary summary;
    HurdleConfig config;
    bool svm_capped = false;
};

// Winner by mean fold score, ties resolved by the fixed family order.
Family select_winner(const std::map<Family, std::vector<double>>& scores, bool maximize);

// Class-0 positions get 0; class-1 positions consume `regressed` in order,
// negatives clipped to 0.
std::vector<double> reassemble_predictions(const std::vector<int>& labels,
                                           const std::vector<double>& regressed);

// The two-step cross-validated engine: per fold, complete-case training,
// random-forest test imputation, train-fit min-max scaling, classification
// by every family, amplitude regression of predicted-rain samples by every
// family, negative clipping, reassembly, and final-prediction scoring.
HurdleRun run_hurdle(const SeriesTable& table, const TunedStore& store,
                     const HurdleConfig& config);

struct SiteBreakdown {
    std::string site_id;
    std::vector<MetricReport> per_fold;
    FoldSummary summary;
};

struct RegionalRun {
    SeriesTable pooled;
    HurdleRun run;
    std::vector<SiteBreakdown> sites;
};

// One model trained on the pooled folds; metrics partitioned per member
// site by the site-tag column.
RegionalRun run_regional(const std::vector<SeriesTable>& tables, const RegionSpec& spec,
                         const TunedStore& store, const HurdleConfig& config);

}  // namespace raingap
