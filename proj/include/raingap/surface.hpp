#pragma once

#include "raingap/metrics.hpp"
#include "raingap/preprocess.hpp"
#include "raingap/series.hpp"

namespace raingap {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Pivoted dense Gaussian elimination; rejects pivots below 1e-12 relative.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b,
                                std::size_t n);

struct SurfaceWeights {
    std::vector<std::size_t> gauge_idx;  // indices into the caller's gauge list
    std::vector<double> weights;         // sum to 1
    double lagrange = 0.0;
    std::vector<double> distances;       // target-to-gauge, m
};

// Multiquadric with zero offset: basis phi(r) = r, bordered (n+1) system
// [Phi 1; 1^T 0] [w; lambda] = [phi0; 1]. Exact at gauge locations.
SurfaceWeights solve_weights(Point2 target, const std::vector<Point2>& gauges);

// Iteratively removes gauges with weight < threshold (negative included) and
// re-solves until all weights pass or one gauge remains.
SurfaceWeights prune_weights(Point2 target, const std::vector<Point2>& gauges,
                             SurfaceWeights sw, double threshold = 0.001);

struct GaugeRef {
    std::string gauge_id;
    std::size_t column = 0;  // feature column in the SeriesTable
    Point2 position;
    double distance_m = 0.0;
};

// External-gauge feature columns matched to catalog entries, nearest first.
std::vector<GaugeRef> gauges_for_site(const SeriesTable& table,
                                      const GaugeCatalog& catalog);

struct GaugeCountChoice {
    std::vector<std::size_t> candidate_ks;
    std::vector<double> rmse_per_k;  // NaN where a candidate was not evaluable
    std::size_t chosen_k = 0;
};

// Evaluates each candidate k over `eval_rows` restricted to rows where the
// target and all k nearest gauges are present; picks minimum RMSE, ties to
// the smaller k.
GaugeCountChoice select_gauge_count(const SeriesTable& table, const GaugeCatalog& catalog,
                                    const std::vector<std::size_t>& candidate_ks,
                                    const std::vector<std::size_t>& eval_rows);

struct BaselineResult {
    std::vector<double> predictions;  // per table row; NaN where no gauge present
    std::vector<MetricReport> per_fold;
    FoldSummary summary;
    std::size_t chosen_k = 0;
    std::size_t n_unpredictable = 0;  // rows where every selected gauge was missing
};

// Interpolates every sample from the k chosen nearest gauges (pruned
// weights, re-solved over the present gauge subset) and scores per fold on
// rows with a present target.
BaselineResult baseline_predict(const SeriesTable& table, const GaugeCatalog& catalog,
                                const GaugeCountChoice& choice, const FoldPlan& folds);

}  // namespace raingap
