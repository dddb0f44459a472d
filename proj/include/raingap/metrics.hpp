#pragma once

#include <optional>
#include <vector>

#include "raingap/common.hpp"

namespace raingap {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

struct ClassificationScores {
    ConfusionCounts counts;
    double accuracy_pct = 0.0;  // percent, 0..100
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double weighted_f1 = 0.0;
};

// Per-fold report. accuracy is in percent; the rest are fractions.
// r2 is absent when the truth is constant over the fold.
struct MetricReport {
    double accuracy_pct = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double weighted_f1 = 0.0;
    std::optional<double> r2;
    double rmse = 0.0;
    std::size_t n = 0;
    std::vector<double> errors;  // per-sample truth - prediction, kept for audit
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population sd
};

struct FoldSummary {
    MeanSd accuracy_pct, precision, recall, f1, weighted_f1, r2, rmse;
    std::size_t n_folds = 0;
    std::size_t r2_missing_folds = 0;  // folds excluded from the r2 average
};

ConfusionCounts count_confusion(const std::vector<int>& truth,
                                const std::vector<int>& pred);

// Class 1 is the positive class; class-0 F1 for the weighted score is
// computed with class 0 as positive. Zero-denominator conventions:
// precision = 0 when tp+fp = 0, recall = 0 when tp+fn = 0, f1 = 0 when
// precision+recall = 0.
ClassificationScores classification_metrics(const std::vector<int>& truth,
                                            const std::vector<int>& pred);

// Returns (r2, rmse). r2 = 1 - SSres/SStot; absent when truth is constant.
// Requires length >= 2 for r2; rmse alone is defined for length >= 1.
std::pair<std::optional<double>, double> regression_metrics(
    const std::vector<double>& truth, const std::vector<double>& pred);

MetricReport score_final_predictions(const std::vector<double>& truth_mm,
                                     const std::vector<double>& pred_mm);

FoldSummary average_folds(const std::vector<MetricReport>& reports);

}  // namespace raingap
