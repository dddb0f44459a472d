#include "raingap/metrics.hpp"

#include <cmath>
#include <numeric>

namespace raingap {

namespace {

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from(double precision, double recall) {
    double s = precision + recall;
    return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / xs.size());
    return out;
}

}  // namespace

ConfusionCounts count_confusion(const std::vector<int>& truth,
                                const std::vector<int>& pred) {
    if (truth.size() != pred.size())
        throw DataError("classification_metrics: truth/pred length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1)
            (pred[i] == 1 ? c.tp : c.fn)++;
        else
            (pred[i] == 1 ? c.fp : c.tn)++;
    }
    return c;
}

ClassificationScores classification_metrics(const std::vector<int>& truth,
                                            const std::vector<int>& pred) {
    if (truth.empty()) throw DataError("classification_metrics: empty input");
    ClassificationScores s;
    s.counts = count_confusion(truth, pred);
    const auto& c = s.counts;
    s.accuracy_pct = 100.0 * static_cast<double>(c.tp + c.tn) / c.total();
    s.precision = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    s.recall = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    s.f1 = f1_from(s.precision, s.recall);

    // class 0 treated as positive: tp0 = tn, fp0 = fn, fn0 = fp
    double p0 = safe_ratio(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fn));
    double r0 = safe_ratio(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fp));
    double f1_0 = f1_from(p0, r0);
    double support1 = static_cast<double>(c.tp + c.fn);
    double support0 = static_cast<double>(c.tn + c.fp);
    s.weighted_f1 = (support0 * f1_0 + support1 * s.f1) / c.total();
    return s;
}

std::pair<std::optional<double>, double> regression_metrics(
    const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.size() != pred.size())
        throw DataError("regression_metrics: truth/pred length mismatch");
    if (truth.empty()) throw DataError("regression_metrics: empty input");
    double ss_res = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double e = truth[i] - pred[i];
        ss_res += e * e;
    }
    double rmse = std::sqrt(ss_res / truth.size());

    std::optional<double> r2;
    if (truth.size() >= 2) {
        double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / truth.size();
        double ss_tot = 0.0;
        for (double y : truth) ss_tot += (y - mean) * (y - mean);
        if (ss_tot > 0.0) r2 = 1.0 - ss_res / ss_tot;
    }
    return {r2, rmse};
}

MetricReport score_final_predictions(const std::vector<double>& truth_mm,
                                     const std::vector<double>& pred_mm) {
    if (truth_mm.size() != pred_mm.size())
        throw DataError("score_final_predictions: length mismatch");
    std::vector<int> truth_cls(truth_mm.size()), pred_cls(pred_mm.size());
    for (std::size_t i = 0; i < truth_mm.size(); ++i) {
        truth_cls[i] = truth_mm[i] > 0.0 ? 1 : 0;
        pred_cls[i] = pred_mm[i] > 0.0 ? 1 : 0;
    }
    ClassificationScores cls = classification_metrics(truth_cls, pred_cls);
    auto [r2, rmse] = regression_metrics(truth_mm, pred_mm);

    MetricReport rep;
    rep.accuracy_pct = cls.accuracy_pct;
    rep.precision = cls.precision;
    rep.recall = cls.recall;
    rep.f1 = cls.f1;
    rep.weighted_f1 = cls.weighted_f1;
    rep.r2 = r2;
    rep.rmse = rmse;
    rep.n = truth_mm.size();
    rep.errors.resize(truth_mm.size());
    for (std::size_t i = 0; i < truth_mm.size(); ++i)
        rep.errors[i] = truth_mm[i] - pred_mm[i];
    return rep;
}

FoldSummary average_folds(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw DataError("average_folds: no reports");
    FoldSummary out;
    out.n_folds = reports.size();
    std::vector<double> acc, prec, rec, f1, wf1, r2, rmse;
    for (const auto& r : reports) {
        acc.push_back(r.accuracy_pct);
        prec.push_back(r.precision);
        rec.push_back(r.recall);
        f1.push_back(r.f1);
        wf1.push_back(r.weighted_f1);
        rmse.push_back(r.rmse);
        if (r.r2)
            r2.push_back(*r.r2);
        else
            out.r2_missing_folds++;
    }
    out.accuracy_pct = mean_sd(acc);
    out.precision = mean_sd(prec);
    out.recall = mean_sd(rec);
    out.f1 = mean_sd(f1);
    out.weighted_f1 = mean_sd(wf1);
    out.r2 = mean_sd(r2);
    out.rmse = mean_sd(rmse);
    return out;
}

}  // namespace raingap
