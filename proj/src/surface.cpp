#include "raingap/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace raingap {

std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b,
                                std::size_t n) {
    if (A.size() != n * n || b.size() != n) throw NumericError("solve_dense: bad shape");
    double scale = 0.0;
    for (double v : A) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(A[perm[r] * n + k]) > std::abs(A[perm[piv] * n + k])) piv = r;
        std::swap(perm[k], perm[piv]);
        double p = A[perm[k] * n + k];
        if (std::abs(p) < 1e-12 * scale)
            throw NumericError("solve_dense: singular system (pivot below threshold)");
        for (std::size_t r = k + 1; r < n; ++r) {
            double f = A[perm[r] * n + k] / p;
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) A[perm[r] * n + c] -= f * A[perm[k] * n + c];
            b[perm[r]] -= f * b[perm[k]];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[perm[k]];
        for (std::size_t c = k + 1; c < n; ++c) s -= A[perm[k] * n + c] * x[c];
        x[k] = s / A[perm[k] * n + k];
    }
    return x;
}

namespace {

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

SurfaceWeights solve_subset(Point2 target, const std::vector<Point2>& gauges,
                            const std::vector<std::size_t>& subset) {
    const std::size_t n = subset.size();
    if (n == 0) throw DataError("solve_weights: no gauges");
    SurfaceWeights sw;
    sw.gauge_idx = subset;
    sw.distances.resize(n);
    for (std::size_t i = 0; i < n; ++i) sw.distances[i] = dist(target, gauges[subset[i]]);

    if (n == 1) {
        sw.weights = {1.0};
        sw.lagrange = 0.0;
        return sw;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (gauges[subset[i]].x == gauges[subset[j]].x &&
                gauges[subset[i]].y == gauges[subset[j]].y)
                throw NumericError("solve_weights: duplicate gauge positions");

    const std::size_t m = n + 1;
    std::vector<double> A(m * m, 0.0), rhs(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            A[i * m + j] = dist(gauges[subset[i]], gauges[subset[j]]);
        A[i * m + n] = 1.0;
        A[n * m + i] = 1.0;
        rhs[i] = sw.distances[i];
    }
    rhs[n] = 1.0;
    std::vector<double> sol = solve_dense(std::move(A), std::move(rhs), m);
    sw.weights.assign(sol.begin(), sol.begin() + n);
    sw.lagrange = sol[n];
    return sw;
}

}  // namespace

SurfaceWeights solve_weights(Point2 target, const std::vector<Point2>& gauges) {
    std::vector<std::size_t> all(gauges.size());
    std::iota(all.begin(), all.end(), 0);
    return solve_subset(target, gauges, all);
}

SurfaceWeights prune_weights(Point2 target, const std::vector<Point2>& gauges,
                             SurfaceWeights sw, double threshold) {
    while (sw.gauge_idx.size() > 1) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < sw.weights.size(); ++i)
            if (sw.weights[i] >= threshold) keep.push_back(sw.gauge_idx[i]);
        if (keep.size() == sw.gauge_idx.size()) break;
        if (keep.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < sw.weights.size(); ++i)
                if (sw.weights[i] > sw.weights[best]) best = i;
            keep.push_back(sw.gauge_idx[best]);
        }
        sw = solve_subset(target, gauges, keep);
    }
    return sw;
}

std::vector<GaugeRef> gauges_for_site(const SeriesTable& table,
                                      const GaugeCatalog& catalog) {
    const GaugeEntry& site = catalog.find(table.site_id);
    std::vector<GaugeRef> out;
    for (std::size_t c = 0; c < table.n_features(); ++c) {
        if (table.feature_origins[c] != ColumnOrigin::ExternalGauge) continue;
        const GaugeEntry& e = catalog.find(table.feature_names[c]);
        GaugeRef ref;
        ref.gauge_id = e.gauge_id;
        ref.column = c;
        ref.position = {e.easting_m, e.northing_m};
        ref.distance_m = std::hypot(e.easting_m - site.easting_m,
                                    e.northing_m - site.northing_m);
        out.push_back(std::move(ref));
    }
    std::sort(out.begin(), out.end(), [](const GaugeRef& a, const GaugeRef& b) {
        if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
        return a.gauge_id < b.gauge_id;
    });
    return out;
}

namespace {

// Memoized pruned solve for a present-gauge subset (bitmask keyed).
class SubsetSolver {
public:
    SubsetSolver(Point2 target, std::vector<Point2> positions)
        : target_(target), positions_(std::move(positions)) {}

    const SurfaceWeights& solve_for(const std::vector<bool>& present) {
        auto it = cache_.find(present);
        if (it != cache_.end()) return it->second;
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < present.size(); ++i)
            if (present[i]) subset.push_back(i);
        SurfaceWeights sw = solve_subset(target_, positions_, subset);
        sw = prune_weights(target_, positions_, std::move(sw));
        return cache_.emplace(present, std::move(sw)).first->second;
    }

private:
    Point2 target_;
    std::vector<Point2> positions_;
    std::map<std::vector<bool>, SurfaceWeights> cache_;
};

}  // namespace

GaugeCountChoice select_gauge_count(const SeriesTable& table, const GaugeCatalog& catalog,
                                    const std::vector<std::size_t>& candidate_ks,
                                    const std::vector<std::size_t>& eval_rows) {
    std::vector<GaugeRef> gauges = gauges_for_site(table, catalog);
    GaugeCountChoice choice;
    choice.candidate_ks = candidate_ks;
    choice.rmse_per_k.assign(candidate_ks.size(), kMissing);

    const GaugeEntry& site = catalog.find(table.site_id);
    Point2 target{site.easting_m, site.northing_m};

    double best_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < candidate_ks.size(); ++ci) {
        std::size_t k = candidate_ks[ci];
        if (k < 1 || k > gauges.size()) continue;
        std::vector<Point2> positions(k);
        for (std::size_t i = 0; i < k; ++i) positions[i] = gauges[i].position;
        SurfaceWeights sw =
            prune_weights(target, positions, solve_weights(target, positions));

        double ss = 0.0;
        std::size_t n = 0;
        for (std::size_t r : eval_rows) {
            if (is_missing(table.target[r])) continue;
            bool all_present = true;
            for (std::size_t i = 0; i < k && all_present; ++i)
                if (is_missing(table.features[gauges[i].column][r])) all_present = false;
            if (!all_present) continue;
            double est = 0.0;
            for (std::size_t i = 0; i < sw.gauge_idx.size(); ++i)
                est += sw.weights[i] * table.features[gauges[sw.gauge_idx[i]].column][r];
            double e = table.target[r] - est;
            ss += e * e;
            n++;
        }
        if (n == 0) continue;
        double rmse = std::sqrt(ss / n);
        choice.rmse_per_k[ci] = rmse;
        if (rmse < best_rmse) {
            best_rmse = rmse;
            choice.chosen_k = k;
        }
    }
    if (choice.chosen_k == 0)
        throw DataError("select_gauge_count: no candidate gauge count evaluable");
    return choice;
}

BaselineResult baseline_predict(const SeriesTable& table, const GaugeCatalog& catalog,
                                const GaugeCountChoice& choice, const FoldPlan& folds) {
    if (folds.assignment.size() != table.n_rows())
        throw DataError("baseline_predict: fold plan does not match table");
    std::vector<GaugeRef> gauges = gauges_for_site(table, catalog);
    std::size_t k = std::min(choice.chosen_k, gauges.size());
    if (k == 0) throw DataError("baseline_predict: no gauges available");

    const GaugeEntry& site = catalog.find(table.site_id);
    std::vector<Point2> positions(k);
    for (std::size_t i = 0; i < k; ++i) positions[i] = gauges[i].position;
    SubsetSolver solver({site.easting_m, site.northing_m}, positions);

    BaselineResult out;
    out.chosen_k = choice.chosen_k;
    out.predictions.assign(table.n_rows(), kMissing);
    std::vector<bool> present(k);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        bool any = false;
        for (std::size_t i = 0; i < k; ++i) {
            present[i] = !is_missing(table.features[gauges[i].column][r]);
            any = any || present[i];
        }
        if (!any) {
            out.n_unpredictable++;
            continue;
        }
        const SurfaceWeights& sw = solver.solve_for(present);
        double est = 0.0;
        for (std::size_t i = 0; i < sw.gauge_idx.size(); ++i)
            est += sw.weights[i] * table.features[gauges[sw.gauge_idx[i]].column][r];
        out.predictions[r] = est;
    }

    for (int f = 0; f < folds.n_folds; ++f) {
        std::vector<double> truth, pred;
        for (std::size_t r : folds.fold_rows(f)) {
            if (is_missing(table.target[r]) || is_missing(out.predictions[r])) continue;
            truth.push_back(table.target[r]);
            pred.push_back(out.predictions[r]);
        }
        if (truth.empty()) throw DataError("baseline_predict: fold with no scorable rows");
        out.per_fold.push_back(score_final_predictions(truth, pred));
    }
    out.summary = average_folds(out.per_fold);
    return out;
}

}  // namespace raingap
