#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "raingap/surface.hpp"

using namespace raingap;

namespace {

std::vector<Point2> random_layout(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-10000.0, 10000.0);
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

Eigen::VectorXd eigen_bordered_solve(Point2 target, const std::vector<Point2>& gauges) {
    const auto n = static_cast<Eigen::Index>(gauges.size());
    Eigen::MatrixXd A(n + 1, n + 1);
    Eigen::VectorXd b(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            A(i, j) = std::hypot(gauges[i].x - gauges[j].x, gauges[i].y - gauges[j].y);
        A(i, n) = 1.0;
        A(n, i) = 1.0;
        b(i) = std::hypot(target.x - gauges[i].x, target.y - gauges[i].y);
    }
    A(n, n) = 0.0;
    b(n) = 1.0;
    return A.fullPivLu().solve(b);
}

}  // namespace

TEST_CASE("dense solver matches an independent LU factorization") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> nd(1, 12);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = nd(rng);
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b(i) = u(rng);
            for (std::size_t j = 0; j < n; ++j) A(i, j) = u(rng);
        }
        A += 0.5 * Eigen::MatrixXd::Identity(n, n);  // keep away from singularity
        std::vector<double> Af(A.data(), A.data() + n * n);
        // Eigen stores column-major; transpose into row-major for the solver.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) Af[i * n + j] = A(i, j);
        std::vector<double> x =
            solve_dense(Af, std::vector<double>(b.data(), b.data() + n), n);
        Eigen::VectorXd want = A.fullPivLu().solve(b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(x[i] == doctest::Approx(want(i)).epsilon(1e-9));
    }
}

TEST_CASE("dense solver rejects singular and malformed systems") {
    CHECK_THROWS_AS(solve_dense({1, 2, 2, 4}, {1, 2}, 2), NumericError);  // rank 1
    CHECK_THROWS_AS(solve_dense({0, 0, 0, 0}, {1, 1}, 2), NumericError);
    CHECK_THROWS_AS(solve_dense({1, 2, 3}, {1, 2}, 2), NumericError);  // bad shape
}

TEST_CASE("surface weights match the oracle bordered system") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> nd(2, 8);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = nd(rng);
        std::vector<Point2> gauges = random_layout(n, rng);
        Point2 target = random_layout(1, rng)[0];
        SurfaceWeights sw = solve_weights(target, gauges);
        Eigen::VectorXd want = eigen_bordered_solve(target, gauges);
        REQUIRE(sw.weights.size() == n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(sw.weights[i] == doctest::Approx(want(i)).epsilon(1e-8));
            sum += sw.weights[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sw.lagrange == doctest::Approx(want(n)).epsilon(1e-6));
    }
}

TEST_CASE("the fitted surface is exact at gauge locations") {
    std::mt19937_64 rng(23);
    std::vector<Point2> gauges = random_layout(6, rng);
    for (std::size_t j = 0; j < gauges.size(); ++j) {
        SurfaceWeights sw = solve_weights(gauges[j], gauges);
        for (std::size_t i = 0; i < gauges.size(); ++i)
            CHECK(sw.weights[i] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-7));
    }
}

TEST_CASE("degenerate gauge sets") {
    CHECK_THROWS_AS(solve_weights({0, 0}, {}), DataError);
    SurfaceWeights one = solve_weights({5, 5}, {{100, 0}});
    CHECK(one.weights == std::vector<double>{1.0});
    CHECK(one.lagrange == 0.0);
    CHECK_THROWS_AS(solve_weights({0, 0}, {{10, 10}, {10, 10}}), NumericError);
}

TEST_CASE("pruning removes small weights and keeps the partition of unity") {
    std::mt19937_64 rng(29);
    int pruned_cases = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Point2> gauges = random_layout(7, rng);
        Point2 target = random_layout(1, rng)[0];
        SurfaceWeights raw = solve_weights(target, gauges);
        SurfaceWeights sw = prune_weights(target, gauges, raw);
        double sum = 0.0;
        for (double w : sw.weights) {
            if (sw.weights.size() > 1) CHECK(w >= 0.001);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        if (sw.gauge_idx.size() < raw.gauge_idx.size()) pruned_cases++;
        // Survivors must solve their own subsystem.
        std::vector<Point2> kept;
        for (std::size_t i : sw.gauge_idx) kept.push_back(gauges[i]);
        Eigen::VectorXd want = eigen_bordered_solve(target, kept);
        for (std::size_t i = 0; i < kept.size(); ++i)
            CHECK(sw.weights[i] == doctest::Approx(want(i)).epsilon(1e-7));
    }
    CHECK(pruned_cases > 0);  // scattered layouts do produce negative weights

    SUBCASE("an impossible threshold falls back to the dominant gauge") {
        std::vector<Point2> gauges = random_layout(5, rng);
        Point2 target{0, 0};
        SurfaceWeights sw =
            prune_weights(target, gauges, solve_weights(target, gauges), 10.0);
        CHECK(sw.gauge_idx.size() == 1);
        CHECK(sw.weights == std::vector<double>{1.0});
    }
}

namespace {

struct Fixture {
    SeriesTable table;
    GaugeCatalog catalog;
};

// Site at the origin with gauges at 1, 2, 3, 4 km east/north.
Fixture gauge_fixture(std::size_t n_rows, std::uint64_t seed) {
    Fixture fx;
    fx.catalog.entries.push_back({"SITE", 0, 0, GaugeKind::Station});
    fx.catalog.entries.push_back({"G1", 1000, 0, GaugeKind::ExternalGauge});
    fx.catalog.entries.push_back({"G2", 0, 2000, GaugeKind::ExternalGauge});
    fx.catalog.entries.push_back({"G3", 3000, 0, GaugeKind::ExternalGauge});
    fx.catalog.entries.push_back({"G4", 0, 4000, GaugeKind::ExternalGauge});

    fx.table.site_id = "SITE";
    fx.table.feature_names = {"G3", "G1", "G4", "G2"};  // deliberately shuffled
    fx.table.feature_origins.assign(4, ColumnOrigin::ExternalGauge);
    fx.table.features.assign(4, {});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        fx.table.timestamps.push_back(static_cast<std::int64_t>(r) * 1800);
        double v = u(rng);
        fx.table.target.push_back(v);
        fx.table.features[0].push_back(v + 0.5 * u(rng));  // G3: noisy
        fx.table.features[1].push_back(v);                 // G1: perfect copy
        fx.table.features[2].push_back(u(rng));            // G4: unrelated
        fx.table.features[3].push_back(v + 0.2 * u(rng));  // G2: mildly noisy
    }
    return fx;
}

}  // namespace

TEST_CASE("gauges are matched to catalog entries nearest first") {
    Fixture fx = gauge_fixture(4, 1);
    std::vector<GaugeRef> refs = gauges_for_site(fx.table, fx.catalog);
    REQUIRE(refs.size() == 4);
    CHECK(refs[0].gauge_id == "G1");
    CHECK(refs[1].gauge_id == "G2");
    CHECK(refs[2].gauge_id == "G3");
    CHECK(refs[3].gauge_id == "G4");
    CHECK(refs[0].column == 1);  // shuffled feature order resolved
    CHECK(refs[0].distance_m == doctest::Approx(1000.0));
    CHECK(refs[3].distance_m == doctest::Approx(4000.0));
}

TEST_CASE("gauge count selection minimizes holdout error, ties to fewer gauges") {
    Fixture fx = gauge_fixture(200, 5);
    std::vector<std::size_t> rows(fx.table.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    GaugeCountChoice choice =
        select_gauge_count(fx.table, fx.catalog, {1, 2, 3, 4}, rows);
    // The nearest gauge is an exact copy of the target, so k = 1 is perfect.
    CHECK(choice.chosen_k == 1);
    CHECK(choice.rmse_per_k[0] == doctest::Approx(0.0));
    for (std::size_t i = 1; i < 4; ++i) CHECK(choice.rmse_per_k[i] > 0.0);

    SUBCASE("a tie keeps the smaller count") {
        Fixture tie = gauge_fixture(100, 6);
        tie.table.features[3] = tie.table.features[1];  // G2 also a perfect copy
        GaugeCountChoice c = select_gauge_count(tie.table, tie.catalog, {1, 2}, rows =
                                                [&] {
                                                    std::vector<std::size_t> v(100);
                                                    std::iota(v.begin(), v.end(), 0);
                                                    return v;
                                                }());
        CHECK(c.rmse_per_k[0] == doctest::Approx(0.0));
        CHECK(c.rmse_per_k[1] == doctest::Approx(0.0));
        CHECK(c.chosen_k == 1);
    }
    SUBCASE("no evaluable candidate is an error") {
        CHECK_THROWS_AS(select_gauge_count(fx.table, fx.catalog, {9}, rows), DataError);
    }
}

TEST_CASE("baseline predictions re-solve over the present gauge subset") {
    Fixture fx = gauge_fixture(60, 9);
    fx.table.features[1][10] = kMissing;  // nearest gauge out for row 10
    for (std::size_t c = 0; c < 4; ++c) fx.table.features[c][11] = kMissing;

    std::vector<std::size_t> rows(fx.table.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    GaugeCountChoice choice =
        select_gauge_count(fx.table, fx.catalog, {2}, rows);
    FoldPlan folds = make_folds(fx.table.n_rows(), 5, 3);
    BaselineResult res = baseline_predict(fx.table, fx.catalog, choice, folds);

    CHECK(res.chosen_k == 2);
    CHECK(res.n_unpredictable == 1);
    CHECK(is_missing(res.predictions[11]));
    // Row 10: only G2 (column 3) present among the two nearest.
    CHECK(res.predictions[10] == doctest::Approx(fx.table.features[3][10]));
    // Fully present rows: hand-solved two-gauge weights.
    SurfaceWeights sw = prune_weights({0, 0}, {{1000, 0}, {0, 2000}},
                                      solve_weights({0, 0}, {{1000, 0}, {0, 2000}}));
    for (std::size_t r = 0; r < 5; ++r) {
        double want = 0.0;
        std::vector<std::size_t> cols = {1, 3};  // G1, G2 feature columns
        for (std::size_t i = 0; i < sw.gauge_idx.size(); ++i)
            want += sw.weights[i] * fx.table.features[cols[sw.gauge_idx[i]]][r];
        CHECK(res.predictions[r] == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(res.per_fold.size() == 5);
    CHECK(res.summary.rmse.mean > 0.0);

    SUBCASE("fold plan must cover the table") {
        FoldPlan bad = make_folds(10, 5, 0);
        CHECK_THROWS_AS(baseline_predict(fx.table, fx.catalog, choice, bad), DataError);
    }
}
