#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "raingap/csvio.hpp"
#include "raingap/preprocess.hpp"

using namespace raingap;

TEST_CASE("cyclic encoding landmarks") {
    auto [s6, c6] = encode_cyclic(6, 24);
    CHECK(s6 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c6 == doctest::Approx(0.0).epsilon(1e-12));
    auto [s24, c24] = encode_cyclic(24, 24);
    CHECK(s24 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c24 == doctest::Approx(1.0).epsilon(1e-12));
    auto [s6m, c6m] = encode_cyclic(6, 12);
    CHECK(s6m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c6m == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("cyclic encoding stays on the unit circle and rejects bad input") {
    for (int x = 1; x <= 24; ++x) {
        auto [s, c] = encode_cyclic(x, 24);
        CHECK(s * s + c * c == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(encode_cyclic(0, 24), ConfigError);
    CHECK_THROWS_AS(encode_cyclic(25, 24), ConfigError);
}

TEST_CASE("min-max scaler endpoints, interior point, extrapolation") {
    Matrix train(3, 1);
    train.at(0, 0) = 2.0;
    train.at(1, 0) = 4.0;
    train.at(2, 0) = 10.0;
    MinMaxScaler s = MinMaxScaler::fit(train);

    Matrix q(4, 1);
    q.at(0, 0) = 2.0;
    q.at(1, 0) = 10.0;
    q.at(2, 0) = 4.0;
    q.at(3, 0) = 12.0;
    Matrix t = s.transform(q);
    CHECK(t.at(0, 0) == doctest::Approx(0.0));
    CHECK(t.at(1, 0) == doctest::Approx(1.0));
    CHECK(t.at(2, 0) == doctest::Approx(0.25));
    CHECK(t.at(3, 0) == doctest::Approx(1.25));  // unclipped
}

TEST_CASE("scaler handles constant and missing-valued columns") {
    Matrix train(3, 2);
    train.at(0, 0) = 5.0;
    train.at(1, 0) = 5.0;
    train.at(2, 0) = 5.0;
    train.at(0, 1) = kMissing;
    train.at(1, 1) = 1.0;
    train.at(2, 1) = 3.0;
    MinMaxScaler s = MinMaxScaler::fit(train);
    Matrix t = s.transform(train);
    CHECK(t.at(0, 0) == doctest::Approx(0.0));  // constant -> 0
    CHECK(is_missing(t.at(0, 1)));              // missing passes through
    CHECK(t.at(2, 1) == doctest::Approx(1.0));

    Matrix all_missing(2, 1, kMissing);
    CHECK_THROWS_AS(MinMaxScaler::fit(all_missing), DataError);
}

TEST_CASE("scaler fit ignores test rows entirely") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    Matrix train(40, 4);
    for (double& v : train.data) v = u(rng);
    MinMaxScaler fitted = MinMaxScaler::fit(train);
    std::string before = fitted.digest();

    // Perturbing any would-be test data cannot touch the fitted parameters.
    Matrix test(10, 4);
    for (double& v : test.data) v = u(rng);
    test.at(3, 2) = 1e9;
    (void)fitted.transform(test);
    CHECK(fitted.digest() == before);
    MinMaxScaler refit = MinMaxScaler::fit(train);
    CHECK(refit.digest() == before);
}

TEST_CASE("complete-case extraction") {
    Matrix X(3, 2);
    X.at(0, 0) = 1.0;
    X.at(0, 1) = 2.0;
    X.at(1, 0) = kMissing;
    X.at(1, 1) = 2.0;
    X.at(2, 0) = 3.0;
    X.at(2, 1) = 4.0;
    std::vector<double> y = {1.0, 1.0, kMissing};
    CHECK(complete_case_rows(X, y) == std::vector<std::size_t>{0});
    CHECK(complete_case_rows(X, {}) == std::vector<std::size_t>{0, 2});

    SUBCASE("fully complete table is identity") {
        Matrix full(4, 2, 1.0);
        CHECK(complete_case_rows(full, {}).size() == 4);
    }
    SUBCASE("random table matches a row-scan oracle") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Matrix R(500, 10);
        for (double& v : R.data) v = u(rng) < 0.05 ? kMissing : u(rng);
        std::vector<std::size_t> got = complete_case_rows(R, {});
        std::vector<std::size_t> want;
        for (std::size_t r = 0; r < R.rows; ++r) {
            bool ok = true;
            for (std::size_t c = 0; c < R.cols; ++c)
                if (std::isnan(R.at(r, c))) ok = false;
            if (ok) want.push_back(r);
        }
        CHECK(got == want);
    }
}

TEST_CASE("binary target conversion") {
    std::vector<int> b = binary_target({0.0, 0.2, 0.0, 5.0});
    CHECK(b == std::vector<int>{0, 1, 0, 1});
    CHECK_THROWS_AS(binary_target({0.0, kMissing}), DataError);
}

TEST_CASE("fold plans partition the rows") {
    SUBCASE("ten rows into five folds of two") {
        FoldPlan p = make_folds(10, 5, 3);
        for (int f = 0; f < 5; ++f) CHECK(p.fold_rows(f).size() == 2);
    }
    SUBCASE("deterministic per seed") {
        CHECK(make_folds(100, 5, 7).assignment == make_folds(100, 5, 7).assignment);
        CHECK(make_folds(100, 5, 7).assignment != make_folds(100, 5, 8).assignment);
    }
    SUBCASE("1003 rows: sizes in {200, 201}, disjoint, complete") {
        FoldPlan p = make_folds(1003, 5, 1);
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (int f = 0; f < 5; ++f) {
            auto rows = p.fold_rows(f);
            CHECK((rows.size() == 200 || rows.size() == 201));
            total += rows.size();
            for (std::size_t r : rows) CHECK(seen.insert(r).second);
        }
        CHECK(total == 1003);
        CHECK(p.fold_rows(0).size() + p.other_rows(0).size() == 1003);
    }
    SUBCASE("fewer rows than folds rejected") {
        CHECK_THROWS_AS(make_folds(3, 5, 0), DataError);
    }
}

TEST_CASE("cyclic feature columns from timestamps") {
    SeriesTable t;
    t.site_id = "X";
    // 2020-06-15 10:00 and 10:30 UTC share one hourly encoding.
    t.timestamps = {1592215200, 1592217000};
    t.target = {0.0, 0.1};
    append_cyclic_features(t);
    REQUIRE(t.n_features() == 4);
    CHECK(t.feature_names[0] == "hour_sin");
    CHECK(t.feature_origins[0] == ColumnOrigin::Cyclic);
    auto [hs, hc] = encode_cyclic(11, 24);  // hour component 10 -> x = 11
    CHECK(t.features[0][0] == doctest::Approx(hs));
    CHECK(t.features[1][0] == doctest::Approx(hc));
    CHECK(t.features[0][1] == doctest::Approx(hs));  // same hour, later half
    auto [ms, mc] = encode_cyclic(6, 12);  // June
    CHECK(t.features[2][0] == doctest::Approx(ms));
    CHECK(t.features[3][0] == doctest::Approx(mc));
    CHECK_THROWS_AS(append_cyclic_features(t), DataError);  // already present
}

TEST_CASE("rows_to_matrix extracts the requested cells") {
    SeriesTable t;
    t.site_id = "X";
    t.timestamps = {0, 1800, 3600};
    t.target = {0.0, 0.0, 0.0};
    t.feature_names = {"a", "b"};
    t.feature_origins = {ColumnOrigin::StationSensor, ColumnOrigin::StationSensor};
    t.features = {{1.0, 2.0, 3.0}, {4.0, kMissing, 6.0}};
    Matrix m = rows_to_matrix(t, {2, 0}, {1});
    CHECK(m.rows == 2);
    CHECK(m.cols == 1);
    CHECK(m.at(0, 0) == doctest::Approx(6.0));
    CHECK(m.at(1, 0) == doctest::Approx(4.0));
}
