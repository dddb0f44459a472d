#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "raingap/imputer.hpp"

using namespace raingap;

namespace {

// Three strongly related columns plus one independent: recovery quality is
// measurable against the mean-fill fallback.
Matrix correlated_data(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.02);
    Matrix X(n, 4);
    for (std::size_t r = 0; r < n; ++r) {
        double base = u(rng);
        X.at(r, 0) = base;
        X.at(r, 1) = 2.0 * base + noise(rng);
        X.at(r, 2) = 1.0 - base + noise(rng);
        X.at(r, 3) = u(rng);
    }
    return X;
}

}  // namespace

TEST_CASE("present cells pass through untouched, holes are filled") {
    std::mt19937_64 rng(3);
    Matrix train = correlated_data(200, rng);
    ImputerModel model = ImputerModel::fit(train, {.n_trees = 20, .seed = 1});

    Matrix test = correlated_data(30, rng);
    Matrix holed = test;
    holed.at(4, 1) = kMissing;
    holed.at(7, 2) = kMissing;
    holed.at(7, 3) = kMissing;
    Matrix filled = model.impute(holed);

    for (std::size_t r = 0; r < 30; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            if ((r == 4 && c == 1) || (r == 7 && (c == 2 || c == 3))) {
                CHECK_FALSE(is_missing(filled.at(r, c)));
            } else {
                CHECK(filled.at(r, c) == test.at(r, c));  // bitwise passthrough
            }
        }

    SUBCASE("a hole-free matrix is returned verbatim") {
        Matrix out = model.impute(test);
        CHECK(out.data == test.data);
    }
}

TEST_CASE("correlated columns are recovered far better than mean fill") {
    std::mt19937_64 rng(17);
    Matrix train = correlated_data(400, rng);
    ImputerModel model = ImputerModel::fit(train, {.n_trees = 30, .seed = 2});

    Matrix truth = correlated_data(100, rng);
    Matrix holed = truth;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t r = 0; r < 100; ++r)
        if (u(rng) < 0.3) {
            std::size_t c = r % 3;  // only the correlated columns
            holed.at(r, c) = kMissing;
            cells.emplace_back(r, c);
        }
    REQUIRE(cells.size() > 10);
    Matrix filled = model.impute(holed);

    double imp_sse = 0.0, mean_sse = 0.0;
    for (auto [r, c] : cells) {
        double t = truth.at(r, c);
        imp_sse += (filled.at(r, c) - t) * (filled.at(r, c) - t);
        double m = model.column_means()[c];
        mean_sse += (m - t) * (m - t);
    }
    CHECK(imp_sse < 0.2 * mean_sse);
}

TEST_CASE("columns are visited in ascending training missingness") {
    Matrix train(20, 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : train.data) v = u(rng);
    // col 0: 4 missing, col 1: none, col 2: 2 missing
    for (std::size_t r = 0; r < 4; ++r) train.at(r, 0) = kMissing;
    train.at(10, 2) = kMissing;
    train.at(11, 2) = kMissing;
    ImputerModel model = ImputerModel::fit(train, {.n_trees = 5, .seed = 0});
    CHECK(model.visit_order() == std::vector<std::size_t>{1, 2, 0});

    SUBCASE("column means skip missing entries") {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 4; r < 20; ++r) {
            sum += train.at(r, 0);
            n++;
        }
        CHECK(model.column_means()[0] == doctest::Approx(sum / n).epsilon(1e-12));
    }
}

TEST_CASE("ties in missingness break on column name") {
    Matrix train(10, 3);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : train.data) v = u(rng);
    ImputerModel model =
        ImputerModel::fit(train, {.n_trees = 5, .seed = 0}, {"zeta", "alpha", "mid"});
    CHECK(model.visit_order() == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("imputation is deterministic and thread-count independent") {
    std::mt19937_64 rng(21);
    Matrix train = correlated_data(150, rng);
    Matrix holed = correlated_data(40, rng);
    for (std::size_t r = 0; r < 40; r += 3) holed.at(r, r % 4) = kMissing;

    ImputerModel a = ImputerModel::fit(train, {.n_trees = 15, .seed = 9}, {}, 1);
    ImputerModel b = ImputerModel::fit(train, {.n_trees = 15, .seed = 9}, {}, 4);
    CHECK(a.digest() == b.digest());
    CHECK(a.impute(holed, 1).data == b.impute(holed, 4).data);

    ImputerModel c = ImputerModel::fit(train, {.n_trees = 15, .seed = 10});
    CHECK(a.digest() != c.digest());
}

TEST_CASE("fitted state never depends on test rows") {
    std::mt19937_64 rng(33);
    Matrix train = correlated_data(120, rng);
    ImputerModel model = ImputerModel::fit(train, {.n_trees = 10, .seed = 4});
    std::string before = model.digest();

    Matrix wild = correlated_data(25, rng);
    for (double& v : wild.data) v *= 1e6;
    wild.at(0, 0) = kMissing;
    (void)model.impute(wild);
    CHECK(model.digest() == before);
}

TEST_CASE("degenerate inputs are rejected") {
    Matrix one_col(5, 1, 1.0);
    CHECK_THROWS_AS(ImputerModel::fit(one_col, {}), DataError);
    CHECK_THROWS_AS(ImputerModel::fit(Matrix(), {}), DataError);

    Matrix dead(5, 2, 1.0);
    for (std::size_t r = 0; r < 5; ++r) dead.at(r, 1) = kMissing;
    CHECK_THROWS_AS(ImputerModel::fit(dead, {}), DataError);  // empty column

    Matrix ok(5, 2, 1.0);
    CHECK_THROWS_AS(ImputerModel::fit(ok, {}, {"only-one"}), DataError);
    ImputerModel model = ImputerModel::fit(ok, {.n_trees = 3});
    Matrix wrong(2, 3, 0.0);
    CHECK_THROWS_AS(model.impute(wrong), DataError);
}
