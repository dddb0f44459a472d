#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "raingap/tuning.hpp"

using namespace raingap;

namespace {

SeriesTable separable_table(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SeriesTable t;
    t.site_id = "T";
    t.feature_names = {"a", "b"};
    t.feature_origins = {ColumnOrigin::StationSensor, ColumnOrigin::StationSensor};
    t.features.assign(2, {});
    for (std::size_t r = 0; r < n; ++r) {
        t.timestamps.push_back(static_cast<std::int64_t>(r) * 1800);
        double a = u(rng), b = u(rng);
        t.features[0].push_back(a);
        t.features[1].push_back(b);
        // Wide-margin rule: rain iff a > 0.5, amplitude proportional to a.
        t.target.push_back(a > 0.55 ? a : (a > 0.45 ? (a > 0.5 ? 0.7 : 0.0) : 0.0));
    }
    return t;
}

}  // namespace

TEST_CASE("grid sizes match the published table") {
    CHECK(grid_for(Family::Boosting, Task::Classify, GridKind::Full).size() == 18);
    CHECK(grid_for(Family::Knn, Task::Classify, GridKind::Full).size() == 12);
    CHECK(grid_for(Family::Forest, Task::Classify, GridKind::Full).size() == 36);
    CHECK(grid_for(Family::Svm, Task::Classify, GridKind::Full).size() == 24);
    CHECK(grid_for(Family::Network, Task::Classify, GridKind::Full).size() == 1);
    CHECK(grid_for(Family::Network, Task::Regress, GridKind::Full).size() == 3);
    for (Family f : kFamilyOrder)
        for (Task t : {Task::Classify, Task::Regress})
            CHECK(grid_for(f, t, GridKind::Desk).size() == 1);
}

TEST_CASE("grid contents: fixed values, enumeration order, open depth") {
    auto boost = grid_for(Family::Boosting, Task::Regress, GridKind::Full);
    for (const auto& p : boost) {
        CHECK(p.num.at("learning_rate") == 0.1);
        CHECK(p.num.at("n_rounds") == 100);
    }
    CHECK(boost.front().num.at("min_child_weight") == 1);
    CHECK(boost.front().num.at("subsample") == 0.6);
    CHECK(boost.front().num.at("max_depth") == 8);
    CHECK(boost.back().num.at("min_child_weight") == 10);
    CHECK(boost.back().num.at("max_depth") == 16);

    auto forest = grid_for(Family::Forest, Task::Classify, GridKind::Full);
    CHECK(std::isinf(forest.front().num.at("max_depth")));  // unbounded first

    auto svm = grid_for(Family::Svm, Task::Classify, GridKind::Full);
    CHECK(svm.front().cat.at("kernel") == "linear");
    CHECK(svm.front().num.at("C") == 10);
    CHECK(svm.front().num.at("gamma") == 0.0001);

    auto knn = grid_for(Family::Knn, Task::Classify, GridKind::Desk);
    CHECK(knn.front().num.at("n_neighbours") == 9);
    CHECK(knn.front().cat.at("algorithm") == "kd_tree");
}

TEST_CASE("grid kind names round trip") {
    CHECK(grid_kind_from_name(grid_kind_name(GridKind::Full)) == GridKind::Full);
    CHECK(grid_kind_from_name(grid_kind_name(GridKind::Desk)) == GridKind::Desk);
    CHECK_THROWS_AS(grid_kind_from_name("medium"), ConfigError);
}

TEST_CASE("tuned store lookup and persistence") {
    TunedStore store;
    store.split_seed = 42;
    TunedEntry e;
    e.params.num = {{"n_neighbours", 7}, {"max_depth", std::numeric_limits<double>::infinity()}};
    e.params.cat = {{"algorithm", "kd_tree"}};
    e.score = 0.93;
    store.put("S01", Family::Knn, Task::Classify, e);

    CHECK(store.contains("S01", Family::Knn, Task::Classify));
    CHECK_FALSE(store.contains("S01", Family::Knn, Task::Regress));
    CHECK_FALSE(store.contains("S02", Family::Knn, Task::Classify));
    CHECK_THROWS_AS(store.lookup("S02", Family::Knn, Task::Classify), ConfigError);

    SUBCASE("json round trip preserves infinity and score") {
        TunedStore back = TunedStore::from_json(store.to_json());
        CHECK(back.split_seed == 42);
        const TunedEntry& got = back.lookup("S01", Family::Knn, Task::Classify);
        CHECK(got.score == 0.93);
        CHECK(got.params.num.at("n_neighbours") == 7);
        CHECK(std::isinf(got.params.num.at("max_depth")));
        CHECK(got.params.cat.at("algorithm") == "kd_tree");
    }
    SUBCASE("file round trip") {
        std::string path = "tuned_store_test.json";
        store.save(path);
        TunedStore back = TunedStore::load(path);
        CHECK(back.to_json() == store.to_json());
        std::remove(path.c_str());
        CHECK_THROWS_AS(TunedStore::load("no/such/file.json"), DataError);
    }
}

TEST_CASE("grid search is deterministic and reports every point") {
    SeriesTable t = separable_table(300, 1);
    GridSearchResult a = grid_search(t, Family::Knn, Task::Classify, 7, GridKind::Full, 2);
    GridSearchResult b = grid_search(t, Family::Knn, Task::Classify, 7, GridKind::Full, 4);
    CHECK(a.all_scores.size() == 12);
    CHECK(a.all_scores == b.all_scores);
    CHECK(a.params.describe() == b.params.describe());
    CHECK(a.score == *std::max_element(a.all_scores.begin(), a.all_scores.end()));
    for (double s : a.all_scores) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
    CHECK(a.score > 0.9);  // wide-margin rule should be easy
}

TEST_CASE("score ties go to the first grid point in enumeration order") {
    // A wide empty margin around the boundary makes every neighbour count
    // score 1.0, so the tie must fall to the first enumerated point.
    SeriesTable t = separable_table(400, 2);
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        double& a = t.features[0][r];
        a = a < 0.5 ? a * 0.6 : 0.7 + (a - 0.5) * 0.6;  // push off the boundary
        t.target[r] = a > 0.5 ? 1.0 : 0.0;
    }
    GridSearchResult res = grid_search(t, Family::Knn, Task::Classify, 3, GridKind::Full);
    auto grid = grid_for(Family::Knn, Task::Classify, GridKind::Full);
    REQUIRE(res.score == 1.0);
    CHECK(res.params.describe() == grid.front().describe());
}

TEST_CASE("regression tuning uses rain rows and clips negatives") {
    SeriesTable t = separable_table(400, 3);
    GridSearchResult res = grid_search(t, Family::Knn, Task::Regress, 5, GridKind::Desk);
    CHECK(res.all_scores.size() == 1);
    CHECK(res.score > 0.5);  // amplitude is a clean function of feature a

    SUBCASE("too few rain rows is an error") {
        SeriesTable dry = separable_table(40, 4);
        for (double& v : dry.target) v = 0.0;
        dry.target[0] = 0.5;
        CHECK_THROWS_AS(grid_search(dry, Family::Knn, Task::Regress, 5, GridKind::Desk),
                        DataError);
    }
}

TEST_CASE("pooled site tag column is excluded from tuning features") {
    SeriesTable t = separable_table(300, 6);
    GridSearchResult plain = grid_search(t, Family::Knn, Task::Classify, 9, GridKind::Desk);

    SeriesTable tagged = t;
    tagged.feature_names.push_back(kSiteTagColumn);
    tagged.feature_origins.push_back(ColumnOrigin::SiteTag);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<double> garbage(t.n_rows());
    for (double& v : garbage) v = u(rng);
    tagged.features.push_back(garbage);

    GridSearchResult with_tag =
        grid_search(tagged, Family::Knn, Task::Classify, 9, GridKind::Desk);
    CHECK(with_tag.all_scores == plain.all_scores);
    CHECK(with_tag.params.describe() == plain.params.describe());
}

TEST_CASE("a table with no usable features is rejected") {
    SeriesTable t;
    t.site_id = "X";
    t.timestamps = {0, 1800};
    t.target = {0.0, 0.1};
    CHECK_THROWS_AS(grid_search(t, Family::Knn, Task::Classify, 0, GridKind::Desk),
                    DataError);
}
