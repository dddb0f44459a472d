#include "raingap/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "raingap/metrics.hpp"
#include "raingap/preprocess.hpp"

namespace raingap {

using nlohmann::json;

std::string grid_kind_name(GridKind g) { return g == GridKind::Full ? "full" : "desk"; }

GridKind grid_kind_from_name(const std::string& s) {
    if (s == "full") return GridKind::Full;
    if (s == "desk") return GridKind::Desk;
    throw ConfigError("unknown grid kind: " + s + " (expected full|desk)");
}

std::vector<ParamAssignment> grid_for(Family family, Task task, GridKind kind) {
    const bool desk = kind == GridKind::Desk;
    std::vector<ParamAssignment> grid;
    auto inf = std::numeric_limits<double>::infinity();

    switch (family) {
        case Family::Boosting: {
            std::vector<double> mcw = desk ? std::vector<double>{1} : std::vector<double>{1, 5, 10};
            std::vector<double> sub = desk ? std::vector<double>{1} : std::vector<double>{0.6, 1};
            std::vector<double> depth = desk ? std::vector<double>{8} : std::vector<double>{8, 12, 16};
            for (double w : mcw)
                for (double s : sub)
                    for (double d : depth) {
                        ParamAssignment p;
                        p.num = {{"min_child_weight", w}, {"subsample", s},
                                 {"max_depth", d},        {"learning_rate", 0.1},
                                 {"n_rounds", 100}};
                        grid.push_back(std::move(p));
                    }
            break;
        }
        case Family::Knn: {
            std::vector<double> ks = desk ? std::vector<double>{9} : std::vector<double>{5, 7, 9};
            std::vector<double> leaf = desk ? std::vector<double>{3} : std::vector<double>{1, 3};
            std::vector<std::string> algos =
                desk ? std::vector<std::string>{"kd_tree"}
                     : std::vector<std::string>{"auto", "kd_tree"};
            for (double k : ks)
                for (double l : leaf)
                    for (const auto& a : algos) {
                        ParamAssignment p;
                        p.num = {{"n_neighbours", k}, {"leaf_size", l}};
                        p.cat = {{"algorithm", a}};
                        grid.push_back(std::move(p));
                    }
            break;
        }
        case Family::Forest: {
            std::vector<double> depth = desk ? std::vector<double>{40}
                                             : std::vector<double>{inf, 40, 80};
            std::vector<double> est = desk ? std::vector<double>{100}
                                           : std::vector<double>{100, 500, 1000};
            std::vector<double> split = desk ? std::vector<double>{2} : std::vector<double>{2, 5};
            std::vector<double> leaf = desk ? std::vector<double>{1} : std::vector<double>{1, 3};
            for (double d : depth)
                for (double e : est)
                    for (double s : split)
                        for (double l : leaf) {
                            ParamAssignment p;
                            p.num = {{"max_depth", d},
                                     {"n_estimators", e},
                                     {"min_samples_split", s},
                                     {"min_samples_leaf", l}};
                            grid.push_back(std::move(p));
                        }
            break;
        }
        case Family::Svm: {
            std::vector<double> cs = desk ? std::vector<double>{10}
                                          : std::vector<double>{10, 100, 1000};
            std::vector<double> gammas = desk ? std::vector<double>{0.1}
                                              : std::vector<double>{0.0001, 0.001, 0.1, 1};
            std::vector<std::string> kernels = desk ? std::vector<std::string>{"rbf"}
                                                    : std::vector<std::string>{"linear", "rbf"};
            for (double c : cs)
                for (double g : gammas)
                    for (const auto& k : kernels) {
                        ParamAssignment p;
                        p.num = {{"C", c}, {"gamma", g}};
                        p.cat = {{"kernel", k}};
                        grid.push_back(std::move(p));
                    }
            break;
        }
        case Family::Network: {
            std::vector<double> layers =
                task == Task::Classify ? std::vector<double>{2}
                : desk                 ? std::vector<double>{2}
                                       : std::vector<double>{2, 8, 20};
            for (double l : layers) {
                ParamAssignment p;
                p.num = {{"hidden_layers", l}};
                grid.push_back(std::move(p));
            }
            break;
        }
    }
    return grid;
}

namespace {

json param_to_json(const ParamAssignment& p) {
    json out;
    out["num"] = json::object();
    for (const auto& [k, v] : p.num) {
        if (std::isinf(v))
            out["num"][k] = "inf";
        else
            out["num"][k] = v;
    }
    out["cat"] = p.cat;
    return out;
}

ParamAssignment param_from_json(const json& j) {
    ParamAssignment p;
    for (const auto& [k, v] : j.at("num").items())
        p.num[k] = v.is_string() ? std::numeric_limits<double>::infinity()
                                 : v.get<double>();
    for (const auto& [k, v] : j.at("cat").items()) p.cat[k] = v.get<std::string>();
    return p;
}

}  // namespace

std::string TunedStore::key(const std::string& site, Family family, Task task) {
    return site + "|" + family_name(family) + "|" + task_name(task);
}

void TunedStore::put(const std::string& site, Family family, Task task, TunedEntry entry) {
    entries_[key(site, family, task)] = std::move(entry);
}

const TunedEntry& TunedStore::lookup(const std::string& site, Family family,
                                     Task task) const {
    auto it = entries_.find(key(site, family, task));
    if (it == entries_.end())
        throw ConfigError("TunedStore: no tuned parameters for " + key(site, family, task));
    return it->second;
}

bool TunedStore::contains(const std::string& site, Family family, Task task) const {
    return entries_.count(key(site, family, task)) > 0;
}

std::string TunedStore::to_json() const {
    json out;
    out["split_seed"] = split_seed;
    out["grid_version"] = grid_version;
    out["entries"] = json::object();
    for (const auto& [k, e] : entries_) {
        out["entries"][k] = {{"params", param_to_json(e.params)}, {"score", e.score}};
    }
    return out.dump(2);
}

TunedStore TunedStore::from_json(const std::string& text) {
    json j = json::parse(text);
    TunedStore store;
    store.split_seed = j.at("split_seed").get<std::uint64_t>();
    store.grid_version = j.at("grid_version").get<std::string>();
    for (const auto& [k, e] : j.at("entries").items())
        store.entries_[k] = {param_from_json(e.at("params")), e.at("score").get<double>()};
    return store;
}

void TunedStore::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << to_json() << '\n';
}

TunedStore TunedStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json(text);
}

GridSearchResult grid_search(const SeriesTable& table, Family family, Task task,
                             std::uint64_t seed, GridKind kind, unsigned threads) {
    // Feature columns exclude the pooled site tag.
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table.n_features(); ++c)
        if (table.feature_names[c] != kSiteTagColumn) cols.push_back(c);
    if (cols.empty()) throw DataError("grid_search: table has no feature columns");

    Matrix all = rows_to_matrix(
        table, [&] {
            std::vector<std::size_t> idx(table.n_rows());
            std::iota(idx.begin(), idx.end(), 0);
            return idx;
        }(), cols);
    std::vector<std::size_t> usable = complete_case_rows(all, table.target);

    // Regression tunes on rain rows only.
    std::vector<std::size_t> rows;
    for (std::size_t r : usable)
        if (task == Task::Classify || table.target[r] > 0.0) rows.push_back(r);
    if (task == Task::Regress && rows.size() < 20)
        throw DataError("grid_search: fewer than 20 complete rain rows");
    if (rows.size() < 10) throw DataError("grid_search: too few complete rows");

    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::size_t n_train = static_cast<std::size_t>(std::lround(0.7 * rows.size()));
    n_train = std::clamp<std::size_t>(n_train, 1, rows.size() - 1);
    std::vector<std::size_t> train_rows(rows.begin(), rows.begin() + n_train);
    std::vector<std::size_t> test_rows(rows.begin() + n_train, rows.end());

    Matrix X_train_raw = rows_to_matrix(table, train_rows, cols);
    Matrix X_test_raw = rows_to_matrix(table, test_rows, cols);
    MinMaxScaler scaler = MinMaxScaler::fit(X_train_raw);
    Matrix X_train = scaler.transform(X_train_raw);
    Matrix X_test = scaler.transform(X_test_raw);

    std::vector<double> y_train(train_rows.size()), y_test(test_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        double t = table.target[train_rows[i]];
        y_train[i] = task == Task::Classify ? (t > 0.0 ? 1.0 : 0.0) : t;
    }
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
        double t = table.target[test_rows[i]];
        y_test[i] = task == Task::Classify ? (t > 0.0 ? 1.0 : 0.0) : t;
    }

    std::vector<ParamAssignment> grid = grid_for(family, task, kind);
    GridSearchResult result;
    result.all_scores.assign(grid.size(), -std::numeric_limits<double>::infinity());
    result.failures.assign(grid.size(), "");

    parallel_for_blocks(grid.size(), effective_threads(threads),
                        [&](std::size_t begin, std::size_t end) {
                            for (std::size_t g = begin; g < end; ++g) {
                                LearnerSpec spec{family, task, grid[g], seed};
                                try {
                                    auto model = fit(spec, X_train, y_train, 1);
                                    std::vector<double> pred = model->predict(X_test);
                                    if (task == Task::Classify) {
                                        std::size_t hits = 0;
                                        for (std::size_t i = 0; i < pred.size(); ++i)
                                            if ((pred[i] > 0.5) == (y_test[i] > 0.5)) hits++;
                                        result.all_scores[g] =
                                            static_cast<double>(hits) / pred.size();
                                    } else {
                                        for (double& p : pred) p = std::max(0.0, p);
                                        auto [r2, rmse] = regression_metrics(y_test, pred);
                                        (void)rmse;
                                        result.all_scores[g] =
                                            r2 ? *r2 : -std::numeric_limits<double>::infinity();
                                    }
                                } catch (const std::exception& e) {
                                    result.failures[g] = e.what();
                                }
                            }
                        });

    std::size_t best = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!result.failures[g].empty()) continue;
        if (best == grid.size() || result.all_scores[g] > result.all_scores[best]) best = g;
    }
    if (best == grid.size()) {
        std::string diag = "grid_search: every grid point failed:";
        for (std::size_t g = 0; g < grid.size(); ++g)
            diag += "\n  [" + std::to_string(g) + "] " + grid[g].describe() + ": " +
                    result.failures[g];
        throw DataError(diag);
    }
    result.params = grid[best];
    result.score = result.all_scores[best];
    return result;
}

}  // namespace raingap
