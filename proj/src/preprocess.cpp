#include "raingap/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ctime>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace raingap {

std::vector<std::size_t> FoldPlan::fold_rows(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::other_rows(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

FoldPlan make_folds(std::size_t n_rows, int n_folds, std::uint64_t seed) {
    if (n_folds < 1) throw ConfigError("make_folds: n_folds must be >= 1");
    if (n_rows < static_cast<std::size_t>(n_folds))
        throw DataError("make_folds: fewer rows than folds");
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignment.resize(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i)
        plan.assignment[order[i]] = static_cast<int>(i % n_folds);
    return plan;
}

MinMaxScaler MinMaxScaler::fit(const Matrix& train_rows) {
    MinMaxScaler s;
    s.min_.assign(train_rows.cols, 0.0);
    s.max_.assign(train_rows.cols, 0.0);
    for (std::size_t c = 0; c < train_rows.cols; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < train_rows.rows; ++r) {
            double v = train_rows.at(r, c);
            if (is_missing(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!std::isfinite(lo))
            throw DataError("MinMaxScaler: feature column " + std::to_string(c) +
                            " has no present training value");
        s.min_[c] = lo;
        s.max_[c] = hi;
    }
    return s;
}

Matrix MinMaxScaler::transform(const Matrix& rows) const {
    if (rows.cols != min_.size())
        throw DataError("MinMaxScaler: column count mismatch");
    Matrix out(rows.rows, rows.cols);
    for (std::size_t c = 0; c < rows.cols; ++c) {
        double range = max_[c] - min_[c];
        for (std::size_t r = 0; r < rows.rows; ++r) {
            double v = rows.at(r, c);
            if (is_missing(v))
                out.at(r, c) = kMissing;
            else
                out.at(r, c) = range == 0.0 ? 0.0 : (v - min_[c]) / range;
        }
    }
    return out;
}

std::string MinMaxScaler::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::vector<double>& xs) {
        for (double x : xs) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof bits);
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        }
    };
    mix(min_);
    mix(max_);
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::pair<double, double> encode_cyclic(int x, int max_x) {
    if (x < 1 || x > max_x)
        throw ConfigError("encode_cyclic: x out of range 1.." + std::to_string(max_x));
    double phase = 2.0 * std::numbers::pi * x / max_x;
    return {std::sin(phase), std::cos(phase)};
}

std::vector<std::size_t> complete_case_rows(const Matrix& X, const std::vector<double>& y) {
    if (!y.empty() && y.size() != X.rows)
        throw DataError("complete_case_rows: X/y length mismatch");
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < X.rows; ++r) {
        bool complete = y.empty() || !is_missing(y[r]);
        for (std::size_t c = 0; complete && c < X.cols; ++c)
            if (is_missing(X.at(r, c))) complete = false;
        if (complete) out.push_back(r);
    }
    return out;
}

std::vector<int> binary_target(const std::vector<double>& target) {
    std::vector<int> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (is_missing(target[i]))
            throw DataError("binary_target: missing target at row " + std::to_string(i));
        out[i] = target[i] > 0.0 ? 1 : 0;
    }
    return out;
}

void append_cyclic_features(SeriesTable& table) {
    std::vector<double> hs(table.n_rows()), hc(table.n_rows());
    std::vector<double> ms(table.n_rows()), mc(table.n_rows());
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        std::time_t t = static_cast<std::time_t>(table.timestamps[i]);
        std::tm tm{};
        gmtime_r(&t, &tm);
        auto [h_sin, h_cos] = encode_cyclic(tm.tm_hour + 1, 24);
        auto [m_sin, m_cos] = encode_cyclic(tm.tm_mon + 1, 12);
        hs[i] = h_sin;
        hc[i] = h_cos;
        ms[i] = m_sin;
        mc[i] = m_cos;
    }
    const char* names[4] = {"hour_sin", "hour_cos", "month_sin", "month_cos"};
    std::vector<double>* cols[4] = {&hs, &hc, &ms, &mc};
    for (int k = 0; k < 4; ++k) {
        if (table.feature_index(names[k]) >= 0)
            throw DataError(std::string("append_cyclic_features: column exists: ") + names[k]);
        table.feature_names.emplace_back(names[k]);
        table.feature_origins.push_back(ColumnOrigin::Cyclic);
        table.features.push_back(std::move(*cols[k]));
    }
}

Matrix rows_to_matrix(const SeriesTable& table, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& feature_cols) {
    Matrix out(rows.size(), feature_cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < feature_cols.size(); ++c)
            out.at(r, c) = table.features[feature_cols[c]][rows[r]];
    return out;
}

}  // namespace raingap
