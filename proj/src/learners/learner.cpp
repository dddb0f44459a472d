#include "raingap/learners/learner.hpp"

#include <cmath>
#include <sstream>

#include "raingap/learners/boosting.hpp"
#include "raingap/learners/forest.hpp"
#include "raingap/learners/knn.hpp"
#include "raingap/learners/network.hpp"
#include "raingap/learners/svm.hpp"

namespace raingap {

std::string family_name(Family f) {
    switch (f) {
        case Family::Boosting: return "boosting";
        case Family::Forest: return "forest";
        case Family::Knn: return "knn";
        case Family::Svm: return "svm";
        case Family::Network: return "network";
    }
    throw ConfigError("unknown family");
}

Family family_from_name(const std::string& s) {
    if (s == "boosting") return Family::Boosting;
    if (s == "forest") return Family::Forest;
    if (s == "knn") return Family::Knn;
    if (s == "svm") return Family::Svm;
    if (s == "network") return Family::Network;
    throw ConfigError("unknown family: " + s);
}

std::string task_name(Task t) { return t == Task::Classify ? "classify" : "regress"; }

Task task_from_name(const std::string& s) {
    if (s == "classify") return Task::Classify;
    if (s == "regress") return Task::Regress;
    throw ConfigError("unknown task: " + s);
}

double ParamAssignment::get_num(const std::string& key, double fallback) const {
    auto it = num.find(key);
    return it == num.end() ? fallback : it->second;
}

std::string ParamAssignment::get_cat(const std::string& key,
                                     const std::string& fallback) const {
    auto it = cat.find(key);
    return it == cat.end() ? fallback : it->second;
}

std::string ParamAssignment::describe() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : num) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    for (const auto& [k, v] : cat) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    return os.str();
}

void FittedModel::check_schema(const Matrix& X) const {
    if (X.cols != n_inputs())
        throw DataError("predict: expected " + std::to_string(n_inputs()) +
                        " features, got " + std::to_string(X.cols));
    if (X.has_missing()) throw DataError("predict: input contains missing cells");
}

void check_training_inputs(const Matrix& X, const std::vector<double>& y, Task task) {
    if (X.rows == 0 || X.cols == 0) throw DataError("fit: empty training matrix");
    if (y.size() != X.rows) throw DataError("fit: X/y length mismatch");
    if (X.has_missing()) throw DataError("fit: training matrix contains missing cells");
    for (double v : y)
        if (is_missing(v)) throw DataError("fit: missing target value");
    if (task == Task::Classify) {
        bool has0 = false, has1 = false;
        for (double v : y) {
            if (v != 0.0 && v != 1.0)
                throw DataError("fit: classification target must be 0/1");
            (v > 0.5 ? has1 : has0) = true;
        }
        if (!has0 || !has1)
            throw DataError("fit: single-class training set, model would be degenerate");
    }
}

std::unique_ptr<FittedModel> fit(const LearnerSpec& spec, const Matrix& X,
                                 const std::vector<double>& y, unsigned threads) {
    switch (spec.family) {
        case Family::Boosting: return BoostingModel::fit_model(spec, X, y);
        case Family::Forest: return ForestModel::fit_model(spec, X, y, threads);
        case Family::Knn: return KnnModel::fit_model(spec, X, y);
        case Family::Svm: return SvmModel::fit_model(spec, X, y);
        case Family::Network: return NetworkModel::fit_model(spec, X, y);
    }
    throw ConfigError("fit: unknown family");
}

}  // namespace raingap
