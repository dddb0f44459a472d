#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "raingap/common.hpp"

namespace raingap {

enum class Family { Boosting, Forest, Knn, Svm, Network };
enum class Task { Classify, Regress };

std::string family_name(Family f);
Family family_from_name(const std::string& s);
std::string task_name(Task t);
Task task_from_name(const std::string& s);

// Fixed family order used for deterministic tie-breaking throughout.
inline const std::vector<Family> kFamilyOrder = {
    Family::Boosting, Family::Forest, Family::Knn, Family::Svm, Family::Network};

// One concrete hyperparameter assignment. Numeric values live in `num`
// (infinity encodes an unlimited depth), string-valued ones in `cat`.
struct ParamAssignment {
    std::map<std::string, double> num;
    std::map<std::string, std::string> cat;

    double get_num(const std::string& key, double fallback) const;
    std::string get_cat(const std::string& key, const std::string& fallback) const;
    std::string describe() const;

    bool operator==(const ParamAssignment&) const = default;
};

struct LearnerSpec {
    Family family = Family::Forest;
    Task task = Task::Classify;
    ParamAssignment params;
    std::uint64_t seed = 0;
};

// Immutable fitted model. For classification predict() returns hard labels
// (0.0 / 1.0); for regression, amplitudes in the target's unit.
class FittedModel {
public:
    virtual ~FittedModel() = default;
    virtual std::vector<double> predict(const Matrix& X) const = 0;
    virtual std::size_t n_inputs() const = 0;
    virtual std::string family_tag() const = 0;

protected:
    void check_schema(const Matrix& X) const;
};

std::unique_ptr<FittedModel> fit(const LearnerSpec& spec, const Matrix& X,
                                 const std::vector<double>& y, unsigned threads = 0);

void check_training_inputs(const Matrix& X, const std::vector<double>& y, Task task);

}  // namespace raingap
