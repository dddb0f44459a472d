#pragma once

#include <map>
#include <string>

#include "raingap/learners/learner.hpp"
#include "raingap/series.hpp"

namespace raingap {

enum class GridKind { Full, Desk };

std::string grid_kind_name(GridKind g);
GridKind grid_kind_from_name(const std::string& s);

// Hyperparameter grid in fixed enumeration order (first grid point wins
// score ties). Desk grids carry one value per hyperparameter for fast runs.
std::vector<ParamAssignment> grid_for(Family family, Task task, GridKind kind);

struct TunedEntry {
    ParamAssignment params;
    double score = 0.0;
};

class TunedStore {
public:
    std::uint64_t split_seed = 0;
    std::string grid_version = "table1-v1";

    void put(const std::string& site, Family family, Task task, TunedEntry entry);
    const TunedEntry& lookup(const std::string& site, Family family, Task task) const;
    bool contains(const std::string& site, Family family, Task task) const;

    std::string to_json() const;
    static TunedStore from_json(const std::string& text);
    void save(const std::string& path) const;
    static TunedStore load(const std::string& path);

    const std::map<std::string, TunedEntry>& entries() const { return entries_; }

private:
    static std::string key(const std::string& site, Family family, Task task);
    std::map<std::string, TunedEntry> entries_;
};

struct GridSearchResult {
    ParamAssignment params;
    double score = 0.0;                 // accuracy (classify) or R^2 (regress)
    std::vector<double> all_scores;     // per grid point, enumeration order
    std::vector<std::string> failures;  // per-point diagnostics
};

// Single random 70/30 split on complete-case rows; classification scored by
// accuracy over all rows (binary target), regression by R^2 over rain-only
// rows (raw mm, negative predictions clipped to 0).
GridSearchResult grid_search(const SeriesTable& table, Family family, Task task,
                             std::uint64_t seed, GridKind kind, unsigned threads = 0);

}  // namespace raingap
