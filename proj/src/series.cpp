#include "raingap/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace raingap {

namespace {

std::string stamp_str(std::int64_t ts) {
    std::ostringstream os;
    os << ts;
    return os.str();
}

}  // namespace

std::string origin_name(ColumnOrigin o) {
    switch (o) {
        case ColumnOrigin::StationSensor: return "station-sensor";
        case ColumnOrigin::ExternalGauge: return "external-gauge";
        case ColumnOrigin::Cyclic: return "cyclic";
        case ColumnOrigin::SiteTag: return "site-tag";
    }
    throw ConfigError("unknown column origin");
}

ColumnOrigin origin_from_name(const std::string& s) {
    if (s == "station-sensor") return ColumnOrigin::StationSensor;
    if (s == "external-gauge") return ColumnOrigin::ExternalGauge;
    if (s == "cyclic") return ColumnOrigin::Cyclic;
    if (s == "site-tag") return ColumnOrigin::SiteTag;
    throw ConfigError("unknown column origin: " + s);
}

std::string feature_set_name(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::Core: return "core";
        case FeatureSet::AllStation: return "cosmos";
        case FeatureSet::ExternalGauges: return "ea";
        case FeatureSet::StationPlusGauges: return "cosmos+ea";
    }
    throw ConfigError("unknown feature set");
}

FeatureSet feature_set_from_name(const std::string& s) {
    if (s == "core") return FeatureSet::Core;
    if (s == "cosmos") return FeatureSet::AllStation;
    if (s == "ea") return FeatureSet::ExternalGauges;
    if (s == "cosmos+ea") return FeatureSet::StationPlusGauges;
    throw ConfigError("unknown feature set: " + s +
                      " (expected core|cosmos|ea|cosmos+ea)");
}

int SeriesTable::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return static_cast<int>(i);
    return -1;
}

void SeriesTable::validate() const {
    if (target.size() != timestamps.size())
        throw DataError("SeriesTable: target/timestamp length mismatch");
    if (feature_names.size() != features.size() ||
        feature_origins.size() != features.size())
        throw DataError("SeriesTable: feature metadata length mismatch");
    for (const auto& col : features)
        if (col.size() != timestamps.size())
            throw DataError("SeriesTable: ragged feature column");

    std::set<std::string> names(feature_names.begin(), feature_names.end());
    if (names.size() != feature_names.size())
        throw DataError("SeriesTable: duplicate feature column name");

    for (double v : target)
        if (!is_missing(v) && v < 0.0)
            throw DataError("SeriesTable: negative precipitation value");

    // Pooled tables concatenate sites, so the lattice check runs per
    // site-tag segment.
    int tag = feature_index(kSiteTagColumn);
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (tag >= 0 && features[tag][i] != features[tag][i - 1]) continue;
        if (timestamps[i] - timestamps[i - 1] != kStepSeconds)
            throw DataError("SeriesTable: timestamps not on a 30-minute lattice at row " +
                            std::to_string(i));
    }
}

std::pair<std::size_t, std::size_t> SeriesTable::operational_span() const {
    std::size_t lo = n_rows(), hi = 0;
    for (std::size_t i = 0; i < n_rows(); ++i) {
        if (!is_missing(target[i])) {
            if (lo == n_rows()) lo = i;
            hi = i;
        }
    }
    if (lo == n_rows())
        throw DataError("SeriesTable: no present target values for site " + site_id);
    return {lo, hi};
}

const GaugeEntry& GaugeCatalog::find(const std::string& gauge_id) const {
    for (const auto& e : entries)
        if (e.gauge_id == gauge_id) return e;
    throw DataError("GaugeCatalog: unknown gauge " + gauge_id);
}

void GaugeCatalog::validate() const {
    std::set<std::string> ids;
    for (const auto& e : entries) {
        if (!ids.insert(e.gauge_id).second)
            throw DataError("GaugeCatalog: duplicate gauge_id " + e.gauge_id);
        if (!std::isfinite(e.easting_m) || !std::isfinite(e.northing_m))
            throw DataError("GaugeCatalog: non-finite coordinates for " + e.gauge_id);
    }
}

void IngestConfig::validate() const {
    if (!(missing_threshold > 0.0 && missing_threshold < 1.0))
        throw ConfigError("missing_threshold must lie in (0,1)");
    if (!(radius_km > 0.0)) throw ConfigError("radius_km must be positive");
}

void RegionSpec::validate() const {
    if (member_sites.size() < 2)
        throw ConfigError("RegionSpec requires at least 2 member sites");
}

std::vector<TimedReading> aggregate_gauge_15min(const std::vector<TimedReading>& readings) {
    constexpr std::int64_t kQuarter = 900;
    std::map<std::int64_t, double> by_stamp;
    for (const auto& r : readings) {
        if (r.timestamp % kQuarter != 0)
            throw DataError("aggregate_gauge_15min: timestamp off the 15-minute lattice: " +
                            stamp_str(r.timestamp));
        if (!is_missing(r.value) && r.value < 0.0)
            throw DataError("aggregate_gauge_15min: negative reading at " +
                            stamp_str(r.timestamp));
        by_stamp[r.timestamp] = r.value;
    }
    std::vector<TimedReading> out;
    if (by_stamp.empty()) return out;

    std::int64_t first = by_stamp.begin()->first;
    std::int64_t last = by_stamp.rbegin()->first;
    std::int64_t t = ((first + kStepSeconds - 1) / kStepSeconds) * kStepSeconds;
    for (; t <= last + kQuarter; t += kStepSeconds) {
        auto later = by_stamp.find(t);
        auto earlier = by_stamp.find(t - kQuarter);
        if (later == by_stamp.end() && earlier == by_stamp.end()) continue;
        double v = kMissing;
        if (later != by_stamp.end() && earlier != by_stamp.end() &&
            !is_missing(later->second) && !is_missing(earlier->second))
            v = later->second + earlier->second;
        out.push_back({t, v});
    }
    return out;
}

std::vector<std::string> select_gauges_in_radius(const GaugeCatalog& catalog,
                                                 const std::string& site,
                                                 double radius_km) {
    const GaugeEntry& origin = catalog.find(site);
    double radius_m = radius_km * 1000.0;
    std::vector<std::pair<double, std::string>> hits;
    for (const auto& e : catalog.entries) {
        if (e.gauge_id == site) continue;
        double dx = e.easting_m - origin.easting_m;
        double dy = e.northing_m - origin.northing_m;
        double d = std::hypot(dx, dy);
        if (d <= radius_m) hits.emplace_back(d, e.gauge_id);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<std::string> out;
    out.reserve(hits.size());
    for (auto& [d, id] : hits) out.push_back(std::move(id));
    return out;
}

SeriesTable drop_sparse_columns(const SeriesTable& table, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("drop_sparse_columns: threshold must lie in (0,1)");
    auto [lo, hi] = table.operational_span();
    double span = static_cast<double>(hi - lo + 1);

    SeriesTable out;
    out.site_id = table.site_id;
    out.timestamps = table.timestamps;
    out.target = table.target;
    for (std::size_t c = 0; c < table.n_features(); ++c) {
        std::size_t miss = 0;
        for (std::size_t i = lo; i <= hi; ++i)
            if (is_missing(table.features[c][i])) miss++;
        if (miss / span <= threshold) {
            out.feature_names.push_back(table.feature_names[c]);
            out.feature_origins.push_back(table.feature_origins[c]);
            out.features.push_back(table.features[c]);
        }
    }
    return out;
}

SeriesTable pool_region(const std::vector<SeriesTable>& tables, const RegionSpec& spec) {
    spec.validate();
    if (tables.size() != spec.member_sites.size())
        throw ConfigError("pool_region: table count does not match member_sites");

    // Common feature columns, in the first member's order.
    std::vector<std::string> common;
    for (std::size_t c = 0; c < tables[0].n_features(); ++c) {
        const std::string& name = tables[0].feature_names[c];
        bool everywhere = true;
        for (std::size_t t = 1; t < tables.size(); ++t)
            if (tables[t].feature_index(name) < 0) everywhere = false;
        if (everywhere) common.push_back(name);
    }
    if (common.empty()) throw DataError("pool_region: no common feature columns");

    std::int64_t start = std::numeric_limits<std::int64_t>::min();
    std::int64_t end = std::numeric_limits<std::int64_t>::max();
    for (const auto& t : tables) {
        auto [lo, hi] = t.operational_span();
        start = std::max(start, t.timestamps[lo]);
        end = std::min(end, t.timestamps[hi]);
    }
    if (start > end) throw DataError("pool_region: empty time overlap across members");

    SeriesTable out;
    std::string joined;
    for (const auto& s : spec.member_sites) joined += (joined.empty() ? "" : "+") + s;
    out.site_id = joined;
    out.feature_names = common;
    for (const auto& name : common)
        out.feature_origins.push_back(
            tables[0].feature_origins[tables[0].feature_index(name)]);
    out.features.assign(common.size(), {});
    out.feature_names.push_back(kSiteTagColumn);
    out.feature_origins.push_back(ColumnOrigin::SiteTag);
    out.features.emplace_back();

    for (std::size_t t = 0; t < tables.size(); ++t) {
        const SeriesTable& tab = tables[t];
        std::vector<int> cols;
        for (const auto& name : common) cols.push_back(tab.feature_index(name));
        for (std::size_t i = 0; i < tab.n_rows(); ++i) {
            if (tab.timestamps[i] < start || tab.timestamps[i] > end) continue;
            out.timestamps.push_back(tab.timestamps[i]);
            out.target.push_back(tab.target[i]);
            for (std::size_t c = 0; c < common.size(); ++c)
                out.features[c].push_back(tab.features[cols[c]][i]);
            out.features.back().push_back(static_cast<double>(t));
        }
    }
    return out;
}

}  // namespace raingap
