#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "raingap/common.hpp"

namespace raingap {

constexpr std::int64_t kStepSeconds = 1800;  // 30-minute lattice

enum class ColumnOrigin { StationSensor, ExternalGauge, Cyclic, SiteTag };

std::string origin_name(ColumnOrigin o);
ColumnOrigin origin_from_name(const std::string& s);

// Aligned 30-minute record for one site. Columns are stored column-major;
// NaN marks a missing cell. Timestamps are unix seconds (UTC), strictly
// increasing with constant 30-minute spacing; gaps appear as all-missing rows.
struct SeriesTable {
    std::string site_id;
    std::vector<std::int64_t> timestamps;
    std::vector<double> target;  // precipitation, mm; present values >= 0
    std::vector<std::string> feature_names;
    std::vector<ColumnOrigin> feature_origins;
    std::vector<std::vector<double>> features;  // features[col][row]

    std::size_t n_rows() const { return timestamps.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    int feature_index(const std::string& name) const;  // -1 when absent
    void validate() const;

    // First and last row with a present target value (Table-style
    // "data duration"). Throws when no target value is present.
    std::pair<std::size_t, std::size_t> operational_span() const;
};

enum class GaugeKind { Station, ExternalGauge };

struct GaugeEntry {
    std::string gauge_id;
    double easting_m = 0.0;
    double northing_m = 0.0;
    GaugeKind kind = GaugeKind::ExternalGauge;
};

struct GaugeCatalog {
    std::vector<GaugeEntry> entries;

    const GaugeEntry& find(const std::string& gauge_id) const;
    void validate() const;
};

enum class FeatureSet { Core, AllStation, ExternalGauges, StationPlusGauges };

std::string feature_set_name(FeatureSet fs);
FeatureSet feature_set_from_name(const std::string& s);

struct IngestConfig {
    double radius_km = 30.0;
    double missing_threshold = 0.10;
    FeatureSet feature_set = FeatureSet::StationPlusGauges;

    void validate() const;
};

struct RegionSpec {
    std::vector<std::string> member_sites;
    bool pooled = true;

    void validate() const;
};

struct TimedReading {
    std::int64_t timestamp = 0;  // unix seconds
    double value = kMissing;
};

// Sums each half-hour reading with its preceding quarter-hour reading;
// output stamped at the later constituent. A pair with either constituent
// missing (or absent from the input) yields a missing sample.
std::vector<TimedReading> aggregate_gauge_15min(const std::vector<TimedReading>& readings);

// Gauges within radius_km of `site` (Euclidean on easting/northing), closest
// first, distance ties broken by gauge_id. The site's own catalog entry is
// not returned.
std::vector<std::string> select_gauges_in_radius(const GaugeCatalog& catalog,
                                                 const std::string& site,
                                                 double radius_km);

// Drops feature columns whose missing fraction over the site's operational
// span exceeds `threshold`. The target column is never dropped.
SeriesTable drop_sparse_columns(const SeriesTable& table, double threshold);

// Concatenates member tables restricted to the common feature columns and
// the overlap window [max(start), min(end)] of operational spans, appending
// a site-tag column (member index) so per-site metrics remain computable.
SeriesTable pool_region(const std::vector<SeriesTable>& tables, const RegionSpec& spec);

inline const char* kSiteTagColumn = "__site__";

}  // namespace raingap
