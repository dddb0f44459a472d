#pragma once

#include <string>
#include <vector>

#include "raingap/series.hpp"

namespace raingap {

// ISO 8601 UTC timestamps, e.g. "2019-05-08T10:30:00Z".
std::int64_t parse_iso8601(const std::string& s);
std::string format_iso8601(std::int64_t ts);

// Canonical site CSV: header `timestamp,precip,<feature...>`; empty cell =
// missing. Origins default to station-sensor unless the caller refines them
// from a sidecar.
SeriesTable read_series_csv(const std::string& path, const std::string& site_id);
void write_series_csv(const SeriesTable& table, const std::string& path);

// Catalog CSV: `gauge_id,easting_m,northing_m,kind`.
GaugeCatalog read_catalog_csv(const std::string& path);
void write_catalog_csv(const GaugeCatalog& catalog, const std::string& path);

struct Dataset {
    std::vector<SeriesTable> tables;
    GaugeCatalog catalog;
};

// One CSV per site + catalog.csv + dataset.json sidecar (column origins,
// site spans, generating config).
void write_dataset(const Dataset& ds, const std::string& dir,
                   const std::string& config_json = "{}");
Dataset read_dataset(const std::string& dir);

}  // namespace raingap
