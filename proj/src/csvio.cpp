#include "raingap/csvio.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace raingap {

namespace fs = std::filesystem;
using nlohmann::json;

std::int64_t parse_iso8601(const std::string& s) {
    std::tm tm{};
    int year, mon, day, hour, min, sec;
    char sep;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &year, &mon, &day, &sep, &hour,
                    &min, &sec) != 7 ||
        (sep != 'T' && sep != ' '))
        throw DataError("bad ISO 8601 timestamp: " + s);
    tm.tm_year = year - 1900;
    tm.tm_mon = mon - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = min;
    tm.tm_sec = sec;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_iso8601(std::int64_t ts) {
    std::time_t t = static_cast<std::time_t>(ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& s) {
    if (s.empty() || s == "nan" || s == "NaN" || s == "NA") return kMissing;
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw DataError("bad numeric cell: " + s);
    return v;
}

std::string format_cell(double v) {
    if (is_missing(v)) return "";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SeriesTable read_series_csv(const std::string& path, const std::string& site_id) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "timestamp")
        throw DataError(path + ": expected header starting with 'timestamp'");
    if (header[1] != "precip")
        throw DataError(path + ": expected 'precip' as the second column");

    SeriesTable table;
    table.site_id = site_id;
    for (std::size_t c = 2; c < header.size(); ++c) {
        table.feature_names.push_back(header[c]);
        table.feature_origins.push_back(ColumnOrigin::StationSensor);
        table.features.emplace_back();
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": wrong field count");
        table.timestamps.push_back(parse_iso8601(cells[0]));
        table.target.push_back(parse_cell(cells[1]));
        for (std::size_t c = 2; c < cells.size(); ++c)
            table.features[c - 2].push_back(parse_cell(cells[c]));
    }
    table.validate();
    return table;
}

void write_series_csv(const SeriesTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "timestamp,precip";
    for (const auto& name : table.feature_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        out << format_iso8601(table.timestamps[i]) << ',' << format_cell(table.target[i]);
        for (const auto& col : table.features) out << ',' << format_cell(col[i]);
        out << '\n';
    }
}

GaugeCatalog read_catalog_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty catalog: " + path);
    GaugeCatalog catalog;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != 4)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 4 fields");
        GaugeEntry e;
        e.gauge_id = cells[0];
        e.easting_m = parse_cell(cells[1]);
        e.northing_m = parse_cell(cells[2]);
        if (cells[3] == "station")
            e.kind = GaugeKind::Station;
        else if (cells[3] == "external-gauge")
            e.kind = GaugeKind::ExternalGauge;
        else
            throw DataError(path + ": unknown gauge kind " + cells[3]);
        catalog.entries.push_back(std::move(e));
    }
    catalog.validate();
    return catalog;
}

void write_catalog_csv(const GaugeCatalog& catalog, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "gauge_id,easting_m,northing_m,kind\n";
    for (const auto& e : catalog.entries)
        out << e.gauge_id << ',' << format_cell(e.easting_m) << ','
            << format_cell(e.northing_m) << ','
            << (e.kind == GaugeKind::Station ? "station" : "external-gauge") << '\n';
}

void write_dataset(const Dataset& ds, const std::string& dir,
                   const std::string& config_json) {
    fs::create_directories(dir);
    json sidecar;
    sidecar["config"] = json::parse(config_json);
    sidecar["catalog"] = "catalog.csv";
    sidecar["sites"] = json::array();
    for (const auto& table : ds.tables) {
        std::string file = table.site_id + ".csv";
        write_series_csv(table, (fs::path(dir) / file).string());
        json site;
        site["site_id"] = table.site_id;
        site["file"] = file;
        auto [lo, hi] = table.operational_span();
        site["span"] = {format_iso8601(table.timestamps[lo]),
                        format_iso8601(table.timestamps[hi])};
        site["columns"] = json::array();
        for (std::size_t c = 0; c < table.n_features(); ++c)
            site["columns"].push_back({{"name", table.feature_names[c]},
                                       {"origin", origin_name(table.feature_origins[c])}});
        sidecar["sites"].push_back(std::move(site));
    }
    write_catalog_csv(ds.catalog, (fs::path(dir) / "catalog.csv").string());
    std::ofstream out(fs::path(dir) / "dataset.json");
    out << sidecar.dump(2) << '\n';
}

Dataset read_dataset(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "dataset.json");
    if (!in) throw DataError("cannot open " + dir + "/dataset.json");
    json sidecar = json::parse(in);
    Dataset ds;
    ds.catalog =
        read_catalog_csv((fs::path(dir) / sidecar["catalog"].get<std::string>()).string());
    for (const auto& site : sidecar["sites"]) {
        SeriesTable table =
            read_series_csv((fs::path(dir) / site["file"].get<std::string>()).string(),
                            site["site_id"].get<std::string>());
        for (const auto& col : site["columns"]) {
            int idx = table.feature_index(col["name"].get<std::string>());
            if (idx < 0)
                throw DataError("sidecar column missing from CSV: " +
                                col["name"].get<std::string>());
            table.feature_origins[idx] = origin_from_name(col["origin"].get<std::string>());
        }
        ds.tables.push_back(std::move(table));
    }
    return ds;
}

}  // namespace raingap
