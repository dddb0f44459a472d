#include "raingap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace raingap {

double solve_p01(double single_sample_fraction, double rain_fraction) {
    double p11 = 1.0 - single_sample_fraction;
    double p01 = (1.0 - p11) * rain_fraction / (1.0 - rain_fraction);
    if (!(p01 > 0.0 && p01 < 1.0))
        throw ConfigError("synth: infeasible fraction pair (p01 = " +
                          std::to_string(p01) + " outside (0,1))");
    return p01;
}

void SynthConfig::validate() const {
    auto frac = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0))
            throw ConfigError(std::string("synth: ") + name + " must lie in (0,1)");
    };
    frac(rain_fraction, "rain_fraction");
    frac(single_sample_fraction, "single_sample_fraction");
    if (n_sites == 0) throw ConfigError("synth: n_sites must be positive");
    if (n_gauges == 0) throw ConfigError("synth: n_gauges must be positive");
    if (!(days > 0.0)) throw ConfigError("synth: days must be positive");
    if (n_samples() < 2) throw ConfigError("synth: too few samples");
    if (corr_length_m <= 0.0) throw ConfigError("synth: corr_length_m must be positive");
    if (gamma_shape <= 0.0 || mean_amplitude_mm <= 0.0)
        throw ConfigError("synth: amplitude parameters must be positive");
    auto rate = [](double v, const char* name) {
        if (v < 0.0 || v >= 1.0)
            throw ConfigError(std::string("synth: ") + name + " must lie in [0,1)");
    };
    rate(missing_rate_target, "missing_rate_target");
    rate(missing_rate_covariate, "missing_rate_covariate");
    rate(missing_rate_gauge, "missing_rate_gauge");
    solve_p01(single_sample_fraction, rain_fraction);  // feasibility
}

namespace {

constexpr std::int64_t kEpochStart = 1577836800;  // 2020-01-01T00:00:00Z

struct CovariateSpec {
    const char* name;
    double base;
    double gain;   // response to the rain-state moving average
    double noise;  // sd of the additive noise
};

// Noise dominates the rain response so sample correlations with the target
// stay weak (|corr| well under 0.30).
constexpr CovariateSpec kCovariates[] = {
    {"pressure", 1012.0, -6.0, 2.5},
    {"humidity", 72.0, 20.0, 9.0},
    {"temperature", 11.0, -5.0, 3.5},
    {"wind_speed", 4.5, 6.0, 2.8},
    {"soil_moisture", 0.30, 0.25, 0.10},
};

void mask_column(std::vector<double>& col, double rate, std::mt19937_64& rng) {
    if (rate <= 0.0) return;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : col)
        if (u(rng) < rate) v = kMissing;
}

}  // namespace

SynthOutput generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.n_samples();
    const double p11 = 1.0 - config.single_sample_fraction;
    const double p01 = solve_p01(config.single_sample_fraction, config.rain_fraction);
    const double scale = config.mean_amplitude_mm / config.gamma_shape;

    SynthOutput out;
    out.config = config;

    for (std::size_t s = 0; s < config.n_sites; ++s) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "S%02zu", s + 1);
        std::string site_id = buf;
        double site_x = static_cast<double>(s) * 60000.0;
        double site_y = 0.0;
        out.observed.catalog.entries.push_back(
            {site_id, site_x, site_y, GaugeKind::Station});

        SeriesTable table;
        table.site_id = site_id;
        table.timestamps.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            table.timestamps[t] = kEpochStart + static_cast<std::int64_t>(t) * kStepSeconds;

        // Occurrence + amplitude at the site.
        std::mt19937_64 rain_rng(mix_seed(config.seed, 0x5A00 + s));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::gamma_distribution<double> amp(config.gamma_shape, scale);
        std::vector<int> state(n);
        table.target.resize(n);
        int cur = u(rain_rng) < config.rain_fraction ? 1 : 0;
        for (std::size_t t = 0; t < n; ++t) {
            state[t] = cur;
            table.target[t] = cur ? amp(rain_rng) : 0.0;
            cur = u(rain_rng) < (cur ? p11 : p01) ? 1 : 0;
        }

        // Covariates: exponential moving average of the rain state + noise.
        std::mt19937_64 cov_rng(mix_seed(config.seed, 0xC0F0 + s));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> ema(n);
        double m = config.rain_fraction;
        for (std::size_t t = 0; t < n; ++t) {
            m = 0.9 * m + 0.1 * state[t];
            ema[t] = m;
        }
        for (const CovariateSpec& cs : kCovariates) {
            std::vector<double> col(n);
            for (std::size_t t = 0; t < n; ++t)
                col[t] = cs.base + cs.gain * ema[t] + cs.noise * gauss(cov_rng);
            table.feature_names.push_back(cs.name);
            table.feature_origins.push_back(ColumnOrigin::StationSensor);
            table.features.push_back(std::move(col));
        }

        // External gauges: agree with the site sample with probability
        // exp(-d/L), otherwise carry an independent draw from the same
        // marginal process.
        std::mt19937_64 gauge_rng(mix_seed(config.seed, 0x6A00 + s));
        std::uniform_real_distribution<double> dist_km(2.0, 14.0);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        for (std::size_t g = 0; g < config.n_gauges; ++g) {
            std::string gauge_id = site_id + "_g" + std::to_string(g + 1);
            double d = dist_km(gauge_rng) * 1000.0;
            double a = angle(gauge_rng);
            out.observed.catalog.entries.push_back({gauge_id,
                                                    site_x + d * std::cos(a),
                                                    site_y + d * std::sin(a),
                                                    GaugeKind::ExternalGauge});
            double agree = std::exp(-d / config.corr_length_m);
            std::vector<double> col(n);
            for (std::size_t t = 0; t < n; ++t) {
                if (u(gauge_rng) < agree) {
                    col[t] = table.target[t];
                } else {
                    col[t] = u(gauge_rng) < config.rain_fraction ? amp(gauge_rng) : 0.0;
                }
            }
            table.feature_names.push_back(gauge_id);
            table.feature_origins.push_back(ColumnOrigin::ExternalGauge);
            table.features.push_back(std::move(col));
        }

        out.truth.push_back(table);

        // Missingness injection on the observed copy only.
        std::mt19937_64 mask_rng(mix_seed(config.seed, 0xABA0 + s));
        mask_column(table.target, config.missing_rate_target, mask_rng);
        for (std::size_t c = 0; c < table.n_features(); ++c)
            mask_column(table.features[c],
                        table.feature_origins[c] == ColumnOrigin::ExternalGauge
                            ? config.missing_rate_gauge
                            : config.missing_rate_covariate,
                        mask_rng);

        table.validate();
        out.observed.tables.push_back(std::move(table));
    }
    out.observed.catalog.validate();
    return out;
}

double realized_rain_fraction(const SeriesTable& table) {
    std::size_t present = 0, rain = 0;
    for (double v : table.target) {
        if (is_missing(v)) continue;
        present++;
        if (v > 0.0) rain++;
    }
    if (present == 0) throw DataError("realized_rain_fraction: no present targets");
    return static_cast<double>(rain) / present;
}

double realized_single_sample_fraction(const SeriesTable& table) {
    std::size_t runs = 0, singles = 0, run_len = 0;
    for (double v : table.target) {
        bool rain = !is_missing(v) && v > 0.0;
        if (rain) {
            run_len++;
        } else if (run_len > 0) {
            runs++;
            if (run_len == 1) singles++;
            run_len = 0;
        }
    }
    if (run_len > 0) {
        runs++;
        if (run_len == 1) singles++;
    }
    if (runs == 0) throw DataError("realized_single_sample_fraction: no rain events");
    return static_cast<double>(singles) / runs;
}

}  // namespace raingap
