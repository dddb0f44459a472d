#pragma once

#include "raingap/csvio.hpp"
#include "raingap/series.hpp"

namespace raingap {

// Deterministic multi-site generator. Rain occurrence follows a two-state
// Markov chain with p11 = 1 - single_sample_fraction and p01 solved from
// stationarity pi1 = p01 / (p01 + 1 - p11); amplitudes are gamma draws.
struct SynthConfig {
    std::size_t n_sites = 2;
    std::size_t n_gauges = 6;         // external gauges per site
    double days = 30.0;               // 48 samples per day
    std::uint64_t seed = 0;
    double rain_fraction = 0.10;
    double single_sample_fraction = 0.485;
    double corr_length_m = 8000.0;    // gauge agreement decays exp(-d/L)
    double gamma_shape = 0.7;
    double mean_amplitude_mm = 0.3;
    double missing_rate_target = 0.02;
    double missing_rate_covariate = 0.05;
    double missing_rate_gauge = 0.05;

    std::size_t n_samples() const { return static_cast<std::size_t>(days * 48.0); }
    void validate() const;  // throws ConfigError, incl. p01 outside (0,1)
};

// Markov stationarity: p01 = (1 - p11) * pi1 / (1 - pi1).
double solve_p01(double single_sample_fraction, double rain_fraction);

struct SynthOutput {
    Dataset observed;                  // masked tables + catalog
    std::vector<SeriesTable> truth;    // pre-masking copies, same shapes
    SynthConfig config;
};

SynthOutput generate(const SynthConfig& config);

// Fraction of present target samples that are > 0.
double realized_rain_fraction(const SeriesTable& table);

// Fraction of maximal rain runs of length exactly 1 among all rain runs.
double realized_single_sample_fraction(const SeriesTable& table);

}  // namespace raingap
