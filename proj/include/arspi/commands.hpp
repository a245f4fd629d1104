#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arspi/mcmc.hpp"
#include "arspi/model.hpp"
#include "arspi/predictive.hpp"

namespace arspi {

// Settings shared by the pipeline subcommands; config-file keys and CLI
// flags map 1:1 onto these fields.
struct RunConfig {
    std::string input;                       // precipitation CSV path
    std::filesystem::path out_dir = ".";
    int window = 3;                          // accumulation window (months)
    McmcConfig mcmc;                         // sampler protocol settings
    std::size_t predictive_m = kDefaultPredictiveSampleSize;
    std::optional<std::uint64_t> predictive_seed;  // default: mcmc.base_seed
    bool monthly_spi = false;                // per-calendar-month SPI fits
    std::vector<double> thresholds = {0.0, -1.0, -1.5, -2.0};
    std::size_t acf_max_lag = 36;
    std::size_t histogram_bins = 12;

    void validate() const;  // throws ConfigError
    [[nodiscard]] std::uint64_t effective_predictive_seed() const {
        return predictive_seed.value_or(mcmc.base_seed);
    }
};

namespace cmd {

// Classic SPI: writes spi_<w>.csv and spi_<w>.svg.
void spi(const RunConfig& config);

// MCMC fit: writes posterior_<w>.csv (+ .meta.json checksum sidecar),
// traces_<w>.csv, and fit_summary_<w>.txt.
void arspi_fit(const RunConfig& config);

// Posterior-predictive index: reads the posterior CSV (verifying the
// checksum sidecar when present), writes arspi_<w>.csv (+ .meta.json) and,
// when spi_<w>.csv already exists in out_dir, the overlay compare_<w>.svg.
void arspi_index(const RunConfig& config, const std::filesystem::path& posterior_path);

// Mismatch taxonomy plus per-threshold event/return-period/histogram tables
// computed from spi_<w>.csv and arspi_<w>.csv in out_dir.
void analyze(const RunConfig& config);

// ACF/PACF diagnostics of the MTR series (optionally of ln encoded values):
// acf_<w>.csv, pacf_<w>.csv, acf_<w>.svg.
void acf_diagnostics(const RunConfig& config, bool log_scale);

struct SimulateConfig {
    ArspiParams params;
    std::size_t length = 1188;
    std::uint64_t seed = 1893;
    double pi0 = 0.5;
    double r0 = 1.0;
    std::filesystem::path out_dir = ".";
    std::string name = "simulated";  // file stem
};

// Forward simulation: writes <name>.csv (year,month,precip rows consumable
// by the fit pipeline with window 1) and <name>_params.csv (ground truth).
void simulate(const SimulateConfig& config);

}  // namespace cmd

}  // namespace arspi
