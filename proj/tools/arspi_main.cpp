#include <algorithm>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arspi/commands.hpp"
#include "arspi/csv.hpp"
#include "arspi/errors.hpp"

namespace {

// Shared pipeline flags; every subcommand that reads data or seeds RNGs
// draws from the same RunConfig so config files apply uniformly.
void add_common_options(CLI::App& app, arspi::RunConfig& config, double& pi0,
                        std::int64_t& pred_seed, std::string& config_file) {
    app.add_option("-i,--input", config.input, "monthly precipitation CSV (year,month,precip)");
    app.add_option("-w,--window", config.window, "accumulation window in months")
        ->check(CLI::Range(1, 120));
    app.add_option("-o,--out-dir", config.out_dir, "output directory (created if missing)");
    app.add_option("--chains", config.mcmc.n_chains, "number of MCMC chains");
    app.add_option("--iterations", config.mcmc.iterations, "MCMC iterations per chain");
    app.add_option("--burn-in", config.mcmc.burn_in, "burn-in iterations per chain");
    app.add_option("--thin", config.mcmc.thin, "thinning interval");
    app.add_option("--seed", config.mcmc.base_seed, "base RNG seed");
    app.add_option("--target-acceptance", config.mcmc.target_acceptance,
                   "adaptive proposal target acceptance rate");
    app.add_option("--adaptation-window", config.mcmc.adaptation_window,
                   "iterations per adaptation batch during burn-in");
    app.add_option("--pred-m", config.predictive_m, "posterior-predictive sample size M");
    app.add_option("--pred-seed", pred_seed, "predictive RNG seed (default: --seed)");
    app.add_option("--pi0", pi0,
                   "initial dry probability in (0,1); default: empirical dry fraction, else "
                   "stationary value");
    app.add_option("--thresholds", config.thresholds,
                   "drought event thresholds, comma-separated (default 0,-1,-1.5,-2)")
        ->delimiter(',');
    app.add_option("--max-lag", config.acf_max_lag, "maximum ACF/PACF lag");
    app.add_option("--bins", config.histogram_bins, "histogram bin count");
    app.add_option("--config", config_file,
                   "plain `key = value` config file; keys are this subcommand's long option "
                   "names and explicit flags override them");
}

// Turns `key = value` lines into `--key=value` tokens. Blank lines and lines
// starting with `#` are skipped; anything else without `=` is an error.
std::vector<std::string> config_tokens(const std::string& file) {
    std::istringstream in(arspi::csv::read_file(file));
    std::vector<std::string> tokens;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string_view stripped = arspi::csv::trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        const std::string_view key =
            eq == std::string_view::npos ? std::string_view{} : arspi::csv::trim(stripped.substr(0, eq));
        if (key.empty())
            throw arspi::ConfigError("config file " + file + " line " + std::to_string(row) +
                                     ": expected `key = value`");
        tokens.push_back("--" + std::string(key) + "=" +
                         std::string(arspi::csv::trim(stripped.substr(eq + 1))));
    }
    return tokens;
}

// Re-parses the active subcommand with the config file's keys as options,
// then re-applies the real command line so explicit flags win. CLI11 resets
// only its own parse state between runs, so values bound from one pass
// persist unless a later pass rebinds them: defaults < config < flags.
void apply_config_file(CLI::App& app, const std::string& config_file,
                       std::vector<std::string> subcommand_path, int argc, char** argv) {
    std::vector<std::string> args = std::move(subcommand_path);
    const std::vector<std::string> tokens = config_tokens(config_file);
    args.insert(args.end(), tokens.begin(), tokens.end());
    std::reverse(args.begin(), args.end());  // CLI11's vector overload is back-to-front
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw arspi::ConfigError("config file " + config_file + ": " + e.what());
    }
    app.parse(argc, argv);
}

void finalize_config(arspi::RunConfig& config, double pi0, std::int64_t pred_seed) {
    if (pi0 >= 0.0) config.mcmc.pi0 = pi0;
    if (pred_seed >= 0) config.predictive_seed = static_cast<std::uint64_t>(pred_seed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Standardized Precipitation Index (SPI) and autoregressive ARSPI toolkit.\n"
        "Drought categories: index >= 2 ExtremeWet, >= 1.5 SevereWet, >= 1 ModerateWet,\n"
        ">= 0 MildWet, > -1 MildDrought, > -1.5 ModerateDrought, > -2 SevereDrought,\n"
        "else ExtremeDrought (boundaries at 0 and the negated cutoffs resolve wetward)."};
    app.require_subcommand(1);

    arspi::RunConfig config;
    double pi0 = -1.0;              // sentinel: unset
    std::int64_t pred_seed = -1;    // sentinel: unset
    std::string config_file;

    CLI::App* cmd_spi = app.add_subcommand("spi", "classic SPI from a precipitation CSV");
    add_common_options(*cmd_spi, config, pi0, pred_seed, config_file);
    cmd_spi->add_flag("--monthly", config.monthly_spi,
                      "fit one Gamma per calendar month instead of a pooled fit");

    CLI::App* cmd_arspi = app.add_subcommand("arspi", "autoregressive SPI pipeline");
    cmd_arspi->require_subcommand(1);
    CLI::App* cmd_fit = cmd_arspi->add_subcommand("fit", "run the MCMC fit");
    add_common_options(*cmd_fit, config, pi0, pred_seed, config_file);
    CLI::App* cmd_index =
        cmd_arspi->add_subcommand("index", "posterior-predictive ARSPI from a posterior CSV");
    add_common_options(*cmd_index, config, pi0, pred_seed, config_file);
    std::string posterior_file;
    cmd_index->add_option("--posterior", posterior_file,
                          "posterior CSV from `arspi fit` (default: <out-dir>/posterior_<w>.csv)");

    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "mismatch, drought events, and return periods");
    add_common_options(*cmd_analyze, config, pi0, pred_seed, config_file);

    CLI::App* cmd_acf = app.add_subcommand("acf", "ACF/PACF diagnostics of the MTR series");
    add_common_options(*cmd_acf, config, pi0, pred_seed, config_file);
    bool acf_log_scale = false;
    cmd_acf->add_flag("--log-scale", acf_log_scale, "analyze ln of the encoded MTR values");

    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "forward-simulate a synthetic MTR series");
    arspi::cmd::SimulateConfig sim;
    cmd_simulate->add_option("--beta1", sim.params.beta1, "wet log-level");
    cmd_simulate->add_option("--beta2", sim.params.beta2, "wet AR coefficient in (-1,1)");
    cmd_simulate->add_option("--sigma", sim.params.sigma, "wet log-scale > 0");
    cmd_simulate->add_option("--alpha", sim.params.alpha, "dry logit level");
    cmd_simulate->add_option("--phi", sim.params.phi, "dry logit AR coefficient in (-1,1)");
    cmd_simulate->add_option("--nu", sim.params.nu, "sigma hyperparameter > 0");
    cmd_simulate->add_option("--sigma-beta", sim.params.sigma_beta, "beta1 prior SD > 0");
    cmd_simulate->add_option("--nu1", sim.params.nu1, "sigma_beta hyperparameter > 0");
    cmd_simulate->add_option("--nu2", sim.params.nu2, "sigma_beta hyperparameter > 0");
    cmd_simulate->add_option("--length", sim.length, "number of windows to simulate");
    cmd_simulate->add_option("--seed", sim.seed, "RNG seed");
    cmd_simulate->add_option("--sim-pi0", sim.pi0, "pre-sample dry probability in (0,1)");
    cmd_simulate->add_option("--r0", sim.r0, "pre-sample encoded MTR value > 0");
    cmd_simulate->add_option("-o,--out-dir", sim.out_dir, "output directory");
    cmd_simulate->add_option("--name", sim.name, "output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (!config_file.empty()) {
            std::vector<std::string> path;
            if (cmd_spi->parsed()) path = {"spi"};
            else if (cmd_fit->parsed()) path = {"arspi", "fit"};
            else if (cmd_index->parsed()) path = {"arspi", "index"};
            else if (cmd_analyze->parsed()) path = {"analyze"};
            else if (cmd_acf->parsed()) path = {"acf"};
            apply_config_file(app, config_file, std::move(path), argc, argv);
        }
        finalize_config(config, pi0, pred_seed);
        if (cmd_spi->parsed()) {
            arspi::cmd::spi(config);
        } else if (cmd_arspi->parsed() && cmd_fit->parsed()) {
            arspi::cmd::arspi_fit(config);
        } else if (cmd_arspi->parsed() && cmd_index->parsed()) {
            std::filesystem::path posterior = posterior_file.empty()
                ? config.out_dir / ("posterior_" + std::to_string(config.window) + ".csv")
                : std::filesystem::path(posterior_file);
            arspi::cmd::arspi_index(config, posterior);
        } else if (cmd_analyze->parsed()) {
            arspi::cmd::analyze(config);
        } else if (cmd_acf->parsed()) {
            arspi::cmd::acf_diagnostics(config, acf_log_scale);
        } else if (cmd_simulate->parsed()) {
            arspi::cmd::simulate(sim);
        }
    } catch (const arspi::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const arspi::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const arspi::ChecksumMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const arspi::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const arspi::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
