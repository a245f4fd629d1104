#include "arspi/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "arspi/analysis.hpp"
#include "arspi/csv.hpp"
#include "arspi/distributions.hpp"
#include "arspi/errors.hpp"
#include "arspi/ingest.hpp"
#include "arspi/spi.hpp"
#include "arspi/svg.hpp"

namespace arspi {

namespace fs = std::filesystem;

namespace {

std::string window_tag(const RunConfig& config) { return std::to_string(config.window); }

fs::path out_path(const RunConfig& config, const std::string& name) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + config.out_dir.string());
    return config.out_dir / name;
}

void emit(const fs::path& path, std::string_view content) {
    csv::write_file(path, content);
    std::cout << "wrote " << path.string() << '\n';
}

PrecipSeries load_input(const RunConfig& config) {
    if (config.input.empty()) throw ConfigError("no input file given (flag --input)");
    if (!fs::exists(config.input)) throw IoError("input file not found: " + config.input);
    return parse_precip_csv(csv::read_file(config.input));
}

MtrSeries load_mtr(const RunConfig& config) {
    return moving_total(load_input(config), config.window);
}

std::string render_index_csv(const IndexSeries& series, std::string_view value_column) {
    std::ostringstream out;
    write_index_csv(out, series, value_column);
    return std::move(out).str();
}

std::string pi0_policy_description(const MtrSeries& mtr, const std::optional<double>& pi0) {
    if (pi0) return "fixed " + csv::format_double(*pi0);
    const double dry = mtr.dry_fraction();
    if (dry > 0.0 && dry < 1.0) return "empirical dry fraction " + csv::format_double(dry);
    return "stationary logit^-1(alpha/(1-phi)) per draw";
}

std::vector<double> record_ts(const IndexSeries& series) {
    std::vector<double> t;
    t.reserve(series.size());
    for (const IndexRecord& r : series.records) t.push_back(static_cast<double>(r.t));
    return t;
}

std::vector<double> record_values(const IndexSeries& series) {
    std::vector<double> v;
    v.reserve(series.size());
    for (const IndexRecord& r : series.records) v.push_back(r.value);
    return v;
}

std::string threshold_label(double threshold) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", threshold);
    return buffer;
}

fs::path meta_sidecar(const fs::path& csv_path) {
    fs::path sidecar = csv_path;
    sidecar.replace_extension(".meta.json");
    return sidecar;
}

IndexSeries load_index_csv(const fs::path& path, std::string_view value_column, int window) {
    if (!fs::exists(path)) throw IoError("index file not found: " + path.string());
    std::istringstream in(csv::read_file(path));
    return read_index_csv(in, value_column, window);
}

}  // namespace

void RunConfig::validate() const {
    if (window < 1) throw ConfigError("window must be >= 1");
    if (predictive_m < 1) throw ConfigError("predictive sample size must be >= 1");
    if (acf_max_lag < 1) throw ConfigError("max_lag must be >= 1");
    if (histogram_bins < 1) throw ConfigError("histogram bins must be >= 1");
    for (const double t : thresholds)
        if (!std::isfinite(t)) throw ConfigError("thresholds must be finite");
}

namespace cmd {

void spi(const RunConfig& config) {
    config.validate();
    const MtrSeries mtr = load_mtr(config);
    const IndexSeries series = config.monthly_spi ? spi_series_by_month(mtr) : spi_series(mtr);

    emit(out_path(config, "spi_" + window_tag(config) + ".csv"), render_index_csv(series, "index"));

    const std::array<PlotSeries, 1> plot = {
        PlotSeries{"SPI", "#1f77b4", record_ts(series), record_values(series)}};
    PlotOptions options;
    options.title = "SPI, " + std::to_string(config.window) + "-month window";
    options.x_label = "window index t";
    options.y_label = "SPI";
    options.guides = {0.0, -1.0, -1.5, -2.0};
    std::ostringstream svg;
    write_line_plot_svg(svg, plot, options);
    emit(out_path(config, "spi_" + window_tag(config) + ".svg"), svg.str());
}

void arspi_fit(const RunConfig& config) {
    config.validate();
    config.mcmc.validate();
    const MtrSeries mtr = load_mtr(config);
    const PosteriorDraws draws = run_chains(mtr, config.mcmc);

    std::ostringstream posterior_stream;
    write_posterior_csv(posterior_stream, draws);
    const std::string posterior_csv = std::move(posterior_stream).str();
    const fs::path posterior_path = out_path(config, "posterior_" + window_tag(config) + ".csv");
    emit(posterior_path, posterior_csv);

    nlohmann::json meta;
    meta["checksum_fnv1a64"] = csv::fnv1a64_hex(posterior_csv);
    meta["window"] = config.window;
    meta["input"] = config.input;
    meta["n_chains"] = config.mcmc.n_chains;
    meta["iterations"] = config.mcmc.iterations;
    meta["burn_in"] = config.mcmc.burn_in;
    meta["thin"] = config.mcmc.thin;
    meta["seed"] = config.mcmc.base_seed;
    meta["pi0_policy"] = pi0_policy_description(mtr, config.mcmc.pi0);
    emit(meta_sidecar(posterior_path), meta.dump(2) + "\n");

    std::ostringstream traces;
    export_traces(traces, draws);
    emit(out_path(config, "traces_" + window_tag(config) + ".csv"), traces.str());

    // Fit summary: posterior means/SDs, PSRF, acceptance, DIC.
    const std::size_t total = draws.total_draws();
    std::array<double, ArspiParams::kCount> mean{};
    std::array<double, ArspiParams::kCount> sd{};
    for (const ChainDraws& chain : draws.chains)
        for (const ArspiParams& p : chain.draws)
            for (std::size_t i = 0; i < ArspiParams::kCount; ++i) mean[i] += p.get(i);
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i) mean[i] /= static_cast<double>(total);
    for (const ChainDraws& chain : draws.chains)
        for (const ArspiParams& p : chain.draws)
            for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
                sd[i] += (p.get(i) - mean[i]) * (p.get(i) - mean[i]);
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
        sd[i] = total > 1 ? std::sqrt(sd[i] / static_cast<double>(total - 1)) : 0.0;

    const DicResult dic_result = dic(draws, mtr, config.mcmc.pi0);

    std::ostringstream summary;
    summary << "ARSPI model fit summary\n";
    summary << "window: " << config.window << "\n";
    summary << "input: " << config.input << " (" << mtr.size() << " windows, dry fraction "
            << csv::format_double(mtr.dry_fraction()) << ")\n";
    summary << "chains: " << config.mcmc.n_chains << "  iterations: " << config.mcmc.iterations
            << "  burn-in: " << config.mcmc.burn_in << "  thin: " << config.mcmc.thin
            << "  seed: " << config.mcmc.base_seed << "\n";
    summary << "retained draws: " << total << " (" << config.mcmc.retained_per_chain()
            << " per chain)\n";
    summary << "pi0 policy: " << pi0_policy_description(mtr, config.mcmc.pi0) << "\n\n";

    char line[160];
    summary << "parameter        mean          sd            psrf\n";
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i) {
        std::string psrf_text = "n/a";
        if (draws.chains.size() >= 2 && draws.chains.front().draws.size() >= 10) {
            std::snprintf(line, sizeof(line), "%.4f", psrf(draws, ArspiParams::kNames[i]));
            psrf_text = line;
        }
        std::snprintf(line, sizeof(line), "%-16s %-13.4f %-13.4f %s\n",
                      std::string(ArspiParams::kNames[i]).c_str(), mean[i], sd[i],
                      psrf_text.c_str());
        summary << line;
    }
    summary << "\nacceptance rates (post burn-in, mean over chains):\n";
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i) {
        double rate = 0.0;
        for (const ChainDraws& chain : draws.chains) rate += chain.acceptance_rate[i];
        rate /= static_cast<double>(draws.chains.size());
        std::snprintf(line, sizeof(line), "  %-16s %.3f\n",
                      std::string(ArspiParams::kNames[i]).c_str(), rate);
        summary << line;
    }
    std::snprintf(line, sizeof(line),
                  "\nDIC: d_bar=%.3f  d_at_mean=%.3f  p_d=%.3f  dic=%.3f\n", dic_result.d_bar,
                  dic_result.d_at_mean, dic_result.p_d, dic_result.dic);
    summary << line;
    emit(out_path(config, "fit_summary_" + window_tag(config) + ".txt"), summary.str());
}

void arspi_index(const RunConfig& config, const fs::path& posterior_path) {
    config.validate();
    if (!fs::exists(posterior_path))
        throw IoError("posterior file not found: " + posterior_path.string());
    const std::string posterior_csv = csv::read_file(posterior_path);

    const fs::path sidecar = meta_sidecar(posterior_path);
    std::string posterior_checksum = csv::fnv1a64_hex(posterior_csv);
    if (fs::exists(sidecar)) {
        const auto meta = nlohmann::json::parse(csv::read_file(sidecar));
        const std::string recorded = meta.value("checksum_fnv1a64", "");
        if (recorded != posterior_checksum)
            throw ChecksumMismatch("posterior file does not match its metadata sidecar (" +
                                   posterior_path.string() + ")");
    } else {
        std::cerr << "note: no metadata sidecar next to " << posterior_path.string()
                  << "; checksum verification skipped\n";
    }

    std::istringstream posterior_stream(posterior_csv);
    const PosteriorDraws draws = read_posterior_csv(posterior_stream);

    const MtrSeries mtr = load_mtr(config);
    const std::uint64_t seed = config.effective_predictive_seed();
    const IndexSeries series =
        arspi_series(draws, mtr, config.predictive_m, seed, config.mcmc.pi0);
    const fs::path index_path = out_path(config, "arspi_" + window_tag(config) + ".csv");
    const std::string index_csv = render_index_csv(series, "arspi");
    emit(index_path, index_csv);

    nlohmann::json meta;
    meta["m"] = config.predictive_m;
    meta["seed"] = seed;
    meta["clamp_epsilon"] = 1.0 / (2.0 * static_cast<double>(config.predictive_m));
    meta["posterior_checksum_fnv1a64"] = posterior_checksum;
    meta["window"] = config.window;
    meta["pi0_policy"] = pi0_policy_description(mtr, config.mcmc.pi0);
    emit(meta_sidecar(index_path), meta.dump(2) + "\n");

    const fs::path spi_path = config.out_dir / ("spi_" + window_tag(config) + ".csv");
    if (fs::exists(spi_path)) {
        const IndexSeries spi = load_index_csv(spi_path, "index", config.window);
        const std::array<PlotSeries, 2> plot = {
            PlotSeries{"SPI", "#1f77b4", record_ts(spi), record_values(spi)},
            PlotSeries{"ARSPI", "#d62728", record_ts(series), record_values(series)}};
        PlotOptions options;
        options.title = "SPI vs ARSPI, " + std::to_string(config.window) + "-month window";
        options.x_label = "window index t";
        options.y_label = "index";
        options.guides = {0.0, -1.5};
        std::ostringstream svg;
        write_line_plot_svg(svg, plot, options);
        emit(out_path(config, "compare_" + window_tag(config) + ".svg"), svg.str());
    }
}

void analyze(const RunConfig& config) {
    config.validate();
    const IndexSeries spi = load_index_csv(config.out_dir / ("spi_" + window_tag(config) + ".csv"),
                                           "index", config.window);
    const IndexSeries arspi = load_index_csv(
        config.out_dir / ("arspi_" + window_tag(config) + ".csv"), "arspi", config.window);

    const MismatchReport report = mismatch(spi, arspi);
    std::ostringstream mismatch_csv;
    write_mismatch_csv(mismatch_csv, report);
    emit(out_path(config, "mismatch_" + window_tag(config) + ".csv"), mismatch_csv.str());

    std::ostringstream summary;
    char line[160];
    summary << "SPI vs ARSPI analysis, window " << config.window << "\n";
    summary << "aligned windows: " << report.aligned_length << "\n";
    std::snprintf(line, sizeof(line), "type 1 (ARSPI > 0, SPI < -1.5): %zu (%.2f%%)\n",
                  report.type1.size(), 100.0 * report.type1_rate());
    summary << line;
    std::snprintf(line, sizeof(line), "type 2 (ARSPI < -1.5, SPI > 0): %zu (%.2f%%)\n",
                  report.type2.size(), 100.0 * report.type2_rate());
    summary << line;

    const double series_years = static_cast<double>(arspi.size()) / 12.0;
    constexpr std::array<Characteristic, 3> kCharacteristics = {
        Characteristic::Duration, Characteristic::Severity, Characteristic::Peak};

    for (const double threshold : config.thresholds) {
        const auto events = extract_events(arspi, threshold);
        const std::string label = threshold_label(threshold);
        summary << "\nthreshold " << label << ": " << events.size() << " event(s)\n";

        std::ostringstream events_csv;
        write_events_csv(events_csv, arspi, events);
        emit(out_path(config, "events_" + window_tag(config) + "_thr" + label + ".csv"),
             events_csv.str());

        std::ostringstream rp_csv;
        rp_csv << "characteristic,level,return_years\n";
        std::ostringstream hist_csv;
        hist_csv << "characteristic,bin_lo,bin_hi,count\n";
        if (!events.empty()) {
            for (const Characteristic c : kCharacteristics) {
                std::vector<double> values;
                values.reserve(events.size());
                for (const DroughtEvent& e : events) values.push_back(characteristic_value(e, c));

                std::vector<double> levels = values;
                std::sort(levels.begin(), levels.end());
                levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
                for (const double level : levels) {
                    rp_csv << characteristic_name(c) << ',' << csv::format_double(level) << ','
                           << csv::format_double(return_period(events, c, level, series_years))
                           << '\n';
                }
                for (const HistogramBin& bin : histogram(values, config.histogram_bins)) {
                    hist_csv << characteristic_name(c) << ',' << csv::format_double(bin.lo) << ','
                             << csv::format_double(bin.hi) << ',' << bin.count << '\n';
                }
            }
        }
        emit(out_path(config, "return_periods_" + window_tag(config) + "_thr" + label + ".csv"),
             rp_csv.str());
        emit(out_path(config, "hist_" + window_tag(config) + "_thr" + label + ".csv"),
             hist_csv.str());
    }
    emit(out_path(config, "analysis_summary_" + window_tag(config) + ".txt"), summary.str());
}

void acf_diagnostics(const RunConfig& config, bool log_scale) {
    config.validate();
    const MtrSeries mtr = load_mtr(config);
    std::vector<double> values;
    values.reserve(mtr.size());
    if (log_scale) {
        for (const double v : mtr.encoded_values) values.push_back(std::log(v));
    } else {
        values = mtr.values;
    }
    const std::size_t max_lag = std::min(config.acf_max_lag, values.size() - 1);
    const AcfResult a = acf(values, max_lag);
    const AcfResult p = pacf(values, max_lag);

    std::ostringstream acf_csv;
    write_acf_csv(acf_csv, a);
    emit(out_path(config, "acf_" + window_tag(config) + ".csv"), acf_csv.str());
    std::ostringstream pacf_csv;
    write_acf_csv(pacf_csv, p);
    emit(out_path(config, "pacf_" + window_tag(config) + ".csv"), pacf_csv.str());

    std::vector<double> lags(a.coefficients.size());
    for (std::size_t i = 0; i < lags.size(); ++i) lags[i] = static_cast<double>(i);
    const std::array<PlotSeries, 2> plot = {PlotSeries{"ACF", "#1f77b4", lags, a.coefficients},
                                            PlotSeries{"PACF", "#ff7f0e", lags, p.coefficients}};
    PlotOptions options;
    options.title = std::string("ACF/PACF of ") + (log_scale ? "ln encoded MTR" : "MTR") +
                    ", window " + std::to_string(config.window);
    options.x_label = "lag";
    options.y_label = "coefficient";
    options.guides = {a.confidence_band, -a.confidence_band};
    std::ostringstream svg;
    write_line_plot_svg(svg, plot, options);
    emit(out_path(config, "acf_" + window_tag(config) + ".svg"), svg.str());
}

void simulate(const SimulateConfig& config) {
    config.params.validate();
    if (config.length < 1) throw ConfigError("simulate: length must be >= 1");
    Rng rng(config.seed);
    const MtrSeries mtr =
        simulate_series(config.params, config.length, config.pi0, config.r0, rng);

    std::ostringstream data;
    data << "year,month,precip\n";
    for (std::size_t i = 0; i < mtr.size(); ++i) {
        const auto [year, month] = mtr.calendar_at(i);
        data << year << ',' << month << ',' << csv::format_double(mtr.values[i]) << '\n';
    }

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + config.out_dir.string());
    const fs::path data_path = config.out_dir / (config.name + ".csv");
    emit(data_path, data.str());

    std::ostringstream truth;
    truth << ArspiParams::kCsvHeader << '\n' << config.params.to_csv_row() << '\n';
    emit(config.out_dir / (config.name + "_params.csv"), truth.str());
}

}  // namespace cmd

}  // namespace arspi
