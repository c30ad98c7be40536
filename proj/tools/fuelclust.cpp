#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fuelclust/error.hpp"
#include "fuelclust/pipeline.hpp"

namespace {

using fuelclust::PipelineConfig;

struct Options {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool no_refine = false;
};

// Registers a string-valued flag that, when present, becomes a config override.
void add_override(CLI::App* app, Options& opts, const std::string& flag, const std::string& key,
                  const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); }, help);
}

void add_common(CLI::App* app, Options& opts) {
    app->add_option("--config", opts.config_path, "flat key = value config file");
    add_override(app, opts, "--input", "input", "trip CSV file");
    add_override(app, opts, "--columns", "columns", "column mapping, e.g. fuel_efficiency=fe,trip_id=id");
    add_override(app, opts, "--out-dir", "out_dir", "output directory");
}

void add_fit(CLI::App* app, Options& opts) {
    add_override(app, opts, "--k-range", "k_range", "candidate cluster counts A..B");
    add_override(app, opts, "--seed", "seed", "random seed");
    add_override(app, opts, "--si-mode", "si_mode", "mean_samples | mean_clusters | max_clusters");
    add_override(app, opts, "--init", "init", "quantile | kmeans_pp");
    add_override(app, opts, "--restarts", "n_restarts", "number of EM restarts");
    add_override(app, opts, "--max-iterations", "max_iterations", "EM iteration cap");
    add_override(app, opts, "--tolerance", "tolerance", "EM log-likelihood tolerance");
    add_override(app, opts, "--covariance-floor", "covariance_floor", "relative covariance floor");
}

void add_analyze(CLI::App* app, Options& opts) {
    add_override(app, opts, "--k", "k", "force the number of clusters");
    add_override(app, opts, "--min-run-size", "min_run_size", "smallest run counted when splitting");
    add_override(app, opts, "--max-rounds", "max_rounds", "refinement round cap");
    add_override(app, opts, "--dominance-threshold", "dominance_threshold", "share marking a dominant group");
    add_override(app, opts, "--deviation-threshold", "deviation_threshold", "max deviation marking a flagged group");
    add_override(app, opts, "--bins", "histogram_bins", "histogram bin count");
    app->add_flag("--no-refine", opts.no_refine, "skip cluster-splitting refinement");
}

PipelineConfig resolve(const Options& opts) {
    PipelineConfig config;
    if (!opts.config_path.empty()) {
        config = PipelineConfig::from_file(opts.config_path);
    }
    for (const auto& [key, value] : opts.overrides) {
        config.set(key, value);
    }
    if (opts.no_refine) {
        config.refine = false;
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuel-efficiency clustering toolkit"};
    app.require_subcommand(1);

    using Command = int (*)(const PipelineConfig&, std::ostream&, std::ostream&);
    std::vector<std::pair<CLI::App*, Command>> commands;
    Options opts;

    auto* validate = app.add_subcommand("validate", "check a trip file for invalid rows");
    add_common(validate, opts);
    commands.emplace_back(validate, &fuelclust::cmd_validate);

    auto* select_k = app.add_subcommand("select-k", "rank candidate cluster counts");
    add_common(select_k, opts);
    add_fit(select_k, opts);
    commands.emplace_back(select_k, &fuelclust::cmd_select_k);

    auto* analyze = app.add_subcommand("analyze", "run the full clustering analysis");
    add_common(analyze, opts);
    add_fit(analyze, opts);
    add_analyze(analyze, opts);
    commands.emplace_back(analyze, &fuelclust::cmd_analyze);

    auto* report = app.add_subcommand("report", "summarize a finished analysis");
    report->add_option("--config", opts.config_path, "flat key = value config file");
    add_override(report, opts, "--out-dir", "out_dir", "output directory of the analysis");
    commands.emplace_back(report, &fuelclust::cmd_report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fuelclust::exit_io_error;
    }

    PipelineConfig config;
    try {
        config = resolve(opts);
    } catch (const fuelclust::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fuelclust::exit_io_error;
    }
    for (const auto& [sub, run] : commands) {
        if (sub->parsed()) {
            return run(config, std::cout, std::cerr);
        }
    }
    return fuelclust::exit_io_error;
}
