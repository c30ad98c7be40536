#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fuelclust/gmm.hpp"
#include "fuelclust/ingest.hpp"
#include "fuelclust/model_select.hpp"
#include "fuelclust/validity.hpp"

namespace fuelclust {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_data_violations = 1,
    exit_io_error = 2,
    exit_numerical_failure = 3,
};

struct PipelineConfig {
    std::string input;
    ColumnMap columns;
    KRange k_range;
    std::optional<std::size_t> k;  ///< forces the cluster count for analyze
    EmConfig em;
    SilhouetteMode si_mode = SilhouetteMode::mean_samples;
    std::size_t min_run_size = 2;
    std::size_t max_rounds = 3;
    bool refine = true;
    double dominance_threshold = 0.9;
    double deviation_threshold = 0.5;
    std::size_t histogram_bins = 10;
    std::string out_dir = "out";

    /// Sets one field from its config-file key; InvalidArgument for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    /// Flat "key = value" document with every field, one per line.
    std::string to_text() const;

    /// Applies a config document on top of `base`. Blank lines and '#' comments are ignored.
    static PipelineConfig from_text(const std::string& text, PipelineConfig base);
    static PipelineConfig from_text(const std::string& text);
    static PipelineConfig from_file(const std::filesystem::path& path, PipelineConfig base);
    static PipelineConfig from_file(const std::filesystem::path& path);
};

/// Name of the resolved configuration written next to every command's outputs.
inline constexpr const char* resolved_config_name = "resolved_config.cfg";

/// Load + validate; writes validation.json. 0 clean, 1 violations, 2 unreadable input.
int cmd_validate(const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// Sweep, rank and select k; writes scores.{csv,json} and ranks.{csv,json} and prints k.
int cmd_select_k(const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// Full pipeline: fit, assign, refine, statistics, labels, outliers, proportions, charts.
int cmd_analyze(const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// Prints a text summary of a finished analyze run found in out_dir.
int cmd_report(const PipelineConfig& config, std::ostream& out, std::ostream& err);

} // namespace fuelclust
