#include "fuelclust/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "fuelclust/analysis.hpp"
#include "fuelclust/charts.hpp"
#include "fuelclust/error.hpp"
#include "fuelclust/format.hpp"
#include "fuelclust/refine.hpp"

namespace fuelclust {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) {
        throw InvalidArgument("config key '" + key + "': '" + value + "' is not a number");
    }
    return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long out = 0;
    try {
        if (!value.empty() && value.front() != '-') {
            out = std::stoull(value, &used);
        }
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) {
        throw InvalidArgument("config key '" + key + "': '" + value + "' is not a non-negative integer");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw InvalidArgument("config key '" + key + "': '" + value + "' is not a boolean");
}

std::string dump(const nlohmann::ordered_json& j) {
    return j.dump(2) + "\n";
}

void prepare_out_dir(const PipelineConfig& config) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + config.out_dir + "': " + ec.message());
    }
    fmt::write_file(fs::path(config.out_dir) / resolved_config_name, config.to_text());
}

struct LoadedInput {
    TripTable all;
    ValidationReport report;
    TripTable valid;
};

LoadedInput load_input(const PipelineConfig& config) {
    if (config.input.empty()) {
        throw InvalidArgument("no input file given");
    }
    LoadedInput in;
    in.all = load_trips(config.input, config.columns);
    in.report = validate_trips(in.all);
    in.valid = valid_subset(in.all, in.report);
    return in;
}

// Drops empty clusters, keeping the relative order of the remaining ids.
Assignment compact(const Assignment& a) {
    const auto sizes = a.sizes();
    std::vector<std::size_t> remap(a.k, 0);
    std::size_t next = 0;
    for (std::size_t c = 0; c < a.k; ++c) {
        remap[c] = next;
        if (sizes[c] > 0) {
            ++next;
        }
    }
    Assignment out;
    out.k = next;
    out.labels.reserve(a.size());
    for (auto label : a.labels) {
        out.labels.push_back(remap[label]);
    }
    return out;
}

struct Selection {
    ScoreTable scores;
    RankTable ranks;
};

// Shared by select-k and analyze.
Selection run_selection(const Samples& data, const PipelineConfig& config) {
    Selection s;
    s.scores = sweep(data, config.k_range, config.em, config.si_mode);
    const bool all_failed =
        std::all_of(s.scores.rows.begin(), s.scores.rows.end(), [](const ScoreRow& r) { return r.failed; });
    if (all_failed) {
        throw FitFailure("every fit in k range " + config.k_range.to_string() + " failed");
    }
    s.ranks = rank_scores(s.scores);
    const fs::path dir = config.out_dir;
    fmt::write_file(dir / "scores.csv", scores_to_csv(s.scores));
    fmt::write_file(dir / "scores.json", dump(to_json(s.scores)));
    fmt::write_file(dir / "ranks.csv", ranks_to_csv(s.ranks));
    fmt::write_file(dir / "ranks.json", dump(to_json(s.ranks)));
    return s;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io_error;
    } catch (const FitFailure& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical_failure;
    } catch (const ComponentCollapse& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical_failure;
    } catch (const NotPositiveDefinite& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical_failure;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return exit_io_error;
    }
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

} // namespace

void PipelineConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "input") {
        input = value;
    } else if (key == "columns") {
        columns = ColumnMap::parse(value);
    } else if (key == "k_range") {
        k_range = KRange::parse(value);
    } else if (key == "k") {
        if (value.empty() || value == "auto") {
            k.reset();
        } else {
            k = static_cast<std::size_t>(parse_unsigned(key, value));
        }
    } else if (key == "seed") {
        em.seed = parse_unsigned(key, value);
    } else if (key == "max_iterations") {
        em.max_iterations = static_cast<int>(parse_unsigned(key, value));
    } else if (key == "tolerance") {
        em.tolerance = parse_real(key, value);
    } else if (key == "n_restarts") {
        em.n_restarts = static_cast<int>(parse_unsigned(key, value));
    } else if (key == "covariance_floor") {
        em.covariance_floor = parse_real(key, value);
    } else if (key == "init") {
        em.init = parse_init_strategy(value);
    } else if (key == "si_mode") {
        si_mode = parse_silhouette_mode(value);
    } else if (key == "min_run_size") {
        min_run_size = static_cast<std::size_t>(parse_unsigned(key, value));
    } else if (key == "max_rounds") {
        max_rounds = static_cast<std::size_t>(parse_unsigned(key, value));
    } else if (key == "refine") {
        refine = parse_bool(key, value);
    } else if (key == "dominance_threshold") {
        dominance_threshold = parse_real(key, value);
    } else if (key == "deviation_threshold") {
        deviation_threshold = parse_real(key, value);
    } else if (key == "histogram_bins") {
        histogram_bins = static_cast<std::size_t>(parse_unsigned(key, value));
    } else if (key == "out_dir") {
        out_dir = value;
    } else {
        throw InvalidArgument("unknown config key '" + key + "'");
    }
}

std::string PipelineConfig::to_text() const {
    std::ostringstream out;
    out << "input = " << input << "\n";
    out << "columns = " << columns.to_string() << "\n";
    out << "k_range = " << k_range.to_string() << "\n";
    out << "k = " << (k ? std::to_string(*k) : std::string("auto")) << "\n";
    out << "seed = " << em.seed << "\n";
    out << "max_iterations = " << em.max_iterations << "\n";
    out << "tolerance = " << fmt::shortest(em.tolerance) << "\n";
    out << "n_restarts = " << em.n_restarts << "\n";
    out << "covariance_floor = " << fmt::shortest(em.covariance_floor) << "\n";
    out << "init = " << to_string(em.init) << "\n";
    out << "si_mode = " << to_string(si_mode) << "\n";
    out << "min_run_size = " << min_run_size << "\n";
    out << "max_rounds = " << max_rounds << "\n";
    out << "refine = " << (refine ? "true" : "false") << "\n";
    out << "dominance_threshold = " << fmt::shortest(dominance_threshold) << "\n";
    out << "deviation_threshold = " << fmt::shortest(deviation_threshold) << "\n";
    out << "histogram_bins = " << histogram_bins << "\n";
    out << "out_dir = " << out_dir << "\n";
    return out.str();
}

PipelineConfig PipelineConfig::from_text(const std::string& text, PipelineConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(line_no) + " is not key = value");
        }
        base.set(trim(body.substr(0, eq)), body.substr(eq + 1));
    }
    return base;
}

PipelineConfig PipelineConfig::from_file(const fs::path& path, PipelineConfig base) {
    return from_text(fmt::read_file(path), std::move(base));
}

PipelineConfig PipelineConfig::from_text(const std::string& text) {
    return from_text(text, PipelineConfig{});
}

PipelineConfig PipelineConfig::from_file(const fs::path& path) {
    return from_file(path, PipelineConfig{});
}

int cmd_validate(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto in = load_input(config);
        prepare_out_dir(config);
        fmt::write_file(fs::path(config.out_dir) / "validation.json", dump(to_json(in.report)));
        out << in.report.rows_read << " rows read, " << in.report.valid_count << " valid, "
            << in.report.violations.size() << " violations\n";
        for (const auto& v : in.report.violations) {
            out << "  row " << v.row << " (" << v.trip_id << "): " << to_string(v.kind) << ", " << v.detail << "\n";
        }
        return in.report.clean() ? exit_ok : exit_data_violations;
    });
}

int cmd_select_k(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto in = load_input(config);
        prepare_out_dir(config);
        if (!in.report.clean()) {
            err << "warning: " << in.report.violations.size() << " invalid rows excluded\n";
        }
        const auto data = Samples::from_scalars(in.valid.efficiencies());
        const auto selection = run_selection(data, config);
        out << selection.ranks.selected_k << "\n";
        return exit_ok;
    });
}

int cmd_analyze(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto in = load_input(config);
        prepare_out_dir(config);
        const fs::path dir = config.out_dir;
        fmt::write_file(dir / "validation.json", dump(to_json(in.report)));
        if (!in.report.clean()) {
            err << "warning: " << in.report.violations.size() << " invalid rows excluded\n";
        }
        if (in.valid.size() < 2) {
            throw InvalidArgument("fewer than two valid trips to analyze");
        }
        const auto values = in.valid.efficiencies();
        const auto data = Samples::from_scalars(values);

        std::size_t k = 0;
        if (config.k) {
            k = *config.k;
        } else {
            k = run_selection(data, config).ranks.selected_k;
        }

        const auto fit = fit_em(data, k, config.em);
        fmt::write_file(dir / "model.json", dump(to_json(fit)));
        nlohmann::ordered_json warnings = nlohmann::ordered_json::array();

        auto initial = assign(data, fit.model);
        const auto initial_sizes = initial.sizes();
        const auto empty = static_cast<std::size_t>(std::count(initial_sizes.begin(), initial_sizes.end(), 0U));
        if (empty > 0) {
            warnings.push_back(std::to_string(empty) + " fitted component(s) won no samples and were dropped");
            initial = compact(initial);
        }

        auto final_assignment = initial;
        if (config.refine) {
            const auto refined = refine_until_stable(data, initial, config.max_rounds, config.min_run_size);
            final_assignment = refined.assignment;
            fmt::write_file(dir / "split_log.json", dump(to_json(refined.rounds)));
            if (!refined.stable) {
                warnings.push_back("refinement stopped after max_rounds with candidates left");
            }
        } else {
            std::error_code ec;
            fs::remove(dir / "split_log.json", ec);
        }

        const auto stats = cluster_stats(data, final_assignment);
        const auto labels = label_clusters(stats);
        if (!labels.warning.empty()) {
            warnings.push_back(labels.warning);
            err << "warning: " << labels.warning << "\n";
        }
        fmt::write_file(dir / "cluster_stats.csv", stats_to_csv(stats, labels));
        fmt::write_file(dir / "cluster_stats.json", dump(to_json(stats, labels)));

        auto outliers = cluster_outliers(data, final_assignment);
        nlohmann::ordered_json outlier_json = nlohmann::ordered_json::array();
        for (const auto& r : outliers) {
            auto j = to_json(r);
            nlohmann::ordered_json trips = nlohmann::ordered_json::array();
            for (auto id : r.outlier_ids) {
                trips.push_back(in.valid.records[id].trip_id);
            }
            j["outlier_trip_ids"] = std::move(trips);
            outlier_json.push_back(std::move(j));
        }
        fmt::write_file(dir / "outliers.json", dump(outlier_json));

        std::string assignments = "trip_id,driver_id,route_id,fuel_efficiency,cluster,label\n";
        for (std::size_t n = 0; n < in.valid.size(); ++n) {
            const auto& r = in.valid.records[n];
            const auto c = final_assignment.labels[n];
            assignments += fmt::csv_field(r.trip_id) + "," + fmt::csv_field(r.driver_id) + "," +
                           fmt::csv_field(r.route_id) + "," + fmt::shortest(r.fuel_efficiency) + "," +
                           std::to_string(c) + "," + labels.labels[c].name + "\n";
        }
        fmt::write_file(dir / "assignments.csv", assignments);

        nlohmann::ordered_json deviation_summary;
        std::vector<ProportionTable> proportion_tables;
        for (auto key : {GroupKey::driver, GroupKey::route}) {
            const auto props = group_proportions(in.valid, final_assignment, key);
            const auto dev = deviation_report(props, config.deviation_threshold, config.dominance_threshold);
            const std::string stem = std::string(to_string(key));
            fmt::write_file(dir / ("proportions_" + stem + ".csv"), proportions_to_csv(props));
            fmt::write_file(dir / ("proportions_" + stem + ".json"), dump(to_json(props)));
            fmt::write_file(dir / ("deviation_" + stem + ".json"), dump(to_json(dev)));
            nlohmann::ordered_json d;
            d["groups"] = props.group_ids.size();
            d["flagged"] = dev.flagged_groups.size();
            d["dominant"] = dev.dominant_groups.size();
            d["max_deviation"] = dev.max_deviation;
            deviation_summary[stem] = std::move(d);
            proportion_tables.push_back(props);
        }

        const fs::path charts = dir / "charts";
        std::error_code ec;
        fs::create_directories(charts, ec);
        if (ec) {
            throw IoError("cannot create chart directory '" + charts.string() + "'");
        }
        const auto palette = default_palette(std::max(final_assignment.k, fit.model.k()));
        render({ChartKind::histogram, "Distribution of fuel efficiency", "Fuel efficiency (L/100km)",
                "Number of trips", HistogramPayload{histogram(values, config.histogram_bins)}, palette},
               charts / "histogram.svg");
        render({ChartKind::mixture_overlay, "Initial GMM clustering", "Fuel efficiency (L/100km)", "Density",
                MixtureOverlayPayload{fit.model, values, assign(data, fit.model).labels}, palette},
               charts / "mixture_initial.svg");
        render({ChartKind::mixture_overlay, "Refined clustering", "Fuel efficiency (L/100km)", "Density",
                MixtureOverlayPayload{moment_model(data, final_assignment, config.em.covariance_floor), values,
                                      final_assignment.labels},
                palette},
               charts / "mixture_refined.svg");
        render({ChartKind::stacked_bars, "Trip share per cluster by driver", "Driver", "Trips (%)",
                StackedBarsPayload{proportion_tables[0]}, palette},
               charts / "drivers.svg");
        render({ChartKind::stacked_bars, "Trip share per cluster by route", "Route", "Trips (%)",
                StackedBarsPayload{proportion_tables[1]}, palette},
               charts / "routes.svg");
        render({ChartKind::boxplots, "Fuel efficiency per cluster", "Cluster", "Fuel efficiency (L/100km)",
                BoxplotsPayload{outliers}, palette},
               charts / "boxplots.svg");

        nlohmann::ordered_json summary;
        summary["trips"] = in.valid.size();
        summary["excluded_rows"] = in.report.violations.size();
        summary["k_fit"] = k;
        summary["clusters"] = final_assignment.k;
        summary["refined"] = config.refine;
        summary["log_likelihood"] = fit.log_likelihood();
        summary["converged"] = fit.converged;
        summary["stats"] = to_json(stats, labels);
        auto outlier_counts = nlohmann::ordered_json::array();
        for (const auto& r : outliers) {
            outlier_counts.push_back(r.outlier_ids.size());
        }
        summary["outlier_counts"] = std::move(outlier_counts);
        summary["proportions"] = std::move(deviation_summary);
        summary["warnings"] = std::move(warnings);
        fmt::write_file(dir / "summary.json", dump(summary));

        out << "fitted k = " << k << ", final clusters = " << final_assignment.k << "\n";
        return exit_ok;
    });
}

int cmd_report(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto text = fmt::read_file(fs::path(config.out_dir) / "summary.json");
        nlohmann::json summary;
        try {
            summary = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(std::string("summary.json is not valid JSON: ") + e.what());
        }
        out << "Trips analysed: " << summary.value("trips", 0) << " (excluded " << summary.value("excluded_rows", 0)
            << ")\n";
        out << "Fitted k: " << summary.value("k_fit", 0) << ", clusters after refinement: "
            << summary.value("clusters", 0) << "\n\n";
        out << pad("Cluster", 8) << pad("num", 7) << pad("min", 9) << pad("max", 9) << pad("mean", 9)
            << pad("median", 9) << pad("std", 9) << "  definition\n";
        for (const auto& row : summary.at("stats")) {
            out << pad(std::to_string(row.at("cluster").get<std::size_t>()), 8)
                << pad(std::to_string(row.at("num").get<std::size_t>()), 7)
                << pad(fmt::fixed(row.at("min").get<double>(), 2), 9)
                << pad(fmt::fixed(row.at("max").get<double>(), 2), 9)
                << pad(fmt::fixed(row.at("mean").get<double>(), 2), 9)
                << pad(fmt::fixed(row.at("median").get<double>(), 2), 9)
                << pad(fmt::fixed(row.at("std").get<double>(), 2), 9) << "  "
                << row.at("definition").get<std::string>() << "\n";
        }
        out << "\n";
        for (const auto& [key, d] : summary.at("proportions").items()) {
            out << key << "s: " << d.at("groups").get<std::size_t>() << " groups, "
                << d.at("flagged").get<std::size_t>() << " deviating, " << d.at("dominant").get<std::size_t>()
                << " dominated by one cluster\n";
        }
        for (const auto& w : summary.at("warnings")) {
            out << "warning: " << w.get<std::string>() << "\n";
        }
        return exit_ok;
    });
}

} // namespace fuelclust
