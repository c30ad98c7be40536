#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuelclust/ingest.hpp"
#include "fuelclust/samples.hpp"

namespace fuelclust {

struct ClusterStats {
    std::size_t cluster_id = 0;
    std::size_t num = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0;             ///< sample standard deviation (n - 1)
    bool single_member = false;   ///< std reported as 0 because n - 1 = 0
};

/// One row per cluster in id order. Requires 1-D samples and no empty cluster.
std::vector<ClusterStats> cluster_stats(const Samples& data, const Assignment& assignment);

/// Consumption levels, lowest L/100km first.
enum class EfficiencyLevel { extreme_efficiency, normal_efficiency, low_efficiency, extremely_low_efficiency };

const char* to_string(EfficiencyLevel level);
/// Human-readable definition used in reports.
const char* describe(EfficiencyLevel level);

struct ClusterLabel {
    std::size_t cluster_id = 0;
    std::size_t mean_rank = 0;               ///< 0 for the lowest mean
    std::optional<EfficiencyLevel> level;    ///< set only when there are exactly four clusters
    std::string name;                        ///< level name, or cluster_<rank> otherwise
};

struct Labeling {
    std::vector<ClusterLabel> labels;  ///< same order as the input stats
    std::string warning;               ///< non-empty when generic labels were used
};

/// Orders clusters by mean and names them; four clusters map onto the efficiency levels.
Labeling label_clusters(const std::vector<ClusterStats>& stats);

/// Quantile by linear interpolation between order statistics (positions q * (n - 1)).
double quantile(std::vector<double> values, double q);

struct OutlierReport {
    std::size_t cluster_id = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double lower = 0.0;          ///< Q1 - 1.5 IQR
    double upper = 0.0;          ///< Q3 + 1.5 IQR
    double whisker_low = 0.0;    ///< smallest value inside the fences
    double whisker_high = 0.0;   ///< largest value inside the fences
    std::vector<std::size_t> outlier_ids;  ///< ids of values strictly outside the fences
    std::vector<double> outlier_values;
};

/// Tukey fences over the values. ids default to positions in `values`.
OutlierReport boxplot_outliers(std::span<const double> values, std::span<const std::size_t> ids = {});

/// One report per cluster; ids are sample indices.
std::vector<OutlierReport> cluster_outliers(const Samples& data, const Assignment& assignment);

enum class GroupKey { driver, route };

const char* to_string(GroupKey key);

struct ProportionTable {
    GroupKey group_key = GroupKey::driver;
    std::size_t k = 0;
    std::vector<std::string> group_ids;           ///< natural order ("D2" before "D10")
    std::vector<std::size_t> trips;               ///< trips per group
    std::vector<std::vector<double>> rows;        ///< per group, length k, sums to 1
    std::vector<double> overall;                  ///< over all trips, length k
};

/// Fraction of each group's trips in every cluster. `assignment` is aligned with the table rows.
ProportionTable group_proportions(const TripTable& table, const Assignment& assignment, GroupKey key);

struct GroupDeviation {
    std::string group_id;
    std::size_t trips = 0;
    double max_deviation = 0.0;   ///< L-infinity distance to the overall vector
    std::size_t dominant_cluster = 0;
    double dominant_share = 0.0;
    bool flagged = false;         ///< max_deviation > threshold
    bool dominant = false;        ///< dominant_share >= dominance threshold
};

struct DeviationReport {
    GroupKey group_key = GroupKey::driver;
    double threshold = 0.0;
    double dominance_threshold = 0.9;
    std::vector<GroupDeviation> groups;
    std::vector<std::string> flagged_groups;
    std::vector<std::string> dominant_groups;
    double max_deviation = 0.0;
};

DeviationReport deviation_report(const ProportionTable& props, double threshold, double dominance_threshold = 0.9);

/// Table-2 style: cluster,num,min,max,mean,median,std,definition.
std::string stats_to_csv(const std::vector<ClusterStats>& stats, const Labeling& labels);
nlohmann::ordered_json to_json(const std::vector<ClusterStats>& stats, const Labeling& labels);

std::string proportions_to_csv(const ProportionTable& props);
nlohmann::ordered_json to_json(const ProportionTable& props);
nlohmann::ordered_json to_json(const DeviationReport& report);
nlohmann::ordered_json to_json(const OutlierReport& report);

/// Compares strings with embedded digit runs by numeric value.
bool natural_less(const std::string& a, const std::string& b);

} // namespace fuelclust
