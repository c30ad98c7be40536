#include "fuelclust/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "fuelclust/error.hpp"
#include "fuelclust/format.hpp"

namespace fuelclust {

namespace {

std::vector<std::vector<std::size_t>> members_by_cluster(const Samples& data, const Assignment& assignment) {
    if (data.dim() != 1) {
        throw InvalidArgument("cluster statistics need one-dimensional samples");
    }
    if (assignment.size() != data.size()) {
        throw InvalidArgument("assignment does not match the number of samples");
    }
    assignment.check();
    std::vector<std::vector<std::size_t>> members(assignment.k);
    for (std::size_t n = 0; n < data.size(); ++n) {
        members[assignment.labels[n]].push_back(n);
    }
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].empty()) {
            throw InvalidArgument("cluster " + std::to_string(c) + " has no members");
        }
    }
    return members;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::vector<ClusterStats> cluster_stats(const Samples& data, const Assignment& assignment) {
    const auto members = members_by_cluster(data, assignment);
    std::vector<ClusterStats> out;
    out.reserve(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<double> values;
        values.reserve(members[c].size());
        for (auto n : members[c]) {
            values.push_back(data.scalar(n));
        }
        std::sort(values.begin(), values.end());

        ClusterStats s;
        s.cluster_id = c;
        s.num = values.size();
        s.min = values.front();
        s.max = values.back();
        const std::size_t half = values.size() / 2;
        s.median = values.size() % 2 == 1 ? values[half] : (values[half - 1] + values[half]) / 2.0;
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.num);
        if (s.num < 2) {
            s.single_member = true;
            s.std = 0.0;
        } else {
            double ss = 0.0;
            for (double v : values) {
                ss += (v - s.mean) * (v - s.mean);
            }
            s.std = std::sqrt(ss / static_cast<double>(s.num - 1));
        }
        out.push_back(s);
    }
    return out;
}

const char* to_string(EfficiencyLevel level) {
    switch (level) {
    case EfficiencyLevel::extreme_efficiency:
        return "extreme_efficiency";
    case EfficiencyLevel::normal_efficiency:
        return "normal_efficiency";
    case EfficiencyLevel::low_efficiency:
        return "low_efficiency";
    case EfficiencyLevel::extremely_low_efficiency:
        return "extremely_low_efficiency";
    }
    return "unknown";
}

const char* describe(EfficiencyLevel level) {
    switch (level) {
    case EfficiencyLevel::extreme_efficiency:
        return "Extreme fuel efficiency";
    case EfficiencyLevel::normal_efficiency:
        return "Normal fuel efficiency";
    case EfficiencyLevel::low_efficiency:
        return "Low fuel efficiency";
    case EfficiencyLevel::extremely_low_efficiency:
        return "Extremely low fuel efficiency";
    }
    return "";
}

Labeling label_clusters(const std::vector<ClusterStats>& stats) {
    std::vector<std::size_t> order(stats.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (stats[a].mean != stats[b].mean) {
            return stats[a].mean < stats[b].mean;
        }
        return stats[a].cluster_id < stats[b].cluster_id;
    });

    constexpr EfficiencyLevel levels[] = {EfficiencyLevel::extreme_efficiency, EfficiencyLevel::normal_efficiency,
                                          EfficiencyLevel::low_efficiency,
                                          EfficiencyLevel::extremely_low_efficiency};
    Labeling out;
    out.labels.resize(stats.size());
    const bool four = stats.size() == 4;
    if (!four) {
        out.warning = "expected 4 clusters for efficiency labels, got " + std::to_string(stats.size()) +
                      "; using generic labels ordered by mean";
    }
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        auto& label = out.labels[order[rank]];
        label.cluster_id = stats[order[rank]].cluster_id;
        label.mean_rank = rank;
        if (four) {
            label.level = levels[rank];
            label.name = to_string(levels[rank]);
        } else {
            label.name = "cluster_" + std::to_string(rank);
        }
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw InvalidArgument("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    return sorted_quantile(values, std::clamp(q, 0.0, 1.0));
}

OutlierReport boxplot_outliers(std::span<const double> values, std::span<const std::size_t> ids) {
    if (values.empty()) {
        throw InvalidArgument("boxplot of an empty sample");
    }
    if (!ids.empty() && ids.size() != values.size()) {
        throw InvalidArgument("boxplot ids do not match the values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    OutlierReport r;
    r.q1 = sorted_quantile(sorted, 0.25);
    r.median = sorted_quantile(sorted, 0.5);
    r.q3 = sorted_quantile(sorted, 0.75);
    const double iqr = r.q3 - r.q1;
    r.lower = r.q1 - 1.5 * iqr;
    r.upper = r.q3 + 1.5 * iqr;
    r.whisker_low = r.upper;
    r.whisker_high = r.lower;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (v < r.lower || v > r.upper) {
            r.outlier_ids.push_back(ids.empty() ? i : ids[i]);
            r.outlier_values.push_back(v);
        } else {
            r.whisker_low = std::min(r.whisker_low, v);
            r.whisker_high = std::max(r.whisker_high, v);
        }
    }
    return r;
}

std::vector<OutlierReport> cluster_outliers(const Samples& data, const Assignment& assignment) {
    const auto members = members_by_cluster(data, assignment);
    std::vector<OutlierReport> out;
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<double> values;
        for (auto n : members[c]) {
            values.push_back(data.scalar(n));
        }
        auto report = boxplot_outliers(values, members[c]);
        report.cluster_id = c;
        out.push_back(std::move(report));
    }
    return out;
}

const char* to_string(GroupKey key) {
    return key == GroupKey::driver ? "driver" : "route";
}

bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < a.size() && is_digit(a[ie])) {
                ++ie;
            }
            while (je < b.size() && is_digit(b[je])) {
                ++je;
            }
            // Compare digit runs by value: strip leading zeros, then length, then text.
            std::size_t is = i;
            std::size_t js = j;
            while (is + 1 < ie && a[is] == '0') {
                ++is;
            }
            while (js + 1 < je && b[js] == '0') {
                ++js;
            }
            const auto la = ie - is;
            const auto lb = je - js;
            if (la != lb) {
                return la < lb;
            }
            const int cmp = a.compare(is, la, b, js, lb);
            if (cmp != 0) {
                return cmp < 0;
            }
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) {
                return a[i] < b[j];
            }
            ++i;
            ++j;
        }
    }
    if ((a.size() - i) != (b.size() - j)) {
        return (a.size() - i) < (b.size() - j);
    }
    return a < b;
}

ProportionTable group_proportions(const TripTable& table, const Assignment& assignment, GroupKey key) {
    if (assignment.size() != table.size()) {
        throw InvalidArgument("assignment is not aligned with the trip table");
    }
    assignment.check();
    const std::size_t k = assignment.k;

    auto cmp = [](const std::string& a, const std::string& b) { return natural_less(a, b); };
    std::map<std::string, std::vector<std::size_t>, decltype(cmp)> counts(cmp);
    std::vector<std::size_t> overall(k, 0);
    for (std::size_t n = 0; n < table.size(); ++n) {
        const auto& rec = table.records[n];
        const auto& id = key == GroupKey::driver ? rec.driver_id : rec.route_id;
        auto& row = counts[id];
        row.resize(k, 0);
        ++row[assignment.labels[n]];
        ++overall[assignment.labels[n]];
    }

    ProportionTable out;
    out.group_key = key;
    out.k = k;
    for (const auto& [id, row] : counts) {
        const std::size_t total = std::accumulate(row.begin(), row.end(), std::size_t{0});
        out.group_ids.push_back(id);
        out.trips.push_back(total);
        std::vector<double> fractions(k);
        for (std::size_t c = 0; c < k; ++c) {
            fractions[c] = static_cast<double>(row[c]) / static_cast<double>(total);
        }
        out.rows.push_back(std::move(fractions));
    }
    out.overall.assign(k, 0.0);
    if (!table.records.empty()) {
        for (std::size_t c = 0; c < k; ++c) {
            out.overall[c] = static_cast<double>(overall[c]) / static_cast<double>(table.size());
        }
    }
    return out;
}

DeviationReport deviation_report(const ProportionTable& props, double threshold, double dominance_threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0) || !(dominance_threshold >= 0.0 && dominance_threshold <= 1.0)) {
        throw InvalidArgument("deviation thresholds must lie in [0, 1]");
    }
    DeviationReport r;
    r.group_key = props.group_key;
    r.threshold = threshold;
    r.dominance_threshold = dominance_threshold;
    for (std::size_t g = 0; g < props.rows.size(); ++g) {
        GroupDeviation dev;
        dev.group_id = props.group_ids[g];
        dev.trips = props.trips[g];
        const auto& row = props.rows[g];
        for (std::size_t c = 0; c < row.size(); ++c) {
            dev.max_deviation = std::max(dev.max_deviation, std::fabs(row[c] - props.overall[c]));
            if (row[c] > dev.dominant_share) {
                dev.dominant_share = row[c];
                dev.dominant_cluster = c;
            }
        }
        dev.flagged = dev.max_deviation > threshold;
        dev.dominant = dev.dominant_share >= dominance_threshold;
        if (dev.flagged) {
            r.flagged_groups.push_back(dev.group_id);
        }
        if (dev.dominant) {
            r.dominant_groups.push_back(dev.group_id);
        }
        r.max_deviation = std::max(r.max_deviation, dev.max_deviation);
        r.groups.push_back(std::move(dev));
    }
    return r;
}

std::string stats_to_csv(const std::vector<ClusterStats>& stats, const Labeling& labels) {
    std::string out = "cluster,num,min,max,mean,median,std,definition\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        const auto& label = labels.labels.at(i);
        const std::string definition = label.level ? describe(*label.level) : label.name;
        out += std::to_string(s.cluster_id) + "," + std::to_string(s.num) + "," + fmt::shortest(s.min) + "," +
               fmt::shortest(s.max) + "," + fmt::shortest(s.mean) + "," + fmt::shortest(s.median) + "," +
               fmt::shortest(s.std) + "," + fmt::csv_field(definition) + "\n";
    }
    return out;
}

nlohmann::ordered_json to_json(const std::vector<ClusterStats>& stats, const Labeling& labels) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        const auto& label = labels.labels.at(i);
        nlohmann::ordered_json j;
        j["cluster"] = s.cluster_id;
        j["num"] = s.num;
        j["min"] = s.min;
        j["max"] = s.max;
        j["mean"] = s.mean;
        j["median"] = s.median;
        j["std"] = s.std;
        j["single_member"] = s.single_member;
        j["label"] = label.name;
        j["definition"] = label.level ? describe(*label.level) : label.name;
        rows.push_back(std::move(j));
    }
    return rows;
}

std::string proportions_to_csv(const ProportionTable& props) {
    std::string out = std::string(to_string(props.group_key)) + "_id,trips";
    for (std::size_t c = 0; c < props.k; ++c) {
        out += ",C" + std::to_string(c);
    }
    out += "\n";
    std::size_t total = 0;
    for (std::size_t g = 0; g < props.rows.size(); ++g) {
        out += fmt::csv_field(props.group_ids[g]) + "," + std::to_string(props.trips[g]);
        for (double v : props.rows[g]) {
            out += "," + fmt::shortest(v);
        }
        out += "\n";
        total += props.trips[g];
    }
    out += "overall," + std::to_string(total);
    for (double v : props.overall) {
        out += "," + fmt::shortest(v);
    }
    out += "\n";
    return out;
}

nlohmann::ordered_json to_json(const ProportionTable& props) {
    nlohmann::ordered_json j;
    j["group_key"] = to_string(props.group_key);
    j["k"] = props.k;
    auto groups = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < props.rows.size(); ++g) {
        nlohmann::ordered_json row;
        row["id"] = props.group_ids[g];
        row["trips"] = props.trips[g];
        row["proportions"] = props.rows[g];
        groups.push_back(std::move(row));
    }
    j["groups"] = std::move(groups);
    j["overall"] = props.overall;
    return j;
}

nlohmann::ordered_json to_json(const DeviationReport& report) {
    nlohmann::ordered_json j;
    j["group_key"] = to_string(report.group_key);
    j["threshold"] = report.threshold;
    j["dominance_threshold"] = report.dominance_threshold;
    j["max_deviation"] = report.max_deviation;
    j["flagged_count"] = report.flagged_groups.size();
    j["dominant_count"] = report.dominant_groups.size();
    j["flagged"] = report.flagged_groups;
    j["dominant"] = report.dominant_groups;
    auto groups = nlohmann::ordered_json::array();
    for (const auto& g : report.groups) {
        nlohmann::ordered_json row;
        row["id"] = g.group_id;
        row["trips"] = g.trips;
        row["max_deviation"] = g.max_deviation;
        row["dominant_cluster"] = g.dominant_cluster;
        row["dominant_share"] = g.dominant_share;
        row["flagged"] = g.flagged;
        row["dominant"] = g.dominant;
        groups.push_back(std::move(row));
    }
    j["groups"] = std::move(groups);
    return j;
}

nlohmann::ordered_json to_json(const OutlierReport& report) {
    nlohmann::ordered_json j;
    j["cluster"] = report.cluster_id;
    j["q1"] = report.q1;
    j["median"] = report.median;
    j["q3"] = report.q3;
    j["lower_fence"] = report.lower;
    j["upper_fence"] = report.upper;
    j["outlier_count"] = report.outlier_ids.size();
    j["outlier_ids"] = report.outlier_ids;
    j["outlier_values"] = report.outlier_values;
    return j;
}

} // namespace fuelclust
