#include "fuelclust/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "fuelclust/error.hpp"
#include "fuelclust/format.hpp"

namespace fuelclust {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) {
        return false;
    }
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

} // namespace

std::vector<double> TripTable::efficiencies() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(r.fuel_efficiency);
    }
    return out;
}

ColumnMap ColumnMap::parse(const std::string& spec) {
    ColumnMap map;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) {
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("column mapping '" + item + "' is not of the form field=column");
        }
        const auto field = trim(std::string_view(item).substr(0, eq));
        const auto column = trim(std::string_view(item).substr(eq + 1));
        if (column.empty()) {
            throw InvalidArgument("column mapping for '" + field + "' is empty");
        }
        if (field == "trip_id") {
            map.trip_id = column;
        } else if (field == "driver_id") {
            map.driver_id = column;
        } else if (field == "route_id") {
            map.route_id = column;
        } else if (field == "fuel_efficiency") {
            map.fuel_efficiency = column;
        } else {
            throw InvalidArgument("unknown field '" + field + "' in column mapping");
        }
    }
    return map;
}

std::string ColumnMap::to_string() const {
    return "trip_id=" + trip_id + ",driver_id=" + driver_id + ",route_id=" + route_id +
           ",fuel_efficiency=" + fuel_efficiency;
}

TripTable load_trips(const std::filesystem::path& path, const ColumnMap& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trip file '" + path.string() + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("trip file '" + path.string() + "' has no header row", 0, "");
    }
    if (line.starts_with("\xEF\xBB\xBF")) {
        line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_csv_line(line);

    auto locate = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ParseError("column '" + name + "' not found in header of '" + path.string() + "'", 0, name);
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t trip_col = locate(columns.trip_id);
    const std::size_t driver_col = locate(columns.driver_id);
    const std::size_t route_col = locate(columns.route_id);
    const std::size_t eff_col = locate(columns.fuel_efficiency);
    const std::size_t needed = std::max({trip_col, driver_col, route_col, eff_col}) + 1;

    TripTable table;
    table.source_path = path.string();
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        ++row;
        const auto fields = split_csv_line(line);
        if (fields.size() < needed) {
            throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                 " fields, expected at least " + std::to_string(needed),
                             row, "");
        }
        TripRecord record;
        record.trip_id = fields[trip_col];
        record.driver_id = fields[driver_col];
        record.route_id = fields[route_col];
        if (!parse_double(fields[eff_col], record.fuel_efficiency)) {
            throw ParseError("row " + std::to_string(row) + ", column '" + columns.fuel_efficiency +
                                 "': cannot parse '" + fields[eff_col] + "' as a number",
                             row, columns.fuel_efficiency);
        }
        table.records.push_back(std::move(record));
    }
    return table;
}

std::string trips_to_csv(const TripTable& table, const ColumnMap& columns) {
    std::string out = fmt::csv_field(columns.trip_id) + "," + fmt::csv_field(columns.driver_id) + "," +
                      fmt::csv_field(columns.route_id) + "," + fmt::csv_field(columns.fuel_efficiency) + "\n";
    for (const auto& r : table.records) {
        out += fmt::csv_field(r.trip_id) + "," + fmt::csv_field(r.driver_id) + "," + fmt::csv_field(r.route_id) +
               "," + fmt::shortest(r.fuel_efficiency) + "\n";
    }
    return out;
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::non_positive:
        return "non_positive";
    case ViolationKind::non_finite:
        return "non_finite";
    case ViolationKind::duplicate_trip_id:
        return "duplicate_trip_id";
    }
    return "unknown";
}

ValidationReport validate_trips(const TripTable& table) {
    ValidationReport report;
    report.source_path = table.source_path;
    report.rows_read = table.size();
    report.valid_mask.assign(table.size(), true);

    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& r = table.records[i];
        const std::size_t row = i + 1;
        if (!std::isfinite(r.fuel_efficiency)) {
            report.violations.push_back({row, r.trip_id, ViolationKind::non_finite,
                                         "fuel_efficiency is " + fmt::shortest(r.fuel_efficiency)});
            report.valid_mask[i] = false;
        } else if (r.fuel_efficiency <= 0.0) {
            report.violations.push_back({row, r.trip_id, ViolationKind::non_positive,
                                         "fuel_efficiency is " + fmt::shortest(r.fuel_efficiency)});
            report.valid_mask[i] = false;
        }
        if (!seen.insert(r.trip_id).second) {
            report.violations.push_back(
                {row, r.trip_id, ViolationKind::duplicate_trip_id, "trip_id '" + r.trip_id + "' already seen"});
            report.valid_mask[i] = false;
        }
    }
    report.valid_count = static_cast<std::size_t>(std::count(report.valid_mask.begin(), report.valid_mask.end(), true));
    return report;
}

TripTable valid_subset(const TripTable& table, const ValidationReport& report) {
    TripTable out;
    out.source_path = table.source_path;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (report.valid_mask.at(i)) {
            out.records.push_back(table.records[i]);
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const ValidationReport& report) {
    nlohmann::ordered_json j;
    j["source_path"] = report.source_path;
    j["rows_read"] = report.rows_read;
    j["valid_count"] = report.valid_count;
    auto violations = nlohmann::ordered_json::array();
    for (const auto& v : report.violations) {
        nlohmann::ordered_json item;
        item["row"] = v.row;
        item["trip_id"] = v.trip_id;
        item["kind"] = to_string(v.kind);
        item["detail"] = v.detail;
        violations.push_back(std::move(item));
    }
    j["violations"] = std::move(violations);
    return j;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
    if (values.empty()) {
        throw InvalidArgument("histogram of an empty sample");
    }
    if (bins == 0) {
        throw InvalidArgument("histogram needs at least one bin");
    }
    auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    double lo = *min_it;
    double hi = *max_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidArgument("histogram input contains non-finite values");
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    Histogram h;
    h.bin_edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        h.bin_edges[b] = lo + width * static_cast<double>(b);
    }
    h.bin_edges[bins] = hi;
    h.counts.assign(bins, 0);

    for (double v : values) {
        auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
        b = std::min(b, bins - 1);
        // Rounding in the division can land one bin off the stored edges.
        while (b > 0 && v < h.bin_edges[b]) {
            --b;
        }
        while (b + 1 < bins && v >= h.bin_edges[b + 1]) {
            ++b;
        }
        ++h.counts[b];
    }
    return h;
}

} // namespace fuelclust
