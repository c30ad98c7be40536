#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fuelclust {

/// One bus trip. fuel_efficiency is consumption in L/100km, so lower is better.
struct TripRecord {
    std::string trip_id;
    std::string driver_id;
    std::string route_id;
    double fuel_efficiency = 0.0;

    bool operator==(const TripRecord&) const = default;
};

/// Records in file order.
struct TripTable {
    std::vector<TripRecord> records;
    std::string source_path;

    std::size_t size() const noexcept { return records.size(); }
    std::vector<double> efficiencies() const;
};

/// Maps the canonical field names onto the header names used in a particular file.
struct ColumnMap {
    std::string trip_id = "trip_id";
    std::string driver_id = "driver_id";
    std::string route_id = "route_id";
    std::string fuel_efficiency = "fuel_efficiency";

    /// Parses "field=column,field=column". Unknown fields raise InvalidArgument.
    static ColumnMap parse(const std::string& spec);
    std::string to_string() const;

    bool operator==(const ColumnMap&) const = default;
};

/// Loads a header-first CSV. Throws IoError for a missing file and ParseError for a
/// missing mapped column or a cell that is not a number.
TripTable load_trips(const std::filesystem::path& path, const ColumnMap& columns = {});

/// Writes the table back as CSV using the mapped header names.
std::string trips_to_csv(const TripTable& table, const ColumnMap& columns = {});

enum class ViolationKind { non_positive, non_finite, duplicate_trip_id };

const char* to_string(ViolationKind kind);

struct Violation {
    std::size_t row = 0; ///< 1-based data row
    std::string trip_id;
    ViolationKind kind = ViolationKind::non_positive;
    std::string detail;
};

struct ValidationReport {
    std::string source_path;
    std::size_t rows_read = 0;
    std::size_t valid_count = 0;
    std::vector<Violation> violations;
    /// Parallel to the table's records: true when the row passed every check.
    std::vector<bool> valid_mask;

    bool clean() const noexcept { return violations.empty(); }
};

/// Flags non-positive or non-finite efficiencies and repeated trip ids (the first
/// occurrence is kept). Never throws on bad data.
ValidationReport validate_trips(const TripTable& table);

/// The rows that passed validation, in file order.
TripTable valid_subset(const TripTable& table, const ValidationReport& report);

nlohmann::ordered_json to_json(const ValidationReport& report);

struct Histogram {
    std::vector<double> bin_edges;      ///< length bins + 1, strictly ascending
    std::vector<std::size_t> counts;    ///< length bins
};

/// Equal-width bins over [min, max]; the last bin is closed on both ends. A zero-width
/// range is widened to [v - 0.5, v + 0.5].
Histogram histogram(const std::vector<double>& values, std::size_t bins);

} // namespace fuelclust
