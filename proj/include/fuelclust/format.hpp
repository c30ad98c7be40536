#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fuelclust::fmt {

/// Shortest decimal that round-trips to the same double; "inf"/"-inf"/"nan" for non-finite.
std::string shortest(double value);

/// Fixed notation with the given number of decimals, correctly rounded.
std::string fixed(double value, int decimals);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view field);

/// Writes text to a file, throwing IoError when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Reads a whole file, throwing IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

} // namespace fuelclust::fmt
