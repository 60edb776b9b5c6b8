#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fqlsni {

inline constexpr std::string_view kCsvSchema = "fqlsni-trajectory v1";

/// Shortest round-trip decimal form. Output depends only on the value, so
/// identical runs produce byte-identical files.
std::string format_double(double value);

std::string csv_row(std::span<const double> values);
std::string csv_row(std::span<const std::string> values);

/// Writes a schema comment line, a header and the rows.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows);

}  // namespace fqlsni
