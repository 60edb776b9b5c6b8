#include "fqlsni/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "fqlsni/errors.hpp"

namespace fqlsni {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw DomainError("format_double: conversion failed");
  return std::string(buf.data(), end);
}

std::string csv_row(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string csv_row(std::span<const std::string> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += values[i];
  }
  return out;
}

void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "# " << kCsvSchema << '\n' << csv_row(header) << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
}

}  // namespace fqlsni
