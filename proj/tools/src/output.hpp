#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace gelfand::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// A number rounded to the output precision; null when not finite.
nlohmann::ordered_json json_number(double v, int precision);

/// Writes <stem>.csv or <stem>.json depending on format. An incomplete table
/// carries a leading "# INCOMPLETE ..." line (CSV) or "incomplete" key (JSON).
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                                  const std::string& format, int precision, const std::string& incomplete_note = {});

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace gelfand::cli
