#include "output.hpp"

#include "gelfand/cli.hpp"
#include "gelfand/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace gelfand::cli {

std::string format_real(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, precision - 1);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json json_number(double v, int precision) {
  if (!std::isfinite(v)) return nullptr;
  const std::string s = format_real(v, precision);
  double rounded = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), rounded);
  return rounded;
}

namespace {

std::string csv_cell(const Cell& c, int precision) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d, precision);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

nlohmann::ordered_json json_cell(const Cell& c, int precision) {
  if (const auto* d = std::get_if<double>(&c)) return json_number(*d, precision);
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw InvalidSpec("cannot write " + file.string());
  os << text;
  if (!os) throw InvalidSpec("failed writing " + file.string());
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                                  const std::string& format, int precision, const std::string& incomplete_note) {
  if (format == "json") {
    nlohmann::ordered_json doc;
    if (!incomplete_note.empty()) {
      doc["incomplete"] = true;
      doc["note"] = incomplete_note;
    }
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      auto r = nlohmann::ordered_json::array();
      for (const auto& c : row) r.push_back(json_cell(c, precision));
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    const auto file = dir / (stem + ".json");
    write_text(file, doc.dump(2) + "\n");
    return file;
  }

  std::string text;
  if (!incomplete_note.empty()) text += "# INCOMPLETE " + incomplete_note + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) text += (i ? "," : "") + table.columns[i];
  text += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_cell(row[i], precision);
    text += "\n";
  }
  const auto file = dir / (stem + ".csv");
  write_text(file, text);
  return file;
}

}  // namespace gelfand::cli
