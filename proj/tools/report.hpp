#pragma once

// Tabular output shared by every subcommand: CSV with a versioned schema
// comment line, or JSON with a `meta` object and one array per table.
// Rows are produced lazily so million-row tables are never held in memory.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <ostream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "json.hpp"

namespace freqborn::cli {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::size_t row_count = 0;
  std::function<void(std::size_t, std::vector<Cell>&)> row;
};

struct Report {
  std::string command;
  std::string version;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<Table> tables;
};

enum class Format { csv, json };

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline void write_cell(std::ostream& out, const Cell& cell, Format format) {
  if (std::holds_alternative<std::monostate>(cell)) {
    if (format == Format::json) out << "null";
  } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    out << *i;
  } else if (const auto* d = std::get_if<double>(&cell)) {
    if (format == Format::json && !std::isfinite(*d))
      out << "null";
    else
      out << format_double(*d);
  } else {
    const auto& s = std::get<std::string>(cell);
    if (format == Format::json)
      out << nlohmann::json(s).dump();
    else
      out << s;
  }
}

inline void write_csv(std::ostream& out, const Report& report) {
  out << "#schema=v1 command=" << report.command << " version=" << report.version
      << '\n';
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < report.tables.size(); ++t) {
    const Table& table = report.tables[t];
    if (t > 0) out << "#section=" << table.name << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (std::size_t r = 0; r < table.row_count; ++r) {
      cells.clear();
      table.row(r, cells);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) out << ',';
        write_cell(out, cells[c], Format::csv);
      }
      out << '\n';
    }
  }
}

inline void write_json(std::ostream& out, const Report& report) {
  nlohmann::ordered_json meta;
  meta["command"] = report.command;
  meta["schema"] = "v1";
  meta["version"] = report.version;
  meta["parameters"] = report.parameters;
  out << "{\"meta\":" << meta.dump();
  std::vector<Cell> cells;
  for (const Table& table : report.tables) {
    out << ",\n" << nlohmann::json(table.name).dump() << ":[";
    for (std::size_t r = 0; r < table.row_count; ++r) {
      cells.clear();
      table.row(r, cells);
      out << (r ? ",\n{" : "\n{");
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) out << ',';
        out << nlohmann::json(table.columns[c]).dump() << ':';
        write_cell(out, cells[c], Format::json);
      }
      out << '}';
    }
    out << "]";
  }
  out << "}\n";
}

inline void write_report(std::ostream& out, const Report& report, Format format) {
  if (format == Format::csv)
    write_csv(out, report);
  else
    write_json(out, report);
}

// Writes next to the target and renames, so readers never see a partial file.
inline void write_report_file(const std::filesystem::path& path, const Report& report,
                              Format format) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write_report(out, report, format);
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace freqborn::cli
