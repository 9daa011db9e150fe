#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace latentlab {

enum class CellKind { Text, Integer, Real, Boolean };

struct ReportColumn {
  std::string name;
  CellKind kind = CellKind::Text;

  friend bool operator==(const ReportColumn&, const ReportColumn&) = default;
};

enum class PlotKind { Line, Bar };

/// How emit_report draws the table as SVG. A line plot puts `x` on the
/// horizontal axis and draws one polyline per value column (split further
/// by `series` when set). A bar plot groups value columns per row, labelled
/// by the `labels` columns.
struct PlotSpec {
  PlotKind kind = PlotKind::Line;
  std::string x;
  std::vector<std::string> labels;
  std::string series;
  std::vector<std::string> values;
  std::string y_label = "value";
};

/// A table whose cells are already formatted text. Column kinds decide how
/// JSON output types each cell.
struct SweepReport {
  std::string name;
  std::vector<ReportColumn> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
  PlotSpec plot;

  /// Throws ShapeError when the row width does not match the columns.
  void add_row(std::vector<std::string> row);
  /// Throws RangeError for unknown names.
  std::size_t column_index(std::string_view name) const;
  const std::string& cell(std::size_t row, std::string_view column) const;
};

enum class ReportFormat { Csv, Json, Svg };

ReportFormat parse_report_format(const std::string& name);
std::string extension(ReportFormat format);

std::string to_csv(const SweepReport& report);
/// Keys sorted at every level so diffs stay small.
std::string to_json(const SweepReport& report);
std::string to_svg(const SweepReport& report);

/// Header and rows of a CSV produced by to_csv; every column comes back as
/// Text. Throws FormatError on malformed input.
SweepReport parse_report_csv(std::string_view text);

/// Writes the report in one format. Throws IoError when the file cannot be
/// written.
void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path);

/// Writes <dir>/<name>.csv, .json and .svg, creating dir if needed.
void emit_all(const SweepReport& report, const std::filesystem::path& dir);

}  // namespace latentlab
