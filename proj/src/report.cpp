#include "latentlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "latentlab/error.hpp"
#include "latentlab/format.hpp"

namespace latentlab {

void SweepReport::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw ShapeError("row has " + std::to_string(row.size()) + " cells, report has " +
                     std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::size_t SweepReport::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw RangeError("no column named " + std::string(name));
}

const std::string& SweepReport::cell(std::size_t row, std::string_view column) const {
  return rows.at(row).at(column_index(column));
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "svg") return ReportFormat::Svg;
  throw ConfigError("unknown report format '" + name + "' (expected csv, json or svg)");
}

std::string extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv:
      return ".csv";
    case ReportFormat::Json:
      return ".json";
    case ReportFormat::Svg:
      return ".svg";
  }
  return ".txt";
}

namespace {

bool needs_quotes(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

void put_field(std::string& out, const std::string& field) {
  if (!needs_quotes(field)) {
    out += field;
    return;
  }
  out += '"';
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void put_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    put_field(out, fields[i]);
  }
  out += '\n';
}

std::string kind_name(CellKind kind) {
  switch (kind) {
    case CellKind::Text:
      return "text";
    case CellKind::Integer:
      return "integer";
    case CellKind::Real:
      return "real";
    case CellKind::Boolean:
      return "boolean";
  }
  return "text";
}

nlohmann::json typed_cell(const std::string& text, CellKind kind) {
  switch (kind) {
    case CellKind::Integer: {
      long long value = 0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec == std::errc{} && res.ptr == text.data() + text.size()) return value;
      break;
    }
    case CellKind::Real: {
      double value = 0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec == std::errc{} && res.ptr == text.data() + text.size() && std::isfinite(value)) return value;
      break;
    }
    case CellKind::Boolean:
      if (text == "true") return true;
      if (text == "false") return false;
      break;
    case CellKind::Text:
      break;
  }
  return text;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

double parse_number(const std::string& text) {
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{}) return std::nan("");
  return value;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];

struct Frame {
  double width = 720;
  double height = 420;
  double left = 60;
  double right = 180;
  double top = 40;
  double bottom = 70;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

std::string num(double v) { return format_fixed(v, 2); }

void open_svg(std::ostringstream& out, const Frame& f, const SweepReport& report) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width) << "\" height=\"" << num(f.height)
      << "\" viewBox=\"0 0 " << num(f.width) << ' ' << num(f.height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(f.width) << "\" height=\"" << num(f.height)
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(f.left) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(report.name) << "</text>\n";
}

void y_axis(std::ostringstream& out, const Frame& f, double ymax, const std::string& label) {
  const double x0 = f.left;
  const double y0 = f.top + f.plot_h();
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(f.top) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0 + f.plot_w()) << "\" y2=\""
      << num(y0) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    const double y = y0 - f.plot_h() * t / 4.0;
    out << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << format_fixed(v, 2)
        << "</text>\n";
  }
  out << "<text x=\"14\" y=\"" << num(f.top + f.plot_h() / 2) << "\" font-family=\"sans-serif\" font-size=\"11\""
      << " transform=\"rotate(-90 14 " << num(f.top + f.plot_h() / 2) << ")\" text-anchor=\"middle\">"
      << xml_escape(label) << "</text>\n";
}

void legend(std::ostringstream& out, const Frame& f, const std::vector<std::string>& names) {
  const double x = f.width - f.right + 16;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = f.top + 16.0 * static_cast<double>(i);
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[i % kPaletteSize] << "\"/>\n";
    out << "<text x=\"" << num(x + 14) << "\" y=\"" << num(y + 9) << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << xml_escape(names[i]) << "</text>\n";
  }
}

double value_max(const SweepReport& report, const std::vector<std::size_t>& cols) {
  double ymax = 1.0;
  for (const auto& row : report.rows) {
    for (const auto c : cols) {
      const double v = parse_number(row[c]);
      if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
  }
  return ymax;
}

void line_plot(std::ostringstream& out, const Frame& f, const SweepReport& report) {
  const auto& spec = report.plot;
  const std::size_t xc = report.column_index(spec.x);
  std::vector<std::size_t> vcols;
  for (const auto& v : spec.values) vcols.push_back(report.column_index(v));

  std::vector<std::string> groups;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const std::string key = spec.series.empty() ? std::string() : report.rows[r][report.column_index(spec.series)];
    auto it = std::find(groups.begin(), groups.end(), key);
    if (it == groups.end()) {
      groups.push_back(key);
      members.emplace_back();
      it = groups.end() - 1;
    }
    members[static_cast<std::size_t>(it - groups.begin())].push_back(r);
  }

  double xmin = INFINITY;
  double xmax = -INFINITY;
  std::vector<double> ticks;
  for (const auto& row : report.rows) {
    const double x = parse_number(row[xc]);
    if (!std::isfinite(x)) continue;
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    if (std::find(ticks.begin(), ticks.end(), x) == ticks.end()) ticks.push_back(x);
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
  }
  if (xmax == xmin) {
    xmin -= 1;
    xmax += 1;
  }
  const double ymax = value_max(report, vcols);
  y_axis(out, f, ymax, spec.y_label);

  const double y0 = f.top + f.plot_h();
  auto px = [&](double x) { return f.left + (x - xmin) / (xmax - xmin) * f.plot_w(); };
  auto py = [&](double y) { return y0 - y / ymax * f.plot_h(); };

  std::sort(ticks.begin(), ticks.end());
  const std::size_t stride = ticks.size() > 12 ? (ticks.size() + 11) / 12 : 1;
  for (std::size_t i = 0; i < ticks.size(); i += stride) {
    const double x = px(ticks[i]);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y0 + 4)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 16)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << format_real(ticks[i])
        << "</text>\n";
  }
  out << "<text x=\"" << num(f.left + f.plot_w() / 2) << "\" y=\"" << num(f.height - 20)
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << xml_escape(spec.x)
      << "</text>\n";

  std::vector<std::string> names;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t v = 0; v < vcols.size(); ++v) {
      std::string name = spec.values[v];
      if (!spec.series.empty()) name = spec.series + "=" + groups[g] + (vcols.size() > 1 ? " " + name : "");
      const char* colour = kPalette[names.size() % kPaletteSize];
      names.push_back(name);
      std::vector<std::pair<double, double>> pts;
      for (const auto r : members[g]) {
        const double x = parse_number(report.rows[r][xc]);
        const double y = parse_number(report.rows[r][vcols[v]]);
        if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
      }
      std::sort(pts.begin(), pts.end());
      out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) out << ' ';
        out << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
      }
      out << "\"/>\n";
      for (const auto& [x, y] : pts) {
        out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\"" << colour
            << "\"/>\n";
      }
    }
  }
  legend(out, f, names);
}

void bar_plot(std::ostringstream& out, const Frame& f, const SweepReport& report) {
  const auto& spec = report.plot;
  std::vector<std::size_t> vcols;
  for (const auto& v : spec.values) vcols.push_back(report.column_index(v));
  std::vector<std::size_t> lcols;
  for (const auto& l : spec.labels) lcols.push_back(report.column_index(l));

  const double ymax = value_max(report, vcols);
  y_axis(out, f, ymax, spec.y_label);
  const double y0 = f.top + f.plot_h();
  const std::size_t groups = std::max<std::size_t>(report.rows.size(), 1);
  const double group_w = f.plot_w() / static_cast<double>(groups);
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(vcols.size(), 1));

  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const double gx = f.left + group_w * static_cast<double>(r) + group_w * 0.1;
    for (std::size_t v = 0; v < vcols.size(); ++v) {
      double y = parse_number(report.rows[r][vcols[v]]);
      if (!std::isfinite(y)) y = 0;
      const double h = y / ymax * f.plot_h();
      out << "<rect x=\"" << num(gx + bar_w * static_cast<double>(v)) << "\" y=\"" << num(y0 - h) << "\" width=\""
          << num(bar_w) << "\" height=\"" << num(h) << "\" fill=\"" << kPalette[v % kPaletteSize] << "\"/>\n";
    }
    std::string label;
    for (const auto c : lcols) {
      if (!label.empty()) label += ' ';
      label += report.rows[r][c];
    }
    const double cx = f.left + group_w * (static_cast<double>(r) + 0.5);
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(y0 + 14)
        << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-35 " << num(cx)
        << ' ' << num(y0 + 14) << ")\">" << xml_escape(label) << "</text>\n";
  }
  legend(out, f, spec.values);
}

}  // namespace

std::string to_csv(const SweepReport& report) {
  std::string out;
  std::vector<std::string> header;
  for (const auto& c : report.columns) header.push_back(c.name);
  put_record(out, header);
  for (const auto& row : report.rows) put_record(out, row);
  return out;
}

std::string to_json(const SweepReport& report) {
  nlohmann::json doc;
  doc["name"] = report.name;
  doc["notes"] = report.notes;
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : report.columns) columns.push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
  doc["columns"] = columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[report.columns[i].name] = typed_cell(row[i], report.columns[i].kind);
    rows.push_back(obj);
  }
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

std::string to_svg(const SweepReport& report) {
  Frame frame;
  std::ostringstream out;
  open_svg(out, frame, report);
  const bool drawable = !report.plot.values.empty() && (report.plot.kind == PlotKind::Bar || !report.plot.x.empty());
  if (drawable && report.plot.kind == PlotKind::Line) line_plot(out, frame, report);
  if (drawable && report.plot.kind == PlotKind::Bar) bar_plot(out, frame, report);
  out << "</svg>\n";
  return out.str();
}

SweepReport parse_report_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"') {
      if (field_started) throw FormatError(i, "quote inside unquoted field");
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
      records.push_back(std::move(record));
      record.clear();
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw FormatError(text.size(), "unterminated quoted field");
  if (field_started || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw FormatError(0, "missing CSV header");

  SweepReport report;
  for (auto& name : records.front()) report.columns.push_back({std::move(name), CellKind::Text});
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != report.columns.size()) {
      throw FormatError(r, "CSV record " + std::to_string(r) + " has the wrong number of fields");
    }
    report.rows.push_back(std::move(records[r]));
  }
  return report;
}

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::string body;
  switch (format) {
    case ReportFormat::Csv:
      body = to_csv(report);
      break;
    case ReportFormat::Json:
      body = to_json(report);
      break;
    case ReportFormat::Svg:
      body = to_svg(report);
      break;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void emit_all(const SweepReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  for (const auto format : {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg}) {
    emit_report(report, format, dir / (report.name + extension(format)));
  }
}

}  // namespace latentlab
