#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_common.hpp"
#include "mixdyn/errors.hpp"

namespace mixdyn::cli {

namespace {

// Minimal RFC-4180 reader: handles quoted cells with doubled quotes and
// LF / CRLF line endings.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open CSV '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool had_cell = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      had_cell = true;
    } else if (c == ',') {
      row.push_back(cell);
      cell.clear();
      had_cell = true;
    } else if (c == '\n') {
      if (had_cell || !cell.empty() || !row.empty()) {
        row.push_back(cell);
        rows.push_back(row);
      }
      row.clear();
      cell.clear();
      had_cell = false;
    } else if (c != '\r') {
      cell += c;
      had_cell = true;
    }
  }
  if (had_cell || !cell.empty() || !row.empty()) {
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw MissingColumnError(fmt::format("CSV has no column '{}'", name));
  }
  return static_cast<std::size_t>(it - header.begin());
}

double parse_number(const std::string& cell) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("CSV cell '{}' is not a number", cell));
  }
}

std::string svg_num(double v) {
  // Fixed two-decimal coordinates keep the output compact and byte-stable.
  return fmt::format("{:.2f}", v);
}

}  // namespace

int cmd_render(const CliOptions& options) {
  StrictConfig config(load_config(options.config_path));

  const std::string csv_path = config.text_required("csv");
  const std::string x_name = config.text_required("x");
  const std::vector<std::string> series =
      config.text_list("series", {});
  const std::string out_name = config.text("out", "chart.svg");
  const long width = config.integer("width", 640);
  const long height = config.integer("height", 400);
  config.reject_unknown();

  if (series.empty()) throw ConfigError("series must list at least one column");
  if (width < 100 || height < 100) {
    throw ConfigError("width and height must be at least 100");
  }
  ensure_out_dir(options.out_dir);

  const auto rows = read_csv(csv_path);
  if (rows.empty()) throw ConfigError("CSV has no header row");
  const std::vector<std::string>& header = rows.front();
  const std::size_t xi = column_index(header, x_name);
  std::vector<std::size_t> si;
  for (const std::string& name : series) si.push_back(column_index(header, name));

  std::vector<double> xs;
  std::vector<std::vector<double>> ys(series.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::vector<std::string>& row = rows[r];
    if (row.size() != header.size()) {
      throw ConfigError(fmt::format("CSV row {} has {} cells, expected {}", r,
                                    row.size(), header.size()));
    }
    xs.push_back(parse_number(row[xi]));
    for (std::size_t s = 0; s < si.size(); ++s) {
      ys[s].push_back(parse_number(row[si[s]]));
    }
  }

  // Data ranges; degenerate ranges get a unit span so coordinates stay finite.
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (!xs.empty()) {
    x_lo = *std::min_element(xs.begin(), xs.end());
    x_hi = *std::max_element(xs.begin(), xs.end());
    y_lo = ys[0][0];
    y_hi = ys[0][0];
    for (const auto& col : ys) {
      y_lo = std::min(y_lo, *std::min_element(col.begin(), col.end()));
      y_hi = std::max(y_hi, *std::max_element(col.begin(), col.end()));
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  const double margin = 50.0;
  const double plot_w = width - 2 * margin;
  const double plot_h = height - 2 * margin;
  const auto px = [&](double x) {
    return margin + plot_w * (x - x_lo) / (x_hi - x_lo);
  };
  const auto py = [&](double y) {
    return height - margin - plot_h * (y - y_lo) / (y_hi - y_lo);
  };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};
  constexpr std::size_t kPaletteSize = 6;

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      "width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      width, height, width, height);
  svg += fmt::format(
      "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      width, height);
  // Axes.
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
      svg_num(margin), svg_num(height - margin), svg_num(width - margin));
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
      svg_num(margin), svg_num(margin), svg_num(height - margin));
  // Axis labels with the data range.
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
      svg_num(width / 2.0), svg_num(height - margin / 4.0), x_name);
  if (!xs.empty()) {
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
        svg_num(margin), svg_num(height - margin / 2.0), x_lo);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
        svg_num(width - margin), svg_num(height - margin / 2.0), x_hi);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        svg_num(margin - 5.0), svg_num(height - margin), y_lo);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        svg_num(margin - 5.0), svg_num(margin), y_hi);
  }
  // One polyline per series plus a legend entry; with no data rows the chart
  // is axes only.
  for (std::size_t s = 0; !xs.empty() && s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    std::string points;
    for (std::size_t r = 0; r < xs.size(); ++r) {
      if (r) points += ' ';
      points += fmt::format("{},{}", svg_num(px(xs[r])), svg_num(py(ys[s][r])));
    }
    svg += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" "
        "points=\"{}\"/>\n",
        color, points);
    const double ly = margin + 15.0 * static_cast<double>(s);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
        "stroke-width=\"1.5\"/>\n",
        svg_num(width - margin - 120.0), svg_num(ly),
        svg_num(width - margin - 100.0), color);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
        svg_num(width - margin - 95.0), svg_num(ly + 4.0), series[s]);
  }
  svg += "</svg>\n";

  const std::string out_path = options.out_dir + "/" + out_name;
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", out_path));
  out << svg;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", out_path));

  write_manifest(options, "render", config.echo(), 0, {out_name});
  return 0;
}

}  // namespace mixdyn::cli
