#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chaospec/version.hpp"

// Artifact writers.  Every file starts from the same meta description
// (version, command, ordered parameter list, seed where applicable) so a
// run can be reproduced from its own output.  Numbers are printed with 17
// significant digits, which round-trips doubles exactly.

namespace chaospec::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

struct MetaBlock {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;

  void add(const std::string& key, const std::string& value) {
    params.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    params.emplace_back(key, format_double(value));
  }
  void add(const std::string& key, std::int64_t value) {
    params.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, std::uint64_t value) {
    params.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, int value) {
    params.emplace_back(key, std::to_string(value));
  }

  json as_json() const {
    json meta;
    meta["version"] = version;
    meta["command"] = command;
    json p;
    for (const auto& [key, value] : params) p[key] = value;
    meta["params"] = p;
    return meta;
  }
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::invalid_argument("cannot open output file: " + path);
  return out;
}

inline void write_csv(const std::string& path, const MetaBlock& meta,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_output(path);
  out << "# chaospec " << version << "\n";
  out << "# command: " << meta.command << "\n";
  for (const auto& [key, value] : meta.params)
    out << "# " << key << ": " << value << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
}

inline void write_json(const std::string& path, const MetaBlock& meta,
                       json body) {
  body["meta"] = meta.as_json();
  std::ofstream out = open_output(path);
  out << body.dump(2) << "\n";
}

inline void write_json_lines(const std::string& path,
                             const std::vector<json>& records) {
  std::ofstream out = open_output(path);
  for (const auto& record : records) out << record.dump() << "\n";
}

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

// Minimal static line chart; enough to eyeball a spectrum or a
// decorrelation curve without external tooling.
inline void write_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  constexpr int width = 720, height = 480;
  constexpr int left = 70, right = 20, top = 40, bottom = 50;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  auto map_x = [&](double v) {
    return left + (v - x_min) / (x_max - x_min) * (width - left - right);
  };
  auto map_y = [&](double v) {
    return height - bottom -
           (v - y_min) / (y_max - y_min) * (height - top - bottom);
  };
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#8c564b"};

  std::ofstream out = open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title
      << "</text>\n";
  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\""
      << width - right << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = x_min + (x_max - x_min) * tick / 4.0;
    const double fy = y_min + (y_max - y_min) * tick / 4.0;
    char label[32];
    out << "<line x1=\"" << map_x(fx) << "\" y1=\"" << height - bottom
        << "\" x2=\"" << map_x(fx) << "\" y2=\"" << height - bottom + 5
        << "\" stroke=\"black\"/>\n";
    std::snprintf(label, sizeof(label), "%.4g", fx);
    out << "<text x=\"" << map_x(fx) << "\" y=\"" << height - bottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << label << "</text>\n";
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << map_y(fy) << "\" x2=\""
        << left << "\" y2=\"" << map_y(fy) << "\" stroke=\"black\"/>\n";
    std::snprintf(label, sizeof(label), "%.4g", fy);
    out << "<text x=\"" << left - 8 << "\" y=\"" << map_y(fy) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << label << "</text>\n";
  }
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\""
      << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (top + height - bottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << (top + height - bottom) / 2 << ")\">" << y_label << "</text>\n";
  int color = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\""
        << palette[color % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << map_x(s.x[i]) << "," << map_y(s.y[i]) << " ";
    out << "\"/>\n";
    if (!s.label.empty())
      out << "<text x=\"" << width - right - 10 << "\" y=\""
          << top + 16 * (color + 1)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"12\" fill=\""
          << palette[color % 6] << "\">" << s.label << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
}

}  // namespace chaospec::io
