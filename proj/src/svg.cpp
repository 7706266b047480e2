#include "patterndyn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "patterndyn/csv_io.hpp"

namespace patterndyn {

std::string curves_svg(std::span<const TrajectoryRecord> records, const std::string& title,
                       const std::function<double(const FilterSnapshot&)>& metric) {
  constexpr double width = 640, height = 400, margin = 48;
  const std::size_t h = records.empty() ? 0 : records.front().filters.size();

  double x_max = 1.0, y_lo = 0.0, y_hi = 1e-12;
  for (const auto& r : records) {
    x_max = std::max(x_max, std::log10(1.0 + static_cast<double>(r.step)));
    for (const auto& f : r.filters) {
      y_lo = std::min(y_lo, metric(f));
      y_hi = std::max(y_hi, metric(f));
    }
  }
  auto px = [&](std::size_t step) {
    return margin + (width - 2 * margin) * std::log10(1.0 + static_cast<double>(step)) / x_max;
  };
  auto py = [&](double v) { return height - margin - (height - 2 * margin) * (v - y_lo) / (y_hi - y_lo); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<title>" << title << "</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << margin / 2 << "\" text-anchor=\"middle\">" << title << "</text>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">log10(1 + step)</text>\n";
  out << "<text x=\"4\" y=\"" << margin - 6 << "\">" << format_double(y_hi) << "</text>\n";
  out << "<text x=\"4\" y=\"" << height - margin << "\">" << format_double(y_lo) << "</text>\n";
  for (std::size_t i = 0; i < h; ++i) {
    const double hue = 360.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(h, 1));
    out << "<polyline id=\"filter-" << i << "\" fill=\"none\" stroke-width=\"1\" stroke=\"hsl("
        << static_cast<int>(hue) << ",70%,40%)\" points=\"";
    for (std::size_t r = 0; r < records.size(); ++r) {
      char buf[64];
      const int n = std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", r ? " " : "", px(records[r].step),
                                  py(metric(records[r].filters[i])));
      out.write(buf, n);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace patterndyn
