#include "homtk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "homtk/errors.hpp"

namespace homtk::svg {

void write_plot(const std::string& path, const std::vector<Series>& series,
                const std::string& x_label, const std::string& y_label) {
  constexpr double kW = 720, kH = 420, kMargin = 56;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double x) {
    return kMargin + (x - xmin) / (xmax - xmin) * (kW - 2 * kMargin);
  };
  const auto py = [&](double y) {
    return kH - kMargin - (y - ymin) / (ymax - ymin) * (kH - 2 * kMargin);
  };

  std::ofstream out(path);
  if (!out) throw domain_error("cannot open for writing: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
      << "' height='" << kH << "' viewBox='0 0 " << kW << ' ' << kH << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<rect x='" << kMargin << "' y='" << kMargin << "' width='"
      << kW - 2 * kMargin << "' height='" << kH - 2 * kMargin
      << "' fill='none' stroke='#444'/>\n";
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << s.color
        << "' stroke-width='1.2' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "'/>\n";
  }
  out << "<text x='" << kW / 2 << "' y='" << kH - 12
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  out << "<text x='16' y='" << kH / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
      << kH / 2 << ")'>" << y_label << "</text>\n";
  // axis range annotations
  out << "<text x='" << kMargin << "' y='" << kH - kMargin + 16
      << "' font-size='11'>" << xmin << "</text>\n";
  out << "<text x='" << kW - kMargin << "' y='" << kH - kMargin + 16
      << "' text-anchor='end' font-size='11'>" << xmax << "</text>\n";
  out << "<text x='" << kMargin - 4 << "' y='" << kH - kMargin
      << "' text-anchor='end' font-size='11'>" << ymin + ypad << "</text>\n";
  out << "<text x='" << kMargin - 4 << "' y='" << kMargin + 4
      << "' text-anchor='end' font-size='11'>" << ymax - ypad << "</text>\n";
  out << "</svg>\n";
}

}  // namespace homtk::svg
