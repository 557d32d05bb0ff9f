#include "star/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace star {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Rounds a span up to 1, 2 or 5 times a power of ten.
double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<PlotSeries>& series) {
  double x_min = std::numeric_limits<double>::max();
  double x_max = std::numeric_limits<double>::lowest();
  double y_max = 0;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (x_min > x_max) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max == x_min) x_max = x_min + 1;
  const double y_step = nice_step(y_max > 0 ? y_max : 1, 5);
  const double y_top = std::ceil((y_max > 0 ? y_max : 1) / y_step) * y_step;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / y_top * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(0)) << "\" x2=\""
     << num(kLeft + plot_w) << "\" y2=\"" << num(py(0)) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
     << "\" y2=\"" << num(py(0)) << "\" stroke=\"black\"/>\n";
  for (double y = 0; y <= y_top + y_step / 2; y += y_step) {
    os << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(y)) << "\" x2=\""
       << num(kLeft + plot_w) << "\" y2=\"" << num(py(y)) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(y) + 4)
       << "\" text-anchor=\"end\">" << label(y) << "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << num(py(0) + 16)
       << "\" text-anchor=\"middle\">" << label(x) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 10)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(kTop + plot_h / 2) << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 16 " << num(kTop + plot_h / 2) << ")\">" << escape(y_label)
     << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < series[i].points.size(); ++k) {
      const auto [x, y] = series[i].points[k];
      os << (k ? " " : "") << num(px(x)) << ',' << num(py(y));
    }
    os << "\"/>\n";
    for (auto [x, y] : series[i].points) {
      os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    os << "<line x1=\"" << num(kWidth - kRight + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(kWidth - kRight + 35) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(kWidth - kRight + 40) << "\" y=\"" << num(ly + 4) << "\">"
       << escape(series[i].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace star
