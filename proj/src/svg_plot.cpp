#include "vsclab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace vsclab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Whole decades around the data in log10 units.
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
  }
};

}  // namespace

void writeLogLogSvg(std::ostream& out, const std::string& title, const std::string& xLabel,
                    const std::string& yLabel, const std::vector<PlotSeries>& series) {
  Range rx;
  Range ry;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (s.x[i] > 0.0 && s.y[i] > 0.0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        rx.add(std::log10(s.x[i]));
        ry.add(std::log10(s.y[i]));
      }
    }
  }
  rx.finish();
  ry.finish();
  const double plotW = kWidth - kLeft - kRight;
  const double plotH = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - rx.lo) / (rx.hi - rx.lo) * plotW; };
  auto py = [&](double y) { return kTop + (ry.hi - std::log10(y)) / (ry.hi - ry.lo) * plotH; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kLeft + plotW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n"
      << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plotW)
      << "\" height=\"" << num(plotH) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int xStep = std::max(1, static_cast<int>((rx.hi - rx.lo) / 8));
  for (int e = static_cast<int>(rx.lo); e <= static_cast<int>(rx.hi); e += xStep) {
    const double x = px(std::pow(10.0, e));
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(kTop + plotH) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + plotH + 16)
        << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  const int yStep = std::max(1, static_cast<int>((ry.hi - ry.lo) / 8));
  for (int e = static_cast<int>(ry.lo); e <= static_cast<int>(ry.hi); e += yStep) {
    const double y = py(std::pow(10.0, e));
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + plotW)
        << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + plotW / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(xLabel) << "</text>\n"
      << "<text transform=\"translate(16," << num(kTop + plotH / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yLabel) << "</text>\n";

  double legendY = kTop + 10;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (s.x[i] > 0.0 && s.y[i] > 0.0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        pts.emplace_back(px(s.x[i]), py(s.y[i]));
      }
    }
    if (!s.markersOnly && pts.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) out << num(x) << ',' << num(y) << ' ';
      out << "\"/>\n";
    } else {
      for (const auto& [x, y] : pts) {
        out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << s.color
            << "\"/>\n";
      }
    }
    out << "<line x1=\"" << num(kLeft + plotW + 12) << "\" y1=\"" << num(legendY) << "\" x2=\""
        << num(kLeft + plotW + 32) << "\" y2=\"" << num(legendY) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(kLeft + plotW + 36) << "\" y=\"" << num(legendY + 4) << "\">"
        << escape(s.label) << "</text>\n";
    legendY += 18;
  }
  out << "</svg>\n";
}

}  // namespace vsclab
