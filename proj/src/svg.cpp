#include "spmrp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spmrp {

namespace {

double nice_ceiling(double v) {
  if (v <= 0.0) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mult * mag >= v) return mult * mag;
  }
  return 10.0 * mag;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::string coverage_chart_svg(const ComparisonReport& report, const std::string& title) {
  const double W = 640, H = 640, margin = 70;
  double maxv = 1.0;
  for (const auto& c : report.counties) {
    maxv = std::max(maxv, static_cast<double>(c.baseline));
    maxv = std::max(maxv, c.hi95);
  }
  maxv = nice_ceiling(maxv * 1.05);
  const auto sx = [&](double v) { return margin + (W - 2 * margin) * v / maxv; };
  const auto sy = [&](double v) { return H - margin - (H - 2 * margin) * v / maxv; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" << title << "</text>\n";
  // axes
  svg << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(maxv) << "\" y2=\""
      << sy(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(0) << "\" y2=\""
      << sy(maxv) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = maxv * t / 4.0;
    svg << "<text x=\"" << sx(v) << "\" y=\"" << sy(0) + 20
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << num(v)
        << "</text>\n";
    svg << "<text x=\"" << sx(0) - 8 << "\" y=\"" << sy(v) + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(v)
        << "</text>\n";
  }
  svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 16
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">baseline "
         "count</text>\n";
  svg << "<text x=\"18\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 " << H / 2 << ")\">estimate (median, 95% interval)</text>\n";
  // identity line
  svg << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(maxv) << "\" y2=\""
      << sy(maxv) << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";
  for (const auto& c : report.counties) {
    const double x = sx(static_cast<double>(c.baseline));
    const std::string color = c.excluded ? "#bbbbbb" : (c.covered ? "#1a7f37" : "#c23b22");
    svg << "<line x1=\"" << x << "\" y1=\"" << sy(c.lo95) << "\" x2=\"" << x << "\" y2=\""
        << sy(c.hi95) << "\" stroke=\"" << color << "\" stroke-width=\"1.2\"/>\n";
    svg << "<circle cx=\"" << x << "\" cy=\"" << sy(c.median) << "\" r=\"3\" fill=\"" << color
        << "\"><title>" << c.county_id << "</title></circle>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace spmrp
