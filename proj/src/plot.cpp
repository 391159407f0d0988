#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/io.hpp"

namespace schurlab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string norm_growth_svg(const std::vector<NormGrowthRecord>& records, const std::string& title) {
  if (records.empty()) fail(ErrorKind::InvalidArgument, "no records to plot");
  constexpr double kWidth = 640;
  constexpr double kHeight = 400;
  constexpr double kLeft = 70;
  constexpr double kRight = 20;
  constexpr double kTop = 40;
  constexpr double kBottom = 50;

  double xmin = std::log2(static_cast<double>(records.front().n));
  double xmax = std::log2(static_cast<double>(records.back().n));
  if (xmax <= xmin) xmax = xmin + 1.0;
  double ymin = records.front().lower_bound;
  double ymax = ymin;
  for (const auto& r : records) {
    ymin = std::min(ymin, r.lower_bound);
    ymax = std::max(ymax, r.lower_bound);
  }
  const double pad = std::max(0.05 * (ymax - ymin), 0.05 * std::max(1.0, std::abs(ymax)));
  ymin -= pad;
  ymax += pad;
  const auto sx = [&](double n) {
    return kLeft + (std::log2(n) - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  const auto sy = [&](double v) {
    return kHeight - kBottom - (v - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         escape(title) + "</text>\n";
  const std::string x0 = num(kLeft);
  const std::string x1 = num(kWidth - kRight);
  const std::string y0 = num(kHeight - kBottom);
  const std::string y1 = num(kTop);
  svg += "<line x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x1 + "\" y2=\"" + y0 + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x0 + "\" y2=\"" + y1 + "\" stroke=\"black\"/>\n";
  for (const auto& r : records) {
    const std::string x = num(sx(r.n));
    svg += "<line x1=\"" + x + "\" y1=\"" + y0 + "\" x2=\"" + x + "\" y2=\"" + num(kHeight - kBottom + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + num(kHeight - kBottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(r.n) +
           "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = ymin + (ymax - ymin) * k / 4.0;
    const std::string y = num(sy(v));
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + y + "\" x2=\"" + x0 + "\" y2=\"" + y +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + y +
           "\" text-anchor=\"end\" dominant-baseline=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           label(v) + "</text>\n";
  }
  svg += "<text x=\"320\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">N (log scale)</text>\n";
  svg += "<text x=\"16\" y=\"200\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 200)\">lower bound</text>\n";
  std::string points;
  for (const auto& r : records) {
    if (!points.empty()) points += " ";
    points += num(sx(r.n)) + "," + num(sy(r.lower_bound));
  }
  svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\"/>\n";
  for (const auto& r : records) {
    svg += "<circle cx=\"" + num(sx(r.n)) + "\" cy=\"" + num(sy(r.lower_bound)) +
           "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace schurlab
