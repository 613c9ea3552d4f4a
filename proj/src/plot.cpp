#include "gcfl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace gcfl {

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
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

}  // namespace

void write_profiles_svg(const std::vector<QFactorProfile>& profiles, std::ostream& out, const PlotOptions& opt) {
  if (profiles.empty()) throw ValidationError("nothing to plot");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& p : profiles) {
    for (double v : p.grid) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : p.values) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 64, right = 16, top = 36, bottom = 48;
  const double w = opt.width - left - right, h = opt.height - top - bottom;
  auto X = [&](double v) { return left + (v - x0) / (x1 - x0) * w; };
  auto Y = [&](double v) { return top + (y1 - v) / (y1 - y0) * h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    out << "<text x=\"" << fixed(opt.width / 2.0) << "\" y=\"20\" text-anchor=\"middle\">" << escape(opt.title)
        << "</text>\n";
  out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(w) << "\" height=\""
      << fixed(h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
    out << "<text x=\"" << fixed(X(vx)) << "\" y=\"" << fixed(top + h + 16) << "\" text-anchor=\"middle\">"
        << fixed(vx, 3) << "</text>\n";
    out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(Y(vy) + 4) << "\" text-anchor=\"end\">"
        << fixed(vy, 3) << "</text>\n";
  }
  const bool theta = profiles.front().coordinate == QCoordinate::theta;
  out << "<text x=\"" << fixed(left + w / 2) << "\" y=\"" << fixed(opt.height - 10.0) << "\" text-anchor=\"middle\">"
      << (theta ? "theta" : "x") << "</text>\n";

  int row = 0;
  for (const auto& p : profiles) {
    const bool dotted = p.component == Axis::z;
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\""
        << (dotted ? " stroke-dasharray=\"2,3\"" : "") << " data-component=\"" << to_string(p.component)
        << "\" points=\"";
    for (std::size_t k = 0; k < p.grid.size(); ++k)
      out << (k ? " " : "") << fixed(X(p.grid[k])) << ',' << fixed(Y(p.values[k]));
    out << "\"/>\n";
    const double ly = top + 14 + 16 * row++;
    out << "<line x1=\"" << fixed(left + w - 90) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(left + w - 60)
        << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"black\"" << (dotted ? " stroke-dasharray=\"2,3\"" : "")
        << "/>\n<text x=\"" << fixed(left + w - 54) << "\" y=\"" << fixed(ly) << "\">q_" << to_string(p.component)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace gcfl
