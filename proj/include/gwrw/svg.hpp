#pragma once

// Minimal self-contained SVG line plots: axes with ticks, polylines and
// vertical error bars. All numbers go through format_fixed so the output is
// byte-stable.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gwrw/format.hpp"

namespace gwrw::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_low;   // optional error bar ends; empty or same size as y
  std::vector<double> y_high;
  std::string colour = "#1f77b4";
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
  std::optional<double> reference_y;  // horizontal dashed line
  std::string comment;                // embedded verbatim inside <!-- -->
};

namespace detail {

inline std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" is not allowed inside an XML comment.
inline std::string comment_safe(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += s[i];
    if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '-') out += ' ';
  }
  return out;
}

inline double nice_step(double span, int target) {
  const double raw = span / target;
  const double base = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * base >= raw) return m * base;
  }
  return 10.0 * base;
}

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string tick_label(double v) {
  if (v == 0.0) return "0";
  const double a = std::abs(v);
  if (a >= 1e5 || a < 1e-3) {
    const int e = static_cast<int>(std::floor(std::log10(a)));
    const double m = v / std::pow(10.0, e);
    return (std::abs(m - 1.0) < 1e-9 ? std::string("1") : format_fixed(m, 1)) + "e" + std::to_string(e);
  }
  std::string s = format_fixed(v, 4);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace detail

inline void write_plot(std::ostream& os, const Plot& plot) {
  constexpr double width = 640.0, height = 420.0;
  constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 55.0;
  const double pw = width - left - right, ph = height - top - bottom;

  auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
      if (!s.y_low.empty()) y0 = std::min(y0, s.y_low[i]);
      if (!s.y_high.empty()) y1 = std::max(y1, s.y_high[i]);
    }
  }
  if (plot.reference_y) {
    y0 = std::min(y0, *plot.reference_y);
    y1 = std::max(y1, *plot.reference_y);
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
  if (x0 == x1) x0 -= 0.5, x1 += 0.5;
  if (y0 == y1) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
  using detail::num;

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  if (!plot.comment.empty()) os << "<!--\n" << detail::comment_safe(plot.comment) << "-->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << detail::escape(plot.title) << "</text>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
     << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw) << "\" y2=\""
     << num(top + ph) << "\"/>\n"
     << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(top + ph)
     << "\"/>\n</g>\n";

  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  // x ticks: decades on a log axis, nice steps otherwise
  if (plot.log_x) {
    for (double e = std::ceil(x0 - 1e-9); e <= x1 + 1e-9; e += 1.0) {
      const double x = left + (e - x0) / (x1 - x0) * pw;
      os << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
         << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">1e"
         << static_cast<int>(e) << "</text>\n";
    }
  } else {
    const double step = detail::nice_step(x1 - x0, 6);
    for (double v = std::ceil(x0 / step) * step; v <= x1 + 1e-9 * step; v += step) {
      const double x = left + (v - x0) / (x1 - x0) * pw;
      os << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
         << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
         << detail::tick_label(std::abs(v) < 1e-12 * step ? 0.0 : v) << "</text>\n";
    }
  }
  {
    const double step = detail::nice_step(y1 - y0, 6);
    for (double v = std::ceil(y0 / step) * step; v <= y1 + 1e-9 * step; v += step) {
      const double y = py(v);
      os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\"" << num(y)
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
         << detail::tick_label(std::abs(v) < 1e-12 * step ? 0.0 : v) << "</text>\n";
    }
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 12) << "\" text-anchor=\"middle\">"
     << detail::escape(plot.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num(top + ph / 2) << ")\">" << detail::escape(plot.y_label) << "</text>\n";
  os << "</g>\n";

  if (plot.reference_y) {
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(*plot.reference_y)) << "\" x2=\"" << num(left + pw)
       << "\" y2=\"" << num(py(*plot.reference_y)) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (const auto& s : plot.series) {
    if (s.x.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && !s.y_low.empty(); ++i) {
      const double x = px(s.x[i]);
      os << "<path stroke=\"" << s.colour << "\" fill=\"none\" d=\"M" << num(x) << ',' << num(py(s.y_low[i])) << " L"
         << num(x) << ',' << num(py(s.y_high[i])) << " M" << num(x - 4) << ',' << num(py(s.y_low[i])) << " L"
         << num(x + 4) << ',' << num(py(s.y_low[i])) << " M" << num(x - 4) << ',' << num(py(s.y_high[i])) << " L"
         << num(x + 4) << ',' << num(py(s.y_high[i])) << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size() && s.markers; ++i) {
      os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\"" << s.colour
         << "\"/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace gwrw::svg
