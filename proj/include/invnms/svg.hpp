#pragma once

#include <algorithm>
#include <cstdio>
#include <span>
#include <string>

#include "invnms/suppression.hpp"

namespace invnms::svg {

struct Pane {
  std::string title;
  std::span<const Detection> boxes;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

}  // namespace detail

/// Side-by-side panes, each a <g id="pane-N"> holding one stroked <rect> per
/// box and a score label. The only <rect> elements in the document are boxes.
/// Pane extent is the bounding extent of every box across all panes.
inline std::string render(std::span<const Pane> panes) {
  constexpr double kMargin = 20.0;
  constexpr double kTitle = 24.0;
  double extent_w = 1.0, extent_h = 1.0;
  for (const Pane& p : panes) {
    for (const Detection& d : p.boxes) {
      extent_w = std::max(extent_w, d.box.x2());
      extent_h = std::max(extent_h, d.box.y2());
    }
  }
  const double pane_w = extent_w + 2 * kMargin;
  const double total_w = pane_w * static_cast<double>(std::max<std::size_t>(panes.size(), 1));
  const double total_h = extent_h + 2 * kMargin + kTitle;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt2(total_w) +
         "\" height=\"" + detail::fmt2(total_h) + "\" viewBox=\"0 0 " + detail::fmt2(total_w) + " " +
         detail::fmt2(total_h) + "\">\n";
  for (std::size_t i = 0; i < panes.size(); ++i) {
    const Pane& p = panes[i];
    const double ox = pane_w * static_cast<double>(i) + kMargin;
    const double oy = kMargin + kTitle;
    out += "<g id=\"pane-" + std::to_string(i) + "\" data-title=\"" + detail::escape(p.title) + "\">\n";
    out += "<text x=\"" + detail::fmt2(ox) + "\" y=\"" + detail::fmt2(kMargin + 12.0) +
           "\" font-family=\"monospace\" font-size=\"14\">" + detail::escape(p.title) + " (" +
           std::to_string(p.boxes.size()) + ")</text>\n";
    for (const Detection& d : p.boxes) {
      const double x = ox + d.box.x1();
      const double y = oy + d.box.y1();
      out += "<rect x=\"" + detail::fmt2(x) + "\" y=\"" + detail::fmt2(y) + "\" width=\"" +
             detail::fmt2(d.box.width()) + "\" height=\"" + detail::fmt2(d.box.height()) +
             "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
      char score[32];
      std::snprintf(score, sizeof score, "%.3f", d.score);
      out += "<text x=\"" + detail::fmt2(x + 2.0) + "\" y=\"" + detail::fmt2(y + 11.0) +
             "\" font-family=\"monospace\" font-size=\"10\" fill=\"#d62728\">" + score + "</text>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace invnms::svg
