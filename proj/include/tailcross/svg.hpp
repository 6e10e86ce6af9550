#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tailcross/errors.hpp"
#include "tailcross/result.hpp"

namespace tailcross {

enum class PlotKind { grid_lines, mse_overlay, threshold_scatter };

inline PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "grid-lines") return PlotKind::grid_lines;
  if (s == "mse-overlay") return PlotKind::mse_overlay;
  if (s == "threshold-scatter") return PlotKind::threshold_scatter;
  throw parse_error("unknown plot kind: " + s);
}

/// Maps the data rectangle onto a fixed 640x480 canvas with 60px margins.
struct PlotFrame {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  static constexpr double width = 640.0;
  static constexpr double height = 480.0;
  static constexpr double margin = 60.0;

  double px(double x) const {
    return margin + (x - x_min) / span(x_min, x_max) * (width - 2 * margin);
  }
  double py(double y) const {
    return height - margin -
           (y - y_min) / span(y_min, y_max) * (height - 2 * margin);
  }

 private:
  static double span(double lo, double hi) {
    return hi > lo ? hi - lo : 1.0;
  }
};

namespace detail {

inline std::string svg_num(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

struct SeriesPoint {
  double param;
  double mean;
  double stddev;
  bool any_non_positive;
};

/// Groups rows by param; the mean/stddev use the plotted value, which is the
/// carried max for non-positive rows.
inline std::vector<SeriesPoint> aggregate_by_param(
    const std::vector<ResultRow>& rows) {
  std::map<double, std::vector<const ResultRow*>> by_param;
  for (const auto& r : rows) by_param[r.param].push_back(&r);
  std::vector<SeriesPoint> out;
  for (const auto& [param, group] : by_param) {
    double sum = 0.0;
    bool np = false;
    for (const auto* r : group) {
      sum += r->estimate;
      np = np || r->non_positive;
    }
    const double mean = sum / static_cast<double>(group.size());
    double var = 0.0;
    for (const auto* r : group) {
      const double d = r->estimate - mean;
      var += d * d;
    }
    var /= static_cast<double>(group.size());
    out.push_back({param, mean, std::sqrt(var), np});
  }
  return out;
}

inline PlotFrame frame_for(const std::vector<ResultRow>& rows,
                           bool include_identity) {
  PlotFrame f;
  f.x_min = f.y_min = std::numeric_limits<double>::infinity();
  f.x_max = f.y_max = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    f.x_min = std::min(f.x_min, r.param);
    f.x_max = std::max(f.x_max, r.param);
    f.y_min = std::min(f.y_min, r.estimate);
    f.y_max = std::max(f.y_max, r.estimate);
    if (r.ground_truth) {
      f.y_min = std::min(f.y_min, *r.ground_truth);
      f.y_max = std::max(f.y_max, *r.ground_truth);
    }
  }
  if (include_identity) {
    // The reference diagonal spans the x range; keep it inside the y range.
    f.y_min = std::min(f.y_min, f.x_min);
    f.y_max = std::max(f.y_max, f.x_max);
  }
  // A flat range still needs visible extent.
  if (!(f.x_max > f.x_min)) {
    f.x_min -= 0.5;
    f.x_max += 0.5;
  }
  if (!(f.y_max > f.y_min)) {
    f.y_min -= 0.5;
    f.y_max += 0.5;
  }
  return f;
}

inline void write_axes(std::ostream& os, const PlotFrame& f,
                       const std::string& x_label,
                       const std::string& y_label) {
  os << "<line class=\"axis\" x1=\"" << svg_num(PlotFrame::margin)
     << "\" y1=\"" << svg_num(PlotFrame::height - PlotFrame::margin)
     << "\" x2=\"" << svg_num(PlotFrame::width - PlotFrame::margin)
     << "\" y2=\"" << svg_num(PlotFrame::height - PlotFrame::margin)
     << "\" stroke=\"black\"/>\n";
  os << "<line class=\"axis\" x1=\"" << svg_num(PlotFrame::margin)
     << "\" y1=\"" << svg_num(PlotFrame::margin) << "\" x2=\""
     << svg_num(PlotFrame::margin) << "\" y2=\""
     << svg_num(PlotFrame::height - PlotFrame::margin)
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = f.x_min + (f.x_max - f.x_min) * i / 4.0;
    const double ty = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    os << "<text class=\"tick\" x=\"" << svg_num(f.px(tx)) << "\" y=\""
       << svg_num(PlotFrame::height - PlotFrame::margin + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << svg_num(tx)
       << "</text>\n";
    os << "<text class=\"tick\" x=\"" << svg_num(PlotFrame::margin - 8)
       << "\" y=\"" << svg_num(f.py(ty) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << svg_num(ty)
       << "</text>\n";
  }
  os << "<text class=\"label\" x=\"" << svg_num(PlotFrame::width / 2)
     << "\" y=\"" << svg_num(PlotFrame::height - 15)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label
     << "</text>\n";
  os << "<text class=\"label\" x=\"15\" y=\""
     << svg_num(PlotFrame::height / 2)
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 15 "
     << svg_num(PlotFrame::height / 2) << ")\">" << y_label << "</text>\n";
}

inline void write_marker(std::ostream& os, const PlotFrame& f, double x,
                         double y, bool non_positive) {
  if (non_positive) {
    // Carried (non-positive verdict) values render as open squares.
    os << "<rect class=\"marker non-positive\" x=\"" << svg_num(f.px(x) - 3.5)
       << "\" y=\"" << svg_num(f.py(y) - 3.5)
       << "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"#c44\"/>\n";
  } else {
    os << "<circle class=\"marker\" cx=\"" << svg_num(f.px(x)) << "\" cy=\""
       << svg_num(f.py(y)) << "\" r=\"3.5\" fill=\"#226\"/>\n";
  }
}

}  // namespace detail

/// Writes one self-contained SVG chart.
///
/// grid-lines: mean estimate with a +/- one-stddev bar per param value,
/// against the identity reference line.  mse-overlay adds a second series of
/// per-param mean log10(MSE), linearly rescaled into the estimate range.
/// threshold-scatter: one marker per row, no aggregation, no diagonal.
inline void write_plot_svg(std::ostream& os, const std::vector<ResultRow>& rows,
                           PlotKind kind) {
  if (rows.empty()) throw domain_error("plot: no rows");
  const bool diagonal = kind != PlotKind::threshold_scatter;
  const PlotFrame f = detail::frame_for(rows, diagonal);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << detail::svg_num(PlotFrame::width) << "\" height=\""
     << detail::svg_num(PlotFrame::height) << "\" viewBox=\"0 0 "
     << detail::svg_num(PlotFrame::width) << ' '
     << detail::svg_num(PlotFrame::height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::write_axes(os, f,
                     kind == PlotKind::threshold_scatter ? "threshold"
                                                         : "parameter",
                     "estimated shape");
  if (diagonal) {
    os << "<line class=\"identity\" x1=\"" << detail::svg_num(f.px(f.x_min))
       << "\" y1=\"" << detail::svg_num(f.py(f.x_min)) << "\" x2=\""
       << detail::svg_num(f.px(f.x_max)) << "\" y2=\""
       << detail::svg_num(f.py(f.x_max))
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }

  if (kind == PlotKind::threshold_scatter) {
    for (const auto& r : rows)
      detail::write_marker(os, f, r.param, r.estimate, r.non_positive);
    os << "</svg>\n";
    return;
  }

  const auto series = detail::aggregate_by_param(rows);
  os << "<polyline class=\"series\" fill=\"none\" stroke=\"#226\" points=\"";
  for (const auto& p : series)
    os << detail::svg_num(f.px(p.param)) << ',' << detail::svg_num(f.py(p.mean))
       << ' ';
  os << "\"/>\n";
  for (const auto& p : series) {
    if (p.stddev > 0.0) {
      os << "<line class=\"errorbar\" x1=\"" << detail::svg_num(f.px(p.param))
         << "\" y1=\"" << detail::svg_num(f.py(p.mean - p.stddev))
         << "\" x2=\"" << detail::svg_num(f.px(p.param)) << "\" y2=\""
         << detail::svg_num(f.py(p.mean + p.stddev))
         << "\" stroke=\"#226\"/>\n";
    }
    detail::write_marker(os, f, p.param, p.mean, p.any_non_positive);
  }

  if (kind == PlotKind::mse_overlay) {
    // log-scale the MSE, then rescale linearly into the estimate range.
    std::map<double, std::pair<double, std::size_t>> acc;
    for (const auto& r : rows)
      if (r.mse && *r.mse > 0.0) {
        acc[r.param].first += std::log10(*r.mse);
        acc[r.param].second += 1;
      }
    if (!acc.empty()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      std::vector<std::pair<double, double>> pts;
      for (const auto& [param, sum_count] : acc) {
        const double m = sum_count.first / static_cast<double>(sum_count.second);
        pts.emplace_back(param, m);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      const double scale = hi > lo ? (f.y_max - f.y_min) / (hi - lo) : 0.0;
      os << "<polyline class=\"mse\" fill=\"none\" stroke=\"#2a2\" "
            "stroke-dasharray=\"6 3\" points=\"";
      for (const auto& [param, m] : pts)
        os << detail::svg_num(f.px(param)) << ','
           << detail::svg_num(f.py(f.y_min + (m - lo) * scale)) << ' ';
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace tailcross
