#include "grokbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace grokbench {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

std::string line_chart_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                           const LineChartOptions& opts) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("line_chart_svg: empty or mismatched series");
  const int ml = 60, mr = 15, mt = 30, mb = 40;
  const double pw = opts.width - ml - mr, ph = opts.height - mt - mb;

  std::vector<double> yv = ys;
  if (opts.log_y)
    for (auto& v : yv) v = std::log10(std::max(v, 1e-300));
  double xmin = *std::min_element(xs.begin(), xs.end());
  double xmax = *std::max_element(xs.begin(), xs.end());
  double ymin = *std::min_element(yv.begin(), yv.end());
  double ymax = *std::max_element(yv.begin(), yv.end());
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << opts.width / 2 << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\">" << opts.title << "</text>\n";
  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv_tick = ymin + (ymax - ymin) * i / 4.0;
    const double ypix = py(yv_tick);
    const double shown = opts.log_y ? std::pow(10.0, yv_tick) : yv_tick;
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << fmt(ypix) << "\" x2=\"" << ml << "\" y2=\""
        << fmt(ypix) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(ypix + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << (opts.log_y ? ("1e" + fmt(std::round(std::log10(shown) * 100) / 100)) : fmt(shown))
        << "</text>\n";
    const double xv_tick = xmin + (xmax - xmin) * i / 4.0;
    const double xpix = px(xv_tick);
    svg << "<line x1=\"" << fmt(xpix) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(xpix)
        << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(xpix) << "\" y=\"" << mt + ph + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt(xv_tick) << "</text>\n";
  }
  svg << "<text x=\"14\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 14 " << mt + ph / 2
      << ")\">" << opts.y_label << (opts.log_y ? " (log)" : "") << "</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    svg << fmt(px(xs[i])) << ',' << fmt(py(yv[i])) << ' ';
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

std::string heatmap_svg(const Matrix& m, const HeatmapOptions& opts) {
  if (m.size() == 0) throw std::invalid_argument("heatmap_svg: empty matrix");
  Matrix v = m;
  if (opts.hide_diagonal) v.diagonal().setZero();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (opts.hide_diagonal && i == j) continue;
      lo = std::min(lo, v(i, j));
      hi = std::max(hi, v(i, j));
    }
  if (!(hi > lo)) hi = lo + 1;

  const int w = static_cast<int>(v.cols()) * opts.cell;
  const int h = static_cast<int>(v.rows()) * opts.cell + (opts.title.empty() ? 0 : 20);
  const int top = opts.title.empty() ? 0 : 20;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  if (!opts.title.empty())
    svg << "<text x=\"4\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\">" << opts.title
        << "</text>\n";
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      double t = (v(i, j) - lo) / (hi - lo);
      if (opts.hide_diagonal && i == j) t = 0.0;
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      svg << "<rect x=\"" << j * opts.cell << "\" y=\"" << top + i * opts.cell << "\" width=\""
          << opts.cell << "\" height=\"" << opts.cell << "\" fill=\"rgb(" << g << ',' << g << ','
          << g << ")\"/>\n";
    }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace grokbench
