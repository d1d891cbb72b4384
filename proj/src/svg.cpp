#include "chi0emos/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chi0emos {

namespace {

constexpr int kWidth = 480;
constexpr int kHeight = 360;
constexpr int kMarginLeft = 56;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 32;
constexpr int kMarginBottom = 44;

std::string escapeXml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void openDocument(std::ostringstream& svg, const std::string& title) {
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << escapeXml(title) << "</text>\n";
}

void drawAxes(std::ostringstream& svg, const std::string& xLabel, const std::string& yLabel) {
  const int x0 = kMarginLeft, y0 = kHeight - kMarginBottom;
  const int x1 = kWidth - kMarginRight, y1 = kMarginTop;
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escapeXml(xLabel) << "</text>\n"
      << "<text x=\"14\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 14 "
      << (y0 + y1) / 2 << ")\">" << escapeXml(yLabel) << "</text>\n";
}

}  // namespace

std::string renderHistogramSvg(const HistogramPlot& plot) {
  const Eigen::Index bins = plot.counts.size();
  if (bins == 0) throw std::invalid_argument("renderHistogramSvg: empty counts");
  for (Eigen::Index i = 0; i < bins; ++i)
    if (plot.counts[i] < 0)
      throw std::invalid_argument("renderHistogramSvg: negative count");

  const double plotW = kWidth - kMarginLeft - kMarginRight;
  const double plotH = kHeight - kMarginTop - kMarginBottom;
  const long total = plot.counts.sum();
  const int peak = std::max(plot.counts.maxCoeff(), 1);
  const double yMax = 1.15 * peak;

  std::ostringstream svg;
  openDocument(svg, plot.title);
  drawAxes(svg, plot.xLabel, plot.yLabel);

  const double barW = plotW / static_cast<double>(bins);
  for (Eigen::Index i = 0; i < bins; ++i) {
    const double h = plotH * plot.counts[i] / yMax;
    const double x = kMarginLeft + barW * static_cast<double>(i);
    const double y = kHeight - kMarginBottom - h;
    svg << "<rect x=\"" << num(x + 0.5) << "\" y=\"" << num(y) << "\" width=\""
        << num(std::max(barW - 1.0, 0.5)) << "\" height=\"" << num(h)
        << "\" fill=\"#4878a8\" stroke=\"#2f4858\" stroke-width=\"0.5\"/>\n";
  }

  // uniform reference at total/bins
  const double ref = static_cast<double>(total) / static_cast<double>(bins);
  const double refY = kHeight - kMarginBottom - plotH * ref / yMax;
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(refY) << "\" x2=\""
      << kWidth - kMarginRight << "\" y2=\"" << num(refY)
      << "\" stroke=\"#c0392b\" stroke-dasharray=\"5,4\"/>\n";

  // y-axis extremes
  svg << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kHeight - kMarginBottom + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">0</text>\n"
      << "<text x=\"" << kMarginLeft - 6 << "\" y=\""
      << num(kHeight - kMarginBottom - plotH * peak / yMax + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << peak
      << "</text>\n"
      << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kHeight - kMarginBottom + 14
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">n=" << total
      << "</text>\n";

  svg << "</svg>\n";
  return svg.str();
}

std::string renderReliabilitySvg(const ReliabilityPlot& plot) {
  if (plot.data.bins.empty())
    throw std::invalid_argument("renderReliabilitySvg: empty diagram data");

  const double plotW = kWidth - kMarginLeft - kMarginRight;
  const double plotH = kHeight - kMarginTop - kMarginBottom;
  auto px = [plotW](double p) { return kMarginLeft + p * plotW; };
  auto py = [plotH](double p) { return kHeight - kMarginBottom - p * plotH; };

  std::ostringstream svg;
  openDocument(svg, plot.title);
  drawAxes(svg, "forecast probability", "conditional event probability");

  svg << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(1))
      << "\" y2=\"" << num(py(1)) << "\" stroke=\"#999999\" stroke-dasharray=\"4,4\"/>\n";

  for (const auto& [p, y] : plot.data.pairs) {
    svg << "<circle cx=\"" << num(px(p)) << "\" cy=\"" << num(py(y))
        << "\" r=\"1.5\" fill=\"#666666\" fill-opacity=\"0.35\"/>\n";
  }

  for (const IsotonicFit::Segment& seg : plot.data.bins) {
    if (seg.probHi > seg.probLo) {
      svg << "<line x1=\"" << num(px(seg.probLo)) << "\" y1=\"" << num(py(seg.cep))
          << "\" x2=\"" << num(px(seg.probHi)) << "\" y2=\"" << num(py(seg.cep))
          << "\" stroke=\"#c0392b\" stroke-width=\"2.5\"/>\n";
    } else {
      svg << "<circle cx=\"" << num(px(seg.probLo)) << "\" cy=\"" << num(py(seg.cep))
          << "\" r=\"2.5\" fill=\"#c0392b\"/>\n";
    }
  }

  for (double tick : {0.0, 0.5, 1.0}) {
    svg << "<text x=\"" << num(px(tick)) << "\" y=\"" << kHeight - kMarginBottom + 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << num(tick) << "</text>\n"
        << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(py(tick) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(tick)
        << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace chi0emos
