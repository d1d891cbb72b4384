#pragma once

#include <Eigen/Core>

#include <string>

#include "chi0emos/verification.hpp"

namespace chi0emos {

/// Bar chart of bin counts over [0,1] (PIT histograms) or rank indices
/// (rank histograms).  A dashed uniform-reference line is drawn at
/// total/bins.  Returns a standalone well-formed SVG document.
struct HistogramPlot {
  std::string title;
  Eigen::ArrayXi counts;
  std::string xLabel = "bin";
  std::string yLabel = "count";
};

std::string renderHistogramSvg(const HistogramPlot& plot);

/// CORP reliability diagram: unit square with the diagonal, the isotonic
/// step segments, and the forecast/outcome scatter.
struct ReliabilityPlot {
  std::string title;
  ReliabilityDiagramData data;
};

std::string renderReliabilitySvg(const ReliabilityPlot& plot);

}  // namespace chi0emos
