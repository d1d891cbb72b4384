#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chi0emos/dataset.hpp"
#include "chi0emos/distributions.hpp"
#include "chi0emos/scoring.hpp"

namespace chi0emos {

/// Everything one `run` needs: data and output locations, the rolling
/// protocol, the event thresholds, and the mandatory master seed.
struct RunConfig {
  std::string dataPath;
  std::string outDir;
  int windowSize = 30;
  std::vector<Family> families = {Family::chi0, Family::csg0, Family::gev0};
  std::vector<double> thresholds = {5.0, 10.0, 20.0, 30.0};
  std::uint64_t seed = 0;
  bool seedProvided = false;
  bool warmStart = false;
  int trainMaxEvals = 500;
  double quadAbsTol = 1e-8;
  double quadRelTol = 1e-7;
  int threads = 0;  // 0 = hardware concurrency; CHI0_EMOS_THREADS caps either way

  void validate() const;
};

struct CellFailure {
  std::string station;
  std::string family;  // "ens" for the raw-ensemble column
  std::string stage;
  std::string message;
};

/// In-memory mirror of the emitted tables (full precision, pre-rounding),
/// for tests and downstream tooling.
struct PipelineResult {
  struct CrpsCell {
    double mean = 0.0;
    double max = 0.0;
    std::size_t cases = 0;
    bool present = false;
  };
  struct CrpsRow {
    std::string station;
    std::vector<CrpsCell> byFamily;  // config.families order
    CrpsCell ensemble;
  };
  struct BrierRow {
    double threshold;
    std::string family;
    BrierDecomposition decomposition;
    long events = 0;
    std::size_t cases = 0;
  };

  std::vector<CrpsRow> crpsRows;
  std::vector<BrierRow> brierRows;
  std::vector<CellFailure> failures;

  bool clean() const { return failures.empty(); }
};

/// Full verification run: per station x family rolling forecasts, scores,
/// calibration artifacts, summary tables, SVG plots, and the failure
/// manifest, all under config.outDir.  A module error aborts only the cell
/// it occurred in.  Deterministic for a fixed config and seed.
PipelineResult runPipeline(const RunConfig& config, const ForecastDataset& dataset);

}  // namespace chi0emos
