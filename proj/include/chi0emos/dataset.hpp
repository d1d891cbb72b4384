#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace chi0emos {

/// Serial day number of an ISO-8601 calendar date (days since 1970-01-01);
/// consecutive calendar days differ by exactly 1.
std::int64_t parseIsoDate(const std::string& iso);
std::string formatIsoDate(std::int64_t day);

/// One station's time-ordered forecast cases.
struct StationSeries {
  struct Row {
    std::int64_t day;
    double observation;      // mm, >= 0
    Eigen::ArrayXd members;  // mm, >= 0
  };
  std::string station;
  std::vector<Row> rows;
};

/// Station-indexed table of observation/ensemble pairs with a uniform
/// member count; dates strictly increase within each station.
struct ForecastDataset {
  std::vector<StationSeries> stations;
  Eigen::Index memberCount = 0;

  const StationSeries* find(const std::string& station) const;
};

struct IngestReport {
  ForecastDataset dataset;
  std::size_t droppedRows = 0;  // rows discarded for missing fields
};

/// Reads `station,date,obs,m1..mK` CSV.  Rows with empty fields are
/// dropped (count reported); malformed headers or values, non-monotone
/// dates and negative values are hard errors naming the row.
IngestReport ingestCsv(const std::string& path);

/// Full-precision export in the ingest column layout (round-trips).
void writeDatasetCsv(const ForecastDataset& dataset, const std::string& path);

}  // namespace chi0emos
