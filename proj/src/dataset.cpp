#include "chi0emos/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chi0emos {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t daysFromCivil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civilFromDays(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(yy + (m <= 2));
}

unsigned daysInMonth(int y, unsigned m) {
  static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[m - 1];
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parseValue(const std::string& field, size_t lineNo, const char* what) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw std::runtime_error("ingestCsv: malformed " + std::string(what) + " at row " +
                             std::to_string(lineNo) + ": '" + field + "'");
  if (!std::isfinite(v) || v < 0.0)
    throw std::runtime_error("ingestCsv: negative or non-finite " + std::string(what) +
                             " at row " + std::to_string(lineNo));
  return v;
}

}  // namespace

std::int64_t parseIsoDate(const std::string& iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      std::sscanf(iso.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3)
    throw std::invalid_argument("not an ISO-8601 date: '" + iso + "'");
  if (m < 1 || m > 12 || d < 1 || d > daysInMonth(y, m))
    throw std::invalid_argument("calendar date out of range: '" + iso + "'");
  return daysFromCivil(y, m, d);
}

std::string formatIsoDate(std::int64_t day) {
  int y;
  unsigned m, d;
  civilFromDays(day, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

const StationSeries* ForecastDataset::find(const std::string& station) const {
  for (const StationSeries& s : stations)
    if (s.station == station) return &s;
  return nullptr;
}

IngestReport ingestCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingestCsv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingestCsv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = splitCsvLine(line);
  if (header.size() < 4 || header[0] != "station" || header[1] != "date" || header[2] != "obs")
    throw std::runtime_error("ingestCsv: malformed header, expected station,date,obs,m1..mK");
  const size_t memberCount = header.size() - 3;
  for (size_t k = 0; k < memberCount; ++k) {
    if (header[3 + k] != "m" + std::to_string(k + 1))
      throw std::runtime_error("ingestCsv: malformed header, member column " +
                               std::to_string(k + 1) + " must be named m" +
                               std::to_string(k + 1));
  }

  IngestReport report;
  report.dataset.memberCount = static_cast<Eigen::Index>(memberCount);

  size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields = splitCsvLine(line);
    if (fields.size() > header.size())
      throw std::runtime_error("ingestCsv: too many fields at row " + std::to_string(lineNo));

    // short rows and empty cells are missing data: drop, count, move on
    const bool missing = fields.size() < header.size() ||
                         std::any_of(fields.begin(), fields.end(),
                                     [](const std::string& f) { return f.empty(); });
    if (missing) {
      ++report.droppedRows;
      continue;
    }

    StationSeries::Row row;
    std::int64_t day;
    try {
      day = parseIsoDate(fields[1]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("ingestCsv: row " + std::to_string(lineNo) + ": " + e.what());
    }
    row.day = day;
    row.observation = parseValue(fields[2], lineNo, "observation");
    row.members.resize(static_cast<Eigen::Index>(memberCount));
    for (size_t k = 0; k < memberCount; ++k)
      row.members[static_cast<Eigen::Index>(k)] = parseValue(fields[3 + k], lineNo, "member");

    auto& stations = report.dataset.stations;
    auto it = std::find_if(stations.begin(), stations.end(),
                           [&fields](const StationSeries& s) { return s.station == fields[0]; });
    if (it == stations.end()) {
      stations.push_back({fields[0], {}});
      it = std::prev(stations.end());
    }
    if (!it->rows.empty() && it->rows.back().day >= row.day)
      throw std::runtime_error("ingestCsv: dates not strictly increasing for station '" +
                               fields[0] + "' at row " + std::to_string(lineNo));
    it->rows.push_back(std::move(row));
  }
  return report;
}

void writeDatasetCsv(const ForecastDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("writeDatasetCsv: cannot open '" + path + "'");
  out << "station,date,obs";
  for (Eigen::Index k = 1; k <= dataset.memberCount; ++k) out << ",m" << k;
  out << "\n";
  char buf[32];
  auto emit = [&out, &buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const StationSeries& s : dataset.stations) {
    for (const StationSeries::Row& row : s.rows) {
      out << s.station << ',' << formatIsoDate(row.day) << ',';
      emit(row.observation);
      for (Eigen::Index k = 0; k < row.members.size(); ++k) {
        out << ',';
        emit(row.members[k]);
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("writeDatasetCsv: write failed for '" + path + "'");
}

}  // namespace chi0emos
