#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chi0emos/dataset.hpp"
#include "chi0emos/pipeline.hpp"
#include "chi0emos/synth.hpp"

namespace {

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

// flat `key = value` lines; '#' starts a comment
std::map<std::string, std::string> readConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineNo) +
                               " is not 'key = value'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool parseBool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("not a boolean: '" + v + "'");
}

int runCommand(const chi0emos::RunConfig& config) {
  const chi0emos::IngestReport ingest = chi0emos::ingestCsv(config.dataPath);
  if (ingest.droppedRows > 0)
    std::fprintf(stderr, "warning: dropped %zu rows with missing fields\n",
                 ingest.droppedRows);

  const chi0emos::PipelineResult result = chi0emos::runPipeline(config, ingest.dataset);

  std::printf("stations: %zu, summary tables and plots under %s\n",
              ingest.dataset.stations.size(), config.outDir.c_str());
  if (!result.clean()) {
    std::fprintf(stderr, "%zu station/family cell(s) failed; see failures.json\n",
                 result.failures.size());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMOS postprocessing of forecast ensembles with the scaled chi^2_0 "
               "predictive distribution and censored benchmarks"};
  app.require_subcommand(1);

  // --- run ---
  chi0emos::RunConfig config;
  std::vector<std::string> familyNames = {"chi0", "csg0", "gev0"};
  std::string configPath;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "rolling fit/predict/verify over a dataset");
  run->add_option("--config", configPath, "flat `key = value` configuration file");
  run->add_option("--data", config.dataPath, "input CSV (station,date,obs,m1..mK)");
  run->add_option("--out", config.outDir, "output directory");
  run->add_option("--window", config.windowSize, "rolling training window in days");
  run->add_option("--families", familyNames, "families to run (chi0 csg0 gev0)")
      ->delimiter(',');
  run->add_option("--thresholds", config.thresholds, "event thresholds in mm, ascending")
      ->delimiter(',');
  CLI::Option* seedOpt =
      run->add_option("--seed", seed, "master seed (mandatory: PIT randomization)");
  run->add_flag("--warm-start", config.warmStart,
                "start each window from the previous optimum");
  run->add_option("--train-max-evals", config.trainMaxEvals,
                  "objective evaluation budget per window");
  run->add_option("--quad-abs-tol", config.quadAbsTol, "training quadrature absTol");
  run->add_option("--quad-rel-tol", config.quadRelTol, "training quadrature relTol");
  run->add_option("--threads", config.threads,
                  "worker threads (0 = auto; CHI0_EMOS_THREADS caps)");

  // --- synth ---
  chi0emos::SynthSpec synth;
  std::string synthOut;
  CLI::App* synthCmd =
      app.add_subcommand("synth", "generate a synthetic ensemble/observation CSV");
  synthCmd->add_option("--out", synthOut, "output CSV path")->required();
  synthCmd->add_option("--days", synth.days, "days per station");
  synthCmd->add_option("--stations", synth.stations, "number of stations");
  synthCmd->add_option("--members", synth.members, "ensemble size");
  synthCmd->add_option("--seed", synth.seed, "generator seed")->required();
  synthCmd->add_option("--start-date", synth.startDate, "first calendar day (ISO-8601)");
  synthCmd->add_option("--zero-day-prob", synth.zeroDayProb,
                       "fraction of all-zero ensemble days");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      config.seedProvided = seedOpt->count() > 0;
      config.seed = seed;

      // config-file values fill in whatever the command line left at default
      if (!configPath.empty()) {
        for (const auto& [key, value] : readConfigFile(configPath)) {
          if (key == "data") {
            if (config.dataPath.empty()) config.dataPath = value;
          } else if (key == "out") {
            if (config.outDir.empty()) config.outDir = value;
          } else if (key == "window") {
            if (run->count("--window") == 0) config.windowSize = std::stoi(value);
          } else if (key == "families") {
            if (run->count("--families") == 0) familyNames = splitList(value);
          } else if (key == "thresholds") {
            if (run->count("--thresholds") == 0) {
              config.thresholds.clear();
              for (const std::string& t : splitList(value))
                config.thresholds.push_back(std::stod(t));
            }
          } else if (key == "seed") {
            if (!config.seedProvided) {
              config.seed = std::stoull(value);
              config.seedProvided = true;
            }
          } else if (key == "warm-start") {
            if (run->count("--warm-start") == 0) config.warmStart = parseBool(value);
          } else if (key == "train-max-evals") {
            if (run->count("--train-max-evals") == 0) config.trainMaxEvals = std::stoi(value);
          } else if (key == "quad-abs-tol") {
            if (run->count("--quad-abs-tol") == 0) config.quadAbsTol = std::stod(value);
          } else if (key == "quad-rel-tol") {
            if (run->count("--quad-rel-tol") == 0) config.quadRelTol = std::stod(value);
          } else if (key == "threads") {
            if (run->count("--threads") == 0) config.threads = std::stoi(value);
          } else {
            throw std::runtime_error("unknown config key '" + key + "'");
          }
        }
      }

      if (config.dataPath.empty())
        throw std::runtime_error("--data (or a `data =` config entry) is required");
      if (config.outDir.empty())
        throw std::runtime_error("--out (or an `out =` config entry) is required");
      if (!config.seedProvided)
        throw std::runtime_error("--seed is mandatory: runs emit randomized PIT values");

      config.families.clear();
      for (const std::string& name : familyNames)
        config.families.push_back(chi0emos::familyFromName(name));
      return runCommand(config);
    }
    if (*synthCmd) {
      const chi0emos::ForecastDataset dataset = chi0emos::synthesizeDataset(synth);
      chi0emos::writeDatasetCsv(dataset, synthOut);
      std::printf("wrote %d day(s) x %d station(s) to %s\n", synth.days, synth.stations,
                  synthOut.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
