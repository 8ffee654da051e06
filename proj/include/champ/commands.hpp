#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace champ {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumeric = 4,
  kExitNoCandidate = 5,
  kExitIo = 6,
};

/// Text for --help describing the exit codes.
std::string exit_code_help();

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> resume;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool timing = false;  // record wall-clock times in pruning reports (otherwise 0)
  std::vector<int> dims;
};

/// Output directory contents:
///   train  → model.json, history.csv
///   champ  → report.csv, report.json, histogram.csv, and when a one-shot
///            candidate qualified: oneshot.json, pruned.json
///   mc     → mc.csv
///   bma    → bma.csv
///   census → census.csv (stdout summary always)
int run_train(const CommandOptions& opts);
int run_champ(const CommandOptions& opts);
int run_mc(const CommandOptions& opts);
int run_bma(const CommandOptions& opts);
int run_census(const CommandOptions& opts);

}  // namespace champ
